"""Classification of bilinear level tensors over an isogeny datum.

A level is an element b of X*(S) (x) X*(T), stored as the integer matrix
B of the associated bilinear form over the cocharacter bases:
B[i][j] = b(mu_i, lambda_j).  In these coordinates integrality of b on
the cocharacter lattices is automatic and the induced map
bmap: X_*(T) -> X*(S) is plain matrix-vector multiplication (the
character-basis coordinates of b agree with B because the bases are
dual pairs).

The classification pipeline: the Weyl-invariant sublattice of all
levels, the even-values sublattice cut out by b(acheck, acheck) = 0
mod 2 over every root, and the comparison of their intersection with a
bundled reference table of classical results.  Disagreements with the
reference table are reported as data, never patched.

Symmetry of b is not assumed anywhere; a symmetric projection helper is
provided as a labeled convenience only.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .intlinalg import (
    FracMat,
    Matrix,
    Vector,
    freeze,
    hnf_basis,
    identity,
    kernel_basis,
    kernel_basis_mod2,
    lattices_equal,
    matmul,
    matvec,
    transpose,
)
from .rootdata import DatumError, IsogenyDatum, RootDatum, dot, fracvec
from .weyl import WeylGroup, generate


@dataclass(frozen=True)
class LevelTensor:
    """A level b over an isogeny datum, as its cocharacter Gram matrix."""

    iso: IsogenyDatum
    matrix: Matrix

    def __post_init__(self):
        if len(self.matrix) != self.iso.source.rank:
            raise DatumError("level matrix has wrong row count")
        if self.matrix and len(self.matrix[0]) != self.iso.target.rank:
            raise DatumError("level matrix has wrong column count")

    def bmap(self, lam: Vector) -> Vector:
        """Induced map X_*(T) -> X*(S) on basis coordinates."""
        return matvec(self.matrix, lam)

    def value(self, mu: Vector, lam: Vector) -> int:
        """b(mu, lambda) for cocharacter coordinate vectors."""
        return sum(m * x for m, x in zip(mu, self.bmap(lam)))

    def add(self, other: "LevelTensor") -> "LevelTensor":
        if other.iso is not self.iso and other.iso != self.iso:
            raise DatumError("levels live over different isogeny data")
        return LevelTensor(
            self.iso,
            tuple(
                tuple(a + b for a, b in zip(ra, rb))
                for ra, rb in zip(self.matrix, other.matrix)
            ),
        )

    def scale(self, k: int) -> "LevelTensor":
        return LevelTensor(
            self.iso, tuple(tuple(k * x for x in row) for row in self.matrix)
        )

    def neg(self) -> "LevelTensor":
        return self.scale(-1)

    def ambient_form(self) -> FracMat:
        """Coefficient matrix of b on reference coordinates (for display)."""
        cs = self.iso.source.char_basis
        ct = self.iso.target.char_basis
        n = self.iso.source.ambient_dim
        out = []
        for s in range(n):
            row = []
            for t in range(self.iso.target.ambient_dim):
                val = Fraction(0)
                for i in range(len(cs)):
                    for j in range(len(ct)):
                        val += self.matrix[i][j] * cs[i][s] * ct[j][t]
                row.append(val)
            out.append(tuple(row))
        return tuple(out)


# ---------------------------------------------------------------------------
# Weyl actions over an isogeny


class SharedWeylAction:
    """The target's Weyl group with its induced action on the source lattices.

    Source-side action matrices are obtained exactly by re-expressing the
    ambient action through the rational coordinate systems; they are
    integer matrices because the source lattices are stable under it.
    """

    def __init__(self, iso: IsogenyDatum, group: WeylGroup | None = None,
                 cap: int = 10**6):
        self.iso = iso
        self.group = group if group is not None else generate(iso.target, cap)
        if self.group.datum != iso.target:
            raise DatumError("Weyl group was generated from a different datum")
        self._source_char: dict[int, Matrix] = {}
        self._source_cochar: dict[int, Matrix] = {}

    def _reexpress(self, idx: int, kind: str) -> Matrix:
        iso = self.iso
        tgt, src = iso.target, iso.source
        elem = self.group.elements[idx]
        cols = []
        if kind == "char":
            basis, tgt_basis, action = src.char_basis, tgt.char_basis, elem.char_action
            coords_q, coords = tgt.char_coords_q, src.char_coords
            amb = tgt.char_ambient
        else:
            basis, tgt_basis, action = (
                src.cochar_basis, tgt.cochar_basis, elem.cochar_action,
            )
            coords_q, coords = tgt.cochar_coords_q, src.cochar_coords
            amb = tgt.cochar_ambient
        del tgt_basis
        for vec in basis:
            c = coords_q(vec)
            if c is None:
                raise DatumError("source basis vector outside the target span")
            img_coords = tuple(
                sum((Fraction(action[i][j]) * c[j] for j in range(len(c))),
                    Fraction(0))
                for i in range(len(c))
            )
            img = coords(amb(img_coords))
            if img is None:
                raise DatumError("Weyl action does not preserve the source lattice")
            cols.append(img)
        r = len(cols)
        return tuple(tuple(cols[j][i] for j in range(r)) for i in range(r))

    def source_char_action(self, idx: int) -> Matrix:
        got = self._source_char.get(idx)
        if got is None:
            got = self._reexpress(idx, "char")
            self._source_char[idx] = got
        return got

    def source_cochar_action(self, idx: int) -> Matrix:
        got = self._source_cochar.get(idx)
        if got is None:
            got = self._reexpress(idx, "cochar")
            self._source_cochar[idx] = got
        return got

    def target_char_action(self, idx: int) -> Matrix:
        return self.group.elements[idx].char_action

    def target_cochar_action(self, idx: int) -> Matrix:
        return self.group.elements[idx].cochar_action


def is_invariant(action: SharedWeylAction, b: LevelTensor) -> bool:
    """Exact invariance test over the Weyl generators."""
    for g in action.group.generators:
        ns = action.source_cochar_action(g)
        nt = action.target_cochar_action(g)
        if matmul(matmul(transpose(ns), b.matrix), nt) != b.matrix:
            return False
    return True


# ---------------------------------------------------------------------------
# invariant lattice and the evenness filter


def invariant_level_lattice(action: SharedWeylAction) -> tuple[LevelTensor, ...]:
    """Basis of the lattice of Weyl-invariant levels, canonical (HNF rows)."""
    iso = action.iso
    rs, rt = iso.source.rank, iso.target.rank
    rows = []
    for g in action.group.generators:
        ns = action.source_cochar_action(g)
        nt = action.target_cochar_action(g)
        # constraint (Ns^T B Nt - B) = 0, vectorized row-major
        for i in range(rs):
            for j in range(rt):
                row = []
                for k in range(rs):
                    for l in range(rt):
                        coef = ns[k][i] * nt[l][j]
                        if k == i and l == j:
                            coef -= 1
                        row.append(coef)
                rows.append(tuple(row))
    if not rows:
        basis_vecs = tuple(identity(rs * rt))
    else:
        basis_vecs = kernel_basis(freeze(rows))
    canon = hnf_basis(freeze(basis_vecs)) if basis_vecs else ()
    out = []
    for vec in canon:
        mat = tuple(tuple(vec[i * rt + j] for j in range(rt)) for i in range(rs))
        out.append(LevelTensor(iso, mat))
    for b in out:
        if not is_invariant(action, b):
            raise AssertionError("invariant-lattice basis element fails invariance")
    return tuple(out)


def root_orbits(rd: RootDatum) -> tuple[tuple[int, ...], ...]:
    """Indices of the roots grouped into Weyl orbits (deterministic order)."""
    n = len(rd.roots)
    index_of = {a: k for k, a in enumerate(rd.roots)}
    seen = set()
    orbits = []
    for start in range(n):
        if start in seen:
            continue
        orbit = {start}
        frontier = [start]
        while frontier:
            nxt = []
            for k in frontier:
                beta = rd.roots[k]
                for i in rd.simple_indices:
                    alpha, acheck = rd.roots[i], rd.coroots[i]
                    img = tuple(
                        x - dot(beta, acheck) * y for x, y in zip(beta, alpha)
                    )
                    m = index_of[img]
                    if m not in orbit:
                        orbit.add(m)
                        nxt.append(m)
            frontier = nxt
        seen |= orbit
        orbits.append(tuple(sorted(orbit)))
    return tuple(orbits)


def coroot_value(b: LevelTensor, root_index: int) -> int:
    """b(acheck, acheck) with the first coroot lifted into X_*(S)."""
    iso = b.iso
    lift = iso.coroot_lift[root_index]
    lam = iso.target.coroot_coords()[root_index]
    return b.value(lift, lam)


@dataclass(frozen=True)
class EvReport:
    """Even-values sublattice plus the per-orbit value table.

    value_table[k][j] is b_j(acheck, acheck) for the k-th root orbit
    representative and the j-th output basis element.
    """

    basis: tuple[LevelTensor, ...]
    orbit_representatives: tuple[int, ...]
    value_table: tuple[tuple[int, ...], ...]


def ev_filter(basis: tuple[LevelTensor, ...], action: SharedWeylAction) -> EvReport:
    """Sublattice where every b(acheck, acheck) is even, over all roots."""
    iso = action.iso
    tgt = iso.target
    k = len(basis)
    orbits = root_orbits(tgt)
    reps = tuple(o[0] for o in orbits)
    if k == 0:
        return EvReport((), reps, tuple(() for _ in reps))
    parity_rows = []
    for ridx in range(len(tgt.roots)):
        parity_rows.append(tuple(coroot_value(b, ridx) & 1 for b in basis))
    ker2 = kernel_basis_mod2(freeze(parity_rows))
    gens = [tuple(v) for v in ker2]
    for i in range(k):
        gens.append(tuple(2 if j == i else 0 for j in range(k)))
    coeff_basis = hnf_basis(freeze(gens))
    out = []
    for coeffs in coeff_basis:
        mat = None
        for c, b in zip(coeffs, basis):
            term = b.scale(c)
            mat = term if mat is None else mat.add(term)
        out.append(mat)
    # recanonicalize in vector form so output is basis-choice independent
    rt = iso.target.rank
    vecs = freeze([sum((list(r) for r in b.matrix), []) for b in out])
    canon = hnf_basis(vecs)
    out = tuple(
        LevelTensor(iso, tuple(tuple(v[i * rt + j] for j in range(rt))
                               for i in range(iso.source.rank)))
        for v in canon
    )
    for b in out:
        for ridx in range(len(tgt.roots)):
            if coroot_value(b, ridx) % 2:
                raise AssertionError("even-values filter let an odd value through")
    table = tuple(
        tuple(coroot_value(b, rep) for b in out) for rep in reps
    )
    return EvReport(out, reps, table)


# ---------------------------------------------------------------------------
# the basic level


@dataclass(frozen=True)
class BasicLevelResult:
    """Whether the basic level lies in the tensor lattice for this datum.

    The basic level is c * sum(t_i^2) with c normalized so that the
    value on a short coroot is 2; minimal_multiple is the least k >= 1
    with k * basic inside the lattice, and tensor is k * basic.
    """

    member: bool
    minimal_multiple: int
    tensor: LevelTensor
    rational_matrix: FracMat


def basic_level(iso: IsogenyDatum) -> BasicLevelResult:
    src, tgt = iso.source, iso.target
    norms = [dot(ac, ac) for ac in tgt.coroots]
    if norms:
        scale = Fraction(2) / min(norms)
    else:
        scale = Fraction(1)
    rat = tuple(
        tuple(scale * dot(mu, lam) for lam in tgt.cochar_basis)
        for mu in src.cochar_basis
    )
    den = 1
    for row in rat:
        for x in row:
            den = den * x.denominator // _gcd(den, x.denominator)
    mat = tuple(tuple(int(x * den) for x in row) for row in rat)
    tensor = LevelTensor(iso, mat)
    return BasicLevelResult(den == 1, den, tensor, rat)


def _gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return a


def named_basic_level(series: str, rank: int, form: str) -> BasicLevelResult:
    from .rootdata import classical_datum, identity_isogeny

    rd = classical_datum(series, rank, form)
    return basic_level(identity_isogeny(rd))


# ---------------------------------------------------------------------------
# rank-one restriction


@dataclass(frozen=True)
class RankOneRestriction:
    """Parity data of b on the rank-one subgroup attached to one root.

    subgroup_type is "SL2" when the coroot cocharacter is injective
    (does not kill -1) and "PGL2" when it does; descent across the
    corresponding divisor is blocked exactly in the odd SL2 case.
    """

    root_index: int
    subgroup_type: str
    value: int
    parity_obstruction: bool


def restrict_to_rank_one(b: LevelTensor, root) -> RankOneRestriction:
    iso = b.iso
    tgt = iso.target
    ridx = root if isinstance(root, int) else tgt.root_index(root)
    if ridx is None or not (0 <= ridx < len(tgt.roots)):
        raise DatumError(f"{root!r} is not a root of {tgt.name}")
    acheck = tgt.coroots[ridx]
    half = tuple(Fraction(x, 2) for x in fracvec(acheck))
    kills_minus_one = tgt.cochar_coords(half) is not None
    subgroup_type = "PGL2" if kills_minus_one else "SL2"
    value = coroot_value(b, ridx)
    return RankOneRestriction(
        root_index=ridx,
        subgroup_type=subgroup_type,
        value=value,
        parity_obstruction=(subgroup_type == "SL2" and value % 2 == 1),
    )


def symmetric_projection(b: LevelTensor) -> FracMat:
    """(b + b^T)/2 on ambient coordinates; labeled convenience, H = G only."""
    if b.iso.source != b.iso.target:
        raise DatumError("symmetric projection needs source == target")
    amb = b.ambient_form()
    n = len(amb)
    return tuple(
        tuple(Fraction(amb[i][j] + amb[j][i], 2) for j in range(n)) for i in range(n)
    )


# ---------------------------------------------------------------------------
# reference comparison


@dataclass(frozen=True)
class AtlasEntry:
    series: str
    rank: int
    source_form: str
    target_form: str
    computed_basis: tuple[Matrix, ...]
    claim: dict | None
    claimed_basis: tuple[Matrix, ...] | None
    claim_note: str | None
    verdict: str  # match | mismatch | no-claim

    def to_json_dict(self) -> dict:
        return {
            "series": self.series,
            "rank": self.rank,
            "source_form": self.source_form,
            "target_form": self.target_form,
            "computed_basis": [[list(r) for r in m] for m in self.computed_basis],
            "claim": self.claim,
            "claimed_basis": None
            if self.claimed_basis is None
            else [[list(r) for r in m] for m in self.claimed_basis],
            "claim_note": self.claim_note,
            "verdict": self.verdict,
        }


def allowable_lattice(action: SharedWeylAction) -> tuple[LevelTensor, ...]:
    """Invariant levels with even values on all coroots (canonical basis)."""
    inv = invariant_level_lattice(action)
    return ev_filter(inv, action).basis


def _vectorize(mats, rs, rt):
    return freeze([sum((list(r) for r in m), []) for m in mats])


def claimed_lattice(iso: IsogenyDatum, claim: dict) -> tuple[tuple[Matrix, ...] | None, str | None]:
    """Expand a reference claim into a concrete lattice basis, if possible."""
    kind = claim["kind"]
    if kind == "basic_multiple":
        mult = claim["multiple"]
        if mult == "n":
            mult = iso.target.ambient_dim
        basic = basic_level(iso)
        rat = tuple(
            tuple(mult * x for x in row) for row in basic.rational_matrix
        )
        if any(x.denominator != 1 for row in rat for x in row):
            return None, (
                f"claimed generator {mult}*basic is not integral on the "
                "cocharacter lattices"
            )
        return (tuple(tuple(int(x) for x in row) for row in rat),), None
    if kind == "gl_family":
        # spanned by sum(t_i^2) and (t_1 + ... + t_n)^2
        src, tgt = iso.source, iso.target
        eye = tuple(
            tuple(int(dot(mu, lam)) for lam in tgt.cochar_basis)
            for mu in src.cochar_basis
        )
        n = iso.source.ambient_dim
        one = fracvec([1] * n)
        ones = tuple(
            tuple(int(dot(mu, one) * dot(one, lam)) for lam in tgt.cochar_basis)
            for mu in src.cochar_basis
        )
        return (eye, ones), None
    raise DatumError(f"unknown claim kind {kind!r}")


def compare_with_reference(action: SharedWeylAction, claim: dict | None) -> AtlasEntry:
    iso = action.iso
    rs, rt = iso.source.rank, iso.target.rank
    computed = tuple(b.matrix for b in allowable_lattice(action))
    series, rank, sf, tf = claim_key_of(iso)
    if claim is None:
        return AtlasEntry(series, rank, sf, tf, computed, None, None, None, "no-claim")
    claimed, note = claimed_lattice(iso, claim)
    if claimed is None:
        return AtlasEntry(
            series, rank, sf, tf, computed, claim, None, note, "mismatch"
        )
    same = lattices_equal(_vectorize(computed, rs, rt), _vectorize(claimed, rs, rt))
    canon_claim = tuple(
        tuple(tuple(v[i * rt + j] for j in range(rt)) for i in range(rs))
        for v in hnf_basis(_vectorize(claimed, rs, rt))
    )
    return AtlasEntry(
        series, rank, sf, tf, computed, claim, canon_claim, None,
        "match" if same else "mismatch",
    )


def claim_key_of(iso: IsogenyDatum) -> tuple[str, int, str, str]:
    """(series, rank, source_form, target_form) recovered from datum names.

    Data that do not follow the classical naming scheme are reported
    under the series label "custom" with their full names as forms.
    """
    import re

    def split(name):
        m = re.fullmatch(r"(SL|GL|PGL|Spin|SO|PSO|Sp|PSp)(\d+)", name)
        if not m:
            return None, 0
        return m.group(1), int(m.group(2))

    sf, _ = split(iso.source.name)
    tf, nt = split(iso.target.name)
    if sf is None or tf is None:
        return "custom", iso.target.rank, iso.source.name, iso.target.name
    if tf in ("SL", "GL", "PGL"):
        return "A", nt - 1, sf, tf
    if tf in ("Spin", "SO") and nt % 2 == 1:
        return "B", (nt - 1) // 2, sf, tf
    if tf in ("Sp", "PSp"):
        return "C", nt // 2, sf, tf
    return "D", nt // 2, sf, tf
