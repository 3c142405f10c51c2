"""Centralizer extension obstructions for semisimple points.

A semisimple point is a rational cocharacter vector xi (a chosen
logarithm of a torus element).  The subgroup of the Weyl group fixing
the point is the integrality stabilizer W_L = {w : w.xi - xi integral};
for w in W_L the differences d_w = w.xi - xi form a 1-cocycle valued in
X_*(T), and a Weyl-invariant level b pushes it to the group cocycle
c_w = bmap(d_w) valued in X*(S).  Everything downstream is exact
integer cohomology: triviality witnesses, the order of the class, and
the full degree-1 group cohomology of the stabilizer on X*(S).

The reference-coordinate picture writes the multiplicative cocycle
h -> prod_i chi_i(h)^(d zeta_i(d_w)) additively as the X*(S) vector
bmap(d_w); the dictionary is exp(2 pi i <.,.>), applied once here and
nowhere else.

Triviality is decided on a generating set and then re-verified over the
whole subgroup: the generator system is what keeps solves small, the
full sweep is what makes the certificate self-contained.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from .intlinalg import (
    AbelianInvariants,
    Matrix,
    RatVector,
    Vector,
    cokernel,
    diagonal,
    freeze,
    identity,
    kernel_basis,
    lattice_coords,
    matvec,
    snf,
    solve_z,
    transpose,
    vec_add,
    vec_sub,
)
from .levels import LevelTensor, SharedWeylAction, is_invariant
from .weyl import Subgroup, act_cochar, integral_reflection_subgroup, stabilizer


class ObstructionError(ValueError):
    pass


class VerificationCapExceeded(RuntimeError):
    def __init__(self, size: int, cap: int):
        super().__init__(
            f"subgroup of order {size} exceeds the exhaustive verification cap {cap}"
        )


@dataclass(frozen=True)
class SemisimplePoint:
    """xi in X_*(T) (x) Q, coordinates against the cocharacter basis."""

    xi: RatVector

    @property
    def denominator(self) -> int:
        return self.xi.den


@dataclass
class ObstructionResult:
    action: SharedWeylAction
    level: LevelTensor
    point: SemisimplePoint
    w_l: Subgroup
    d_cocycle: dict[int, Vector]
    c_cocycle: dict[int, Vector]
    rational_witness: RatVector
    trivial: bool | None = None
    witness_u: Vector | None = None
    class_order: int | None = None
    h1_invariants: AbelianInvariants | None = None
    h1_class_coords: tuple[int, ...] | None = None
    reflection_agrees: bool | None = None
    reflection_sub: Subgroup | None = None

    def source_action(self, idx: int) -> Matrix:
        return self.action.source_char_action(idx)

    def to_json_dict(self) -> dict:
        return {
            "isogeny": self.action.iso.name,
            "level": [list(r) for r in self.level.matrix],
            "xi": {"num": list(self.point.xi.nums), "den": self.point.xi.den},
            "stabilizer_order": len(self.w_l),
            "stabilizer_members": list(self.w_l.members),
            "d_cocycle": {str(k): list(v) for k, v in sorted(self.d_cocycle.items())},
            "c_cocycle": {str(k): list(v) for k, v in sorted(self.c_cocycle.items())},
            "rational_witness": {
                "num": list(self.rational_witness.nums),
                "den": self.rational_witness.den,
            },
            "trivial": self.trivial,
            "witness_u": None if self.witness_u is None else list(self.witness_u),
            "class_order": self.class_order,
            "h1_invariants": None
            if self.h1_invariants is None
            else {
                "free_rank": self.h1_invariants.free_rank,
                "torsion": list(self.h1_invariants.torsion),
            },
            "h1_class_coords": None
            if self.h1_class_coords is None
            else list(self.h1_class_coords),
            "reflection_subgroup_agrees": self.reflection_agrees,
        }


def centralizer_cocycle(
    action: SharedWeylAction,
    b: LevelTensor,
    pt: SemisimplePoint,
    verify_cap: int = 384,
) -> ObstructionResult:
    """Stabilizer subgroup with its d and c cocycles, fully verified.

    Rejects levels that are not Weyl invariant: invariance is exactly
    what makes w -> bmap(d_w) a cocycle.
    """
    if b.iso != action.iso:
        raise ObstructionError("level and action live over different isogeny data")
    if not is_invariant(action, b):
        raise ObstructionError("level tensor is not Weyl invariant")
    if len(pt.xi) != action.iso.target.rank:
        raise ObstructionError("xi has the wrong rank")
    group = action.group
    w_l = stabilizer(group, pt.xi)
    if len(w_l) > verify_cap:
        raise VerificationCapExceeded(len(w_l), verify_cap)
    d_cocycle: dict[int, Vector] = {}
    c_cocycle: dict[int, Vector] = {}
    for i in w_l.members:
        diff = act_cochar(group.elements[i], pt.xi) - pt.xi
        if not diff.is_integral:
            raise AssertionError("stabilizer member with non-integral difference")
        d = diff.int_vector()
        d_cocycle[i] = d
        c_cocycle[i] = b.bmap(d)
    # cocycle identity c_{w1 w2} = w1 . c_{w2} + c_{w1}, all pairs
    for i in w_l.members:
        mi = action.source_char_action(i)
        for j in w_l.members:
            k = group.mult(i, j)
            expect = vec_add(matvec(mi, c_cocycle[j]), c_cocycle[i])
            if c_cocycle[k] != expect:
                raise AssertionError("cocycle identity failed")
    rational_witness = RatVector.make(
        list(matvec(b.matrix, pt.xi.nums)), pt.xi.den
    )
    cmp = integral_reflection_subgroup(group, pt.xi)
    return ObstructionResult(
        action=action,
        level=b,
        point=pt,
        w_l=w_l,
        d_cocycle=d_cocycle,
        c_cocycle=c_cocycle,
        rational_witness=rational_witness,
        reflection_agrees=cmp.equal,
        reflection_sub=cmp.reflection_subgroup,
    )


def _coboundary_system(res: ObstructionResult, members) -> tuple[Matrix, Vector]:
    """Stacked system (w - 1) u = c_w over the given elements."""
    r = res.action.iso.source.rank
    rows = []
    rhs = []
    eye = identity(r)
    for i in members:
        m = res.source_action(i)
        for a in range(r):
            rows.append(tuple(m[a][c] - eye[a][c] for c in range(r)))
        rhs.extend(res.c_cocycle[i])
    return freeze(rows), tuple(rhs)


def is_trivial_class(res: ObstructionResult) -> Vector | None:
    """Integral witness u with c_w = w.u - u for every w, or None.

    Solves over the subgroup generators, then re-verifies over all of
    W_L; fills in res.trivial and res.witness_u.
    """
    gens = res.w_l.generators or (res.w_l.group.identity_index,)
    a, y = _coboundary_system(res, gens)
    sol = solve_z(a, y)
    u = sol.solution
    if u is not None and not _verify_witness(res, u, 1):
        raise AssertionError("generator witness failed on the full subgroup")
    res.trivial = u is not None
    res.witness_u = u
    return u


def _verify_witness(res: ObstructionResult, u: Vector, k: int) -> bool:
    for i in res.w_l.members:
        m = res.source_action(i)
        if vec_sub(matvec(m, u), u) != tuple(k * x for x in res.c_cocycle[i]):
            return False
    return True


def class_order(res: ObstructionResult) -> int:
    """Smallest k >= 1 with k*c a coboundary; divides exponent(W_L)."""
    gens = res.w_l.generators or (res.w_l.group.identity_index,)
    a, y = _coboundary_system(res, gens)
    sol = solve_z(a, y)
    k = sol.min_multiplier
    if k is None:
        raise AssertionError("cocycle class has infinite order against generators")
    scaled = solve_z(a, tuple(k * x for x in y))
    u = scaled.solution
    if u is None or not _verify_witness(res, u, k):
        raise AssertionError("scaled witness failed full verification")
    exp = res.w_l.exponent()
    if exp % k:
        raise AssertionError(
            f"class order {k} does not divide the subgroup exponent {exp}"
        )
    res.class_order = k
    if res.trivial is None:
        res.trivial = k == 1
        if k == 1:
            res.witness_u = u
    return k


# ---------------------------------------------------------------------------
# full H^1 of the stabilizer on X*(S)


@dataclass(frozen=True)
class H1Result:
    invariants: AbelianInvariants
    class_coords: tuple[int, ...] | None
    class_order_in_h1: int | None


def h1_group_lattice(
    sub: Subgroup,
    lattice_action,
    cocycle: dict[int, Vector] | None = None,
    cap: int = 384,
) -> H1Result:
    """H^1 of a finite subgroup acting on a lattice, by the bar complex.

    lattice_action maps an element index to its integer action matrix.
    Z^1 = ker(delta^1) with (delta^1 c)_{w1,w2} = w1.c_{w2} - c_{w1 w2}
    + c_{w1}; B^1 = im(delta^0) with (delta^0 u)_w = w.u - u.  When a
    cocycle is supplied, its coordinates in the quotient presentation
    and its exact order there are reported.
    """
    if len(sub) > cap:
        raise VerificationCapExceeded(len(sub), cap)
    members = sub.members
    group = sub.group
    r = len(lattice_action(group.identity_index))
    pos = {w: k for k, w in enumerate(members)}
    n1 = len(members) * r

    # delta^1 : C^1 -> C^2, one block row per ordered pair
    rows = []
    for w1 in members:
        m1 = lattice_action(w1)
        for w2 in members:
            w12 = group.mult(w1, w2)
            for a in range(r):
                row = [0] * n1
                for c in range(r):
                    row[pos[w2] * r + c] += m1[a][c]
                row[pos[w12] * r + a] -= 1
                row[pos[w1] * r + a] += 1
                rows.append(tuple(row))
    z_basis = kernel_basis(freeze(rows))  # columns of C^1

    # delta^0 : C^0 -> C^1
    b_gens = []
    for u_idx in range(r):
        col = []
        for w in members:
            m = lattice_action(w)
            for a in range(r):
                col.append(m[a][u_idx] - (1 if a == u_idx else 0))
        b_gens.append(tuple(col))

    if not z_basis:
        if any(any(v) for v in b_gens):
            raise AssertionError("coboundaries outside the cocycle lattice")
        inv = AbelianInvariants(0, ())
        return H1Result(inv, () if cocycle is not None else None,
                        1 if cocycle is not None else None)

    z_rows = freeze(z_basis)
    coord_rows = []
    for g in b_gens:
        c = lattice_coords(z_rows, g)
        if c is None:
            raise AssertionError("coboundary not inside the cocycle lattice")
        coord_rows.append(c)
    rel = transpose(freeze(coord_rows))
    inv = cokernel(rel)

    class_coords = None
    order_in_h1 = None
    if cocycle is not None:
        cvec = []
        for w in members:
            cvec.extend(cocycle[w])
        coords = lattice_coords(z_rows, tuple(cvec))
        if coords is None:
            raise AssertionError("supplied cochain is not a cocycle")
        s, u, _v = snf(rel)
        diag = diagonal(s)
        rank = sum(1 for d in diag if d)
        z = matvec(u, coords)
        # order of the class in coker(rel)
        k = 1
        for i in range(rank):
            need = diag[i] // gcd(diag[i], z[i])
            k = k * need // gcd(k, need)
        if any(z[i] for i in range(rank, len(z))):
            order_in_h1 = None  # infinite order (free part)
        else:
            order_in_h1 = k
        class_coords = tuple(z)
    return H1Result(inv, class_coords, order_in_h1)


# ---------------------------------------------------------------------------
# the full report and point scans


def obstruction_report(
    action: SharedWeylAction,
    b: LevelTensor,
    pt: SemisimplePoint,
    with_h1: bool = True,
    verify_cap: int = 384,
) -> ObstructionResult:
    res = centralizer_cocycle(action, b, pt, verify_cap=verify_cap)
    is_trivial_class(res)
    class_order(res)
    if with_h1:
        h1 = h1_group_lattice(
            res.w_l, action.source_char_action, res.c_cocycle, cap=verify_cap
        )
        res.h1_invariants = h1.invariants
        res.h1_class_coords = h1.class_coords
        if h1.class_order_in_h1 is not None and h1.class_order_in_h1 != res.class_order:
            raise AssertionError(
                "H^1 class order disagrees with the coboundary solve"
            )
    return res


class ScanTooLarge(RuntimeError):
    def __init__(self, estimate: int, cap: int):
        super().__init__(
            f"scan would enumerate about {estimate} points, over the cap {cap}"
        )
        self.estimate = estimate


@dataclass(frozen=True)
class ScanRow:
    xi: RatVector
    stabilizer_order: int
    class_order: int
    trivial: bool


@dataclass(frozen=True)
class ScanTable:
    rows: tuple[ScanRow, ...]

    @property
    def trivial_count(self) -> int:
        return sum(1 for r in self.rows if r.trivial)

    @property
    def nontrivial_count(self) -> int:
        return sum(1 for r in self.rows if not r.trivial)


def scan_points(
    action: SharedWeylAction,
    b: LevelTensor,
    max_denominator: int,
    point_cap: int = 20000,
    verify_cap: int = 384,
) -> ScanTable:
    """Exhaustive scan of torsion points with denominator <= max_denominator.

    Points are coordinate vectors in (1/d) Z^r modulo Z^r for d up to the
    bound; one lexicographically minimal representative per Weyl orbit is
    evaluated, in deterministic order.
    """
    r = action.iso.target.rank
    estimate = sum(d**r for d in range(1, max_denominator + 1))
    if estimate > point_cap:
        raise ScanTooLarge(estimate, point_cap)
    points = set()
    for d in range(1, max_denominator + 1):
        stack = [()]
        for _ in range(r):
            stack = [t + (k,) for t in stack for k in range(d)]
        for nums in stack:
            points.add(RatVector.make(list(nums), d))
    group = action.group
    reps = []
    for xi in sorted(points, key=lambda v: v.fractions()):
        orbit_min = min(
            (act_cochar(e, xi).mod1() for e in group.elements),
            key=lambda v: v.fractions(),
        )
        if xi == orbit_min:
            reps.append(xi)
    reps.sort(key=lambda v: v.fractions())
    rows = []
    for xi in reps:
        res = centralizer_cocycle(action, b, SemisimplePoint(xi), verify_cap)
        is_trivial_class(res)
        k = class_order(res)
        rows.append(ScanRow(xi, len(res.w_l), k, bool(res.trivial)))
    return ScanTable(tuple(rows))
