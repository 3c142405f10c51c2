"""Finite cocycle models: Cech complexes on nerves, group and equivariant
cohomology, circle-cover log cocycles, and central extensions.

Coefficients are finitely generated abelian groups presented as
Z^free + Z/d1 + Z/d2 + ...; every computation happens on the free cover
Z^(free + torsion count) with explicit relation vectors, so all answers
are exact.  Cochain values are stored on sorted simplices only, with the
alternation sign applied on access.

Overlap line bundles are modeled by their classes in the coefficient
group (powers of one fixed bundle); section-level data is collapsed to
the cocycle identities it satisfies.  Infinite multiplicative coefficient
groups are modeled by finite cyclic truncations Z/N with configurable N;
classification statements are exercised on torsion content only, as a
model choice, not an equivalence claim.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import gcd

from .intlinalg import (
    AbelianInvariants,
    Matrix,
    Vector,
    diagonal,
    freeze,
    hnf_basis,
    identity,
    kernel_basis,
    lattice_coords,
    matmul,
    matvec,
    snf,
    solve_z,
    transpose,
)


class CechError(ValueError):
    pass


class ComplexCapExceeded(RuntimeError):
    def __init__(self, size: int, cap: int):
        super().__init__(f"complex needs {size} coordinates, over the cap {cap}")


# ---------------------------------------------------------------------------
# coefficient groups


@dataclass(frozen=True)
class CoefficientGroup:
    """Z^free_rank + Z/torsion[0] + ... with elements as int tuples."""

    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0 or any(d < 2 for d in self.torsion):
            raise CechError("invalid coefficient group")

    @property
    def size(self) -> int:
        return self.free_rank + len(self.torsion)

    def zero(self) -> Vector:
        return (0,) * self.size

    def reduce(self, v) -> Vector:
        if len(v) != self.size:
            raise CechError("element has wrong length")
        out = list(int(x) for x in v)
        for i, d in enumerate(self.torsion):
            out[self.free_rank + i] %= d
        return tuple(out)

    def add(self, a, b) -> Vector:
        return self.reduce(tuple(x + y for x, y in zip(a, b)))

    def neg(self, a) -> Vector:
        return self.reduce(tuple(-x for x in a))

    def scale(self, k: int, a) -> Vector:
        return self.reduce(tuple(k * x for x in a))

    def relation_vectors(self) -> tuple[Vector, ...]:
        out = []
        for i, d in enumerate(self.torsion):
            v = [0] * self.size
            v[self.free_rank + i] = d
            out.append(tuple(v))
        return tuple(out)

    def elements(self):
        """All elements; only valid for finite groups."""
        if self.free_rank:
            raise CechError("infinite coefficient group")
        ranges = [range(d) for d in self.torsion]
        for tup in itertools.product(*ranges):
            yield tuple(tup)

    def order(self) -> int:
        if self.free_rank:
            raise CechError("infinite coefficient group")
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def is_automorphism(self, m: Matrix) -> bool:
        """Integer matrix inducing an automorphism of the group."""
        if len(m) != self.size:
            return False
        rels = self.relation_vectors()
        for rel in rels:
            img = matvec(m, rel)
            if not self._in_relation_lattice(img):
                return False
        # surjectivity: every standard generator is hit modulo relations
        cols = list(transpose(m))
        cols.extend(rels)
        a = transpose(freeze(cols)) if cols else freeze([(0,) * self.size])
        for i in range(self.size):
            e = tuple(1 if j == i else 0 for j in range(self.size))
            if solve_z(a, e).solution is None:
                return False
        return True

    def _in_relation_lattice(self, v) -> bool:
        rels = self.relation_vectors()
        if not rels:
            return not any(v)
        if any(v[: self.free_rank]):
            return False
        return all(
            v[self.free_rank + i] % d == 0 for i, d in enumerate(self.torsion)
        )

    def label(self) -> str:
        return _plain_label(self)


def _plain_label(g: CoefficientGroup) -> str:
    parts = []
    if g.free_rank == 1:
        parts.append("Z")
    elif g.free_rank > 1:
        parts.append(f"Z^{g.free_rank}")
    parts.extend(f"Z/{d}" for d in g.torsion)
    return " + ".join(parts) if parts else "0"


def parse_group_label(text: str) -> CoefficientGroup:
    """Parse labels like "Z", "Z/4", "Z^2+Z/2+Z/6", "0"."""
    text = text.replace(" ", "")
    if text in ("0", ""):
        return CoefficientGroup(0, ())
    free = 0
    torsion = []
    for part in text.split("+"):
        if part == "Z":
            free += 1
        elif part.startswith("Z^"):
            free += int(part[2:])
        elif part.startswith("Z/"):
            torsion.append(int(part[2:]))
        else:
            raise CechError(f"cannot parse group label {text!r}")
    return CoefficientGroup(free, tuple(torsion))


ZZ = CoefficientGroup(1, ())


# ---------------------------------------------------------------------------
# nerves


@dataclass(frozen=True)
class Nerve:
    """Downward-closed simplex sets over vertices 0..n_vertices-1."""

    n_vertices: int
    simplices: tuple[tuple[tuple[int, ...], ...], ...]  # by dimension

    def __post_init__(self):
        seen = [set(s) for s in self.simplices]
        for p, level in enumerate(self.simplices):
            for s in level:
                if list(s) != sorted(set(s)):
                    raise CechError(f"simplex {s} not sorted/distinct")
                if len(s) != p + 1:
                    raise CechError(f"simplex {s} at wrong dimension {p}")
                if any(v < 0 or v >= self.n_vertices for v in s):
                    raise CechError(f"simplex {s} has an invalid vertex")
                if p:
                    for i in range(p + 1):
                        if s[:i] + s[i + 1:] not in seen[p - 1]:
                            raise CechError(f"face of {s} missing (not a complex)")

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def level(self, p: int) -> tuple[tuple[int, ...], ...]:
        if p < 0 or p > self.dim:
            return ()
        return self.simplices[p]

    def index(self, p: int) -> dict[tuple[int, ...], int]:
        return {s: i for i, s in enumerate(self.level(p))}

    def to_json_dict(self) -> dict:
        return {
            "n_vertices": self.n_vertices,
            "simplices": [[list(s) for s in level] for level in self.simplices],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "Nerve":
        return cls(
            int(d["n_vertices"]),
            tuple(
                tuple(tuple(int(v) for v in s) for s in level)
                for level in d["simplices"]
            ),
        )

    @classmethod
    def from_maximal(cls, n_vertices: int, maximal) -> "Nerve":
        by_dim: dict[int, set] = {}
        for s in maximal:
            s = tuple(sorted(set(s)))
            for k in range(1, len(s) + 1):
                for face in itertools.combinations(s, k):
                    by_dim.setdefault(k - 1, set()).add(face)
        top = max(by_dim) if by_dim else -1
        return cls(
            n_vertices,
            tuple(tuple(sorted(by_dim.get(p, ()))) for p in range(top + 1)),
        )


def nerve_of_cover(cover, dim_cap: int = 4) -> Nerve:
    """Nerve of a cover by finite sets, up to the dimension cap."""
    sets = [frozenset(c) for c in cover]
    if not sets:
        raise CechError("empty cover")
    n = len(sets)
    levels = []
    current = [((i,), sets[i]) for i in range(n) if sets[i]]
    if not current:
        raise CechError("cover has no nonempty set")
    levels.append(tuple(s for s, _ in current))
    p = 0
    while p < dim_cap and current:
        nxt = []
        for simplex, inter in current:
            for v in range(simplex[-1] + 1, n):
                meet = inter & sets[v]
                if meet:
                    nxt.append((simplex + (v,), meet))
        if not nxt:
            break
        levels.append(tuple(s for s, _ in nxt))
        current = nxt
        p += 1
    return Nerve(n, tuple(levels))


def simplex_cone_nerve(n_vertices: int) -> Nerve:
    """Full simplex on the vertices: contractible reference complex."""
    return Nerve.from_maximal(n_vertices, [tuple(range(n_vertices))])


def circle_nerve(arcs: int = 3) -> Nerve:
    if arcs < 3:
        raise CechError("a circle cover needs at least 3 arcs")
    edges = [(i, i + 1) for i in range(arcs - 1)] + [(0, arcs - 1)]
    return Nerve.from_maximal(arcs, edges)


def octahedron_nerve() -> Nerve:
    """Nerve of the 6-cap cover of a sphere: the octahedron boundary."""
    opposite = {0: 5, 1: 3, 2: 4, 3: 1, 4: 2, 5: 0}
    faces = []
    for f in itertools.combinations(range(6), 3):
        if all(opposite[a] not in f for a in f):
            faces.append(f)
    return Nerve.from_maximal(6, faces)


# ---------------------------------------------------------------------------
# cochains


def _sort_sign(seq) -> tuple[tuple[int, ...], int]:
    """Sorted tuple and the parity of the sorting permutation."""
    idx = sorted(range(len(seq)), key=lambda i: seq[i])
    out = tuple(seq[i] for i in idx)
    sign = 1
    perm = list(idx)
    for i in range(len(perm)):
        while perm[i] != i:
            j = perm[i]
            perm[i], perm[j] = perm[j], perm[i]
            sign = -sign
    return out, sign


@dataclass
class Cochain:
    """Degree-p cochain: values on sorted p-simplices, alternating."""

    nerve: Nerve
    degree: int
    group: CoefficientGroup
    values: dict = field(default_factory=dict)

    def __post_init__(self):
        level = set(self.nerve.level(self.degree))
        clean = {}
        for s, v in self.values.items():
            s = tuple(s)
            if s not in level:
                raise CechError(f"value on non-simplex {s}")
            vv = self.group.reduce(v)
            if any(vv):
                clean[s] = vv
        self.values = clean

    def value(self, simplex) -> Vector:
        simplex = tuple(simplex)
        if len(set(simplex)) != len(simplex):
            return self.group.zero()
        s, sign = _sort_sign(simplex)
        v = self.values.get(s, self.group.zero())
        return v if sign == 1 else self.group.neg(v)

    def is_zero(self) -> bool:
        return not self.values

    def add(self, other: "Cochain") -> "Cochain":
        if (self.nerve, self.degree, self.group) != (
            other.nerve, other.degree, other.group,
        ):
            raise CechError("cochain mismatch")
        vals = dict(self.values)
        for s, v in other.values.items():
            vals[s] = self.group.add(vals.get(s, self.group.zero()), v)
        return Cochain(self.nerve, self.degree, self.group, vals)

    def neg(self) -> "Cochain":
        return Cochain(
            self.nerve, self.degree, self.group,
            {s: self.group.neg(v) for s, v in self.values.items()},
        )

    def map_values(self, fn, group: CoefficientGroup) -> "Cochain":
        return Cochain(
            self.nerve, self.degree, group,
            {s: group.reduce(fn(v)) for s, v in self.values.items()},
        )

    def to_json_dict(self) -> dict:
        return {
            "degree": self.degree,
            "group": _plain_label(self.group),
            "values": [
                {"simplex": list(s), "value": list(v)}
                for s, v in sorted(self.values.items())
            ],
        }


def coboundary(c: Cochain) -> Cochain:
    """(dc)(v_0..v_{p+1}) = sum_i (-1)^i c(drop v_i)."""
    p = c.degree
    out: dict = {}
    g = c.group
    for s in c.nerve.level(p + 1):
        acc = g.zero()
        for i in range(p + 2):
            face = s[:i] + s[i + 1:]
            term = c.value(face)
            acc = g.add(acc, term if i % 2 == 0 else g.neg(term))
        if any(acc):
            out[s] = acc
    return Cochain(c.nerve, p + 1, g, out)


def zero_cochain(nerve: Nerve, degree: int, group: CoefficientGroup) -> Cochain:
    return Cochain(nerve, degree, group, {})


# ---------------------------------------------------------------------------
# plain Cech cohomology with presented coefficients


def _cech_matrix(nerve: Nerve, p: int, size: int) -> Matrix:
    """Free-cover matrix of delta^p : C^p -> C^(p+1)."""
    src = nerve.level(p)
    dst = nerve.level(p + 1)
    src_idx = {s: i for i, s in enumerate(src)}
    rows = []
    for s in dst:
        blocks = [0] * (len(src) * size)
        for i in range(p + 2):
            face = s[:i] + s[i + 1:]
            j = src_idx[face]
            coef = 1 if i % 2 == 0 else -1
            for ccoord in range(size):
                blocks[j * size + ccoord] += coef
        # expand into size rows (coefficientwise identity blocks)
        for ccoord in range(size):
            row = [0] * (len(src) * size)
            for j in range(len(src)):
                row[j * size + ccoord] = blocks[j * size + ccoord]
            rows.append(tuple(row))
    return freeze(rows) if rows else ()


def _level_relations(count: int, group: CoefficientGroup) -> tuple[Vector, ...]:
    out = []
    size = group.size
    for slot in range(count):
        for rel in group.relation_vectors():
            v = [0] * (count * size)
            for i, x in enumerate(rel):
                v[slot * size + i] = x
            out.append(tuple(v))
    return tuple(out)


def _subquotient(
    n_coords: int,
    d_out: Matrix,
    rel_out: tuple[Vector, ...],
    d_in_cols: tuple[Vector, ...],
    rel_in: tuple[Vector, ...],
    locate: Vector | None = None,
):
    """Invariants of {x : d_out x in <rel_out>} / (<d_in cols> + <rel_in>).

    With locate set, also returns the class coordinates of that vector in
    the Smith presentation and its order (None when of infinite order).
    """
    if n_coords == 0:
        inv = AbelianInvariants(0, ())
        return (inv, (), 1) if locate is not None else (inv, None, None)
    if d_out:
        cols = [tuple(r) for r in transpose(d_out)]
        combined_cols = cols + [tuple(-x for x in v) for v in rel_out]
        combined = transpose(freeze(combined_cols))
        kern = kernel_basis(combined)
        xparts = freeze([v[:n_coords] for v in kern])
        lbasis = hnf_basis(xparts)
    else:
        lbasis = identity(n_coords)
    sub_rows = tuple(d_in_cols) + tuple(rel_in)
    coords_rows = []
    for v in sub_rows:
        c = lattice_coords(lbasis, v)
        if c is None:
            raise AssertionError("boundary image escaped the cocycle lattice")
        coords_rows.append(c)
    r = len(lbasis)
    if coords_rows:
        rel = transpose(freeze(coords_rows))
        s, u, _v = snf(rel)
        diag = diagonal(s)
        rank = sum(1 for d in diag if d)
        inv = AbelianInvariants(
            free_rank=r - rank, torsion=tuple(d for d in diag if d not in (0, 1))
        )
    else:
        u = identity(r)
        diag = ()
        rank = 0
        inv = AbelianInvariants(free_rank=r, torsion=())
    if locate is None:
        return inv, None, None
    c = lattice_coords(lbasis, locate)
    if c is None:
        raise CechError("vector to locate is not a cocycle")
    z = matvec(u, c) if r else ()
    k = 1
    infinite = False
    for i in range(len(z)):
        if i < rank:
            if diag[i]:
                need = diag[i] // gcd(diag[i], z[i])
                k = k * need // gcd(k, need)
        elif z[i]:
            infinite = True
    return inv, tuple(z), (None if infinite else k)


def _cochain_vector(c: Cochain) -> Vector:
    size = c.group.size
    level = c.nerve.level(c.degree)
    out = []
    for s in level:
        v = c.values.get(s, c.group.zero())
        out.extend(v)
    return tuple(out)


def _vector_cochain(nerve: Nerve, degree: int, group: CoefficientGroup,
                    vec) -> Cochain:
    size = group.size
    level = nerve.level(degree)
    vals = {}
    for i, s in enumerate(level):
        vals[s] = tuple(vec[i * size: (i + 1) * size])
    return Cochain(nerve, degree, group, vals)


def cohomology(nerve: Nerve, p: int, group: CoefficientGroup) -> AbelianInvariants:
    """H^p of the nerve with the given coefficients, via Smith reduction."""
    if p < 0:
        raise CechError("negative degree")
    if p > nerve.dim:
        return AbelianInvariants(0, ())
    size = group.size
    n_p = len(nerve.level(p)) * size
    d_out = _cech_matrix(nerve, p, size)
    rel_out = _level_relations(len(nerve.level(p + 1)), group)
    if p == 0:
        d_in_cols: tuple[Vector, ...] = ()
    else:
        d_in = _cech_matrix(nerve, p - 1, size)
        d_in_cols = tuple(tuple(r) for r in transpose(d_in)) if d_in else ()
    rel_in = _level_relations(len(nerve.level(p)), group)
    inv, _, _ = _subquotient(n_p, d_out, rel_out, d_in_cols, rel_in)
    return inv


def cocycle_class(c: Cochain):
    """(H^p invariants, class coordinates, class order) of a cocycle."""
    check = coboundary(c)
    if not check.is_zero():
        raise CechError("input cochain is not a cocycle")
    nerve, p, group = c.nerve, c.degree, c.group
    size = group.size
    n_p = len(nerve.level(p)) * size
    d_out = _cech_matrix(nerve, p, size)
    rel_out = _level_relations(len(nerve.level(p + 1)), group)
    if p == 0:
        d_in_cols: tuple[Vector, ...] = ()
    else:
        d_in = _cech_matrix(nerve, p - 1, size)
        d_in_cols = tuple(tuple(r) for r in transpose(d_in)) if d_in else ()
    rel_in = _level_relations(len(nerve.level(p)), group)
    return _subquotient(
        n_p, d_out, rel_out, d_in_cols, rel_in, locate=_cochain_vector(c)
    )


def trivialize(c: Cochain) -> Cochain | None:
    """A cochain b with db = c, or None when the class is nonzero."""
    check = coboundary(c)
    if not check.is_zero():
        raise CechError("input cochain is not a cocycle")
    nerve, p, group = c.nerve, c.degree, c.group
    size = group.size
    target = _cochain_vector(c)
    if p == 0:
        return zero_cochain(nerve, 0, group) if not any(target) else None
    d_in = _cech_matrix(nerve, p - 1, size)
    rel_in = _level_relations(len(nerve.level(p)), group)
    n_prev = len(nerve.level(p - 1)) * size
    cols = [tuple(r) for r in transpose(d_in)] if d_in else []
    cols.extend(rel_in)
    if not cols:
        return None if any(target) else zero_cochain(nerve, p - 1, group)
    a = transpose(freeze(cols))
    res = solve_z(a, target)
    if res.solution is None:
        return None
    x = res.solution[:n_prev]
    return _vector_cochain(nerve, p - 1, group, x)


# ---------------------------------------------------------------------------
# finite groups and actions


@dataclass(frozen=True)
class FiniteGroupTable:
    """Multiplication table on elements 0..n-1; table[i][j] = i*j."""

    table: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.table)
        for row in self.table:
            if len(row) != n or any(x < 0 or x >= n for x in row):
                raise CechError("malformed multiplication table")
        if self.identity is None:
            raise CechError("table has no identity element")
        for i in range(n):
            if self.inverse(i) is None:
                raise CechError(f"element {i} has no inverse")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if (
                        self.table[self.table[a][b]][c]
                        != self.table[a][self.table[b][c]]
                    ):
                        raise CechError("table is not associative")

    @property
    def n(self) -> int:
        return len(self.table)

    @property
    def identity(self) -> int | None:
        n = len(self.table)
        for e in range(n):
            if all(self.table[e][x] == x and self.table[x][e] == x for x in range(n)):
                return e
        return None

    def mult(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inverse(self, a: int) -> int | None:
        e = self.identity
        for b in range(self.n):
            if self.table[a][b] == e and self.table[b][a] == e:
                return b
        return None

    def element_order(self, a: int) -> int:
        e = self.identity
        k, x = 1, a
        while x != e:
            x = self.table[x][a]
            k += 1
        return k

    def order_multiset(self) -> tuple[int, ...]:
        return tuple(sorted(self.element_order(a) for a in range(self.n)))

    def center_size(self) -> int:
        return sum(
            1
            for a in range(self.n)
            if all(self.table[a][b] == self.table[b][a] for b in range(self.n))
        )

    def tuples(self, q: int):
        return itertools.product(range(self.n), repeat=q)

    def to_json_dict(self) -> dict:
        return {"table": [list(r) for r in self.table]}

    @classmethod
    def from_json_dict(cls, d: dict) -> "FiniteGroupTable":
        return cls(tuple(tuple(int(x) for x in row) for row in d["table"]))


def cyclic_group(n: int) -> FiniteGroupTable:
    return FiniteGroupTable(
        tuple(tuple((i + j) % n for j in range(n)) for i in range(n))
    )


@dataclass(frozen=True)
class FiniteAction:
    """A finite group acting on a nerve and on the coefficient group.

    vertex_perms[g][v] is the image of vertex v under g; coeff_actions[g]
    is an integer matrix inducing an automorphism of the coefficients.
    """

    group: FiniteGroupTable
    nerve: Nerve
    coefficients: CoefficientGroup
    vertex_perms: tuple[tuple[int, ...], ...]
    coeff_actions: tuple[Matrix, ...]

    def __post_init__(self):
        g = self.group
        if len(self.vertex_perms) != g.n or len(self.coeff_actions) != g.n:
            raise CechError("action tables have wrong length")
        nv = self.nerve.n_vertices
        for perm in self.vertex_perms:
            if sorted(perm) != list(range(nv)):
                raise CechError("vertex map is not a permutation")
        for m in self.coeff_actions:
            if not self.coefficients.is_automorphism(m):
                raise CechError("coefficient action is not an automorphism")
        e = g.identity
        if self.vertex_perms[e] != tuple(range(nv)):
            raise CechError("identity must act trivially on vertices")
        if self.coeff_actions[e] != identity(self.coefficients.size):
            raise CechError("identity must act trivially on coefficients")
        for a in range(g.n):
            for b in range(g.n):
                ab = g.mult(a, b)
                composed = tuple(
                    self.vertex_perms[a][self.vertex_perms[b][v]]
                    for v in range(nv)
                )
                if composed != self.vertex_perms[ab]:
                    raise CechError("vertex action is not a homomorphism")
                if matmul(self.coeff_actions[a], self.coeff_actions[b]) != \
                        self.coeff_actions[ab]:
                    raise CechError("coefficient action is not a homomorphism")
        # the nerve must be stable
        for perm in self.vertex_perms:
            for level in self.nerve.simplices:
                for s in level:
                    img = tuple(sorted(perm[v] for v in s))
                    if img not in set(level):
                        raise CechError("action does not preserve the nerve")

    def act_on_simplex(self, g: int, s) -> tuple[tuple[int, ...], int]:
        perm = self.vertex_perms[g]
        moved = [perm[v] for v in s]
        return _sort_sign(moved)

    def to_json_dict(self) -> dict:
        return {
            "group": self.group.to_json_dict(),
            "nerve": self.nerve.to_json_dict(),
            "coefficients": _plain_label(self.coefficients),
            "vertex_perms": [list(p) for p in self.vertex_perms],
            "coeff_actions": [[list(r) for r in m] for m in self.coeff_actions],
        }

    @classmethod
    def from_json_dict(cls, d: dict) -> "FiniteAction":
        return cls(
            group=FiniteGroupTable.from_json_dict(d["group"]),
            nerve=Nerve.from_json_dict(d["nerve"]),
            coefficients=parse_group_label(d["coefficients"]),
            vertex_perms=tuple(tuple(int(x) for x in p) for p in d["vertex_perms"]),
            coeff_actions=tuple(freeze(m) for m in d["coeff_actions"]),
        )


def trivial_action(group: FiniteGroupTable, nerve: Nerve,
                   coefficients: CoefficientGroup) -> FiniteAction:
    return FiniteAction(
        group,
        nerve,
        coefficients,
        tuple(tuple(range(nerve.n_vertices)) for _ in range(group.n)),
        tuple(identity(coefficients.size) for _ in range(group.n)),
    )


def point_action(group: FiniteGroupTable, coefficients: CoefficientGroup,
                 coeff_actions=None) -> FiniteAction:
    nerve = simplex_cone_nerve(1)
    if coeff_actions is None:
        coeff_actions = tuple(
            identity(coefficients.size) for _ in range(group.n)
        )
    return FiniteAction(
        group, nerve, coefficients,
        tuple((0,) for _ in range(group.n)),
        tuple(coeff_actions),
    )


# ---------------------------------------------------------------------------
# equivariant cohomology via the double complex


def _blocks(nerve: Nerve, n: int):
    """(q, p) blocks of total degree n with nonempty simplex level."""
    out = []
    for q in range(n + 1):
        p = n - q
        if p <= nerve.dim and nerve.level(p):
            out.append((q, p))
    return out


def _equivariant_matrices(act: FiniteAction, n: int, cap: int):
    """Free-cover matrix of the total differential T^n -> T^(n+1)."""
    g = act.group
    nerve = act.nerve
    size = act.coefficients.size

    def layout(m: int):
        blocks = _blocks(nerve, m)
        offs = {}
        total = 0
        for (q, p) in blocks:
            offs[(q, p)] = total
            total += (g.n ** q) * len(nerve.level(p)) * size
        if total > cap:
            raise ComplexCapExceeded(total, cap)
        return blocks, offs, total

    src_blocks, src_offs, src_total = layout(n)
    dst_blocks, dst_offs, dst_total = layout(n + 1)
    dst_set = set(dst_blocks)
    cols = [[0] * dst_total for _ in range(src_total)]

    for (q, p) in src_blocks:
        level = nerve.level(p)
        simp_idx = {s: i for i, s in enumerate(level)}
        gtuples = list(g.tuples(q))
        src_off = src_offs[(q, p)]
        nsimp = len(level)

        def src_coord(ti, si, c):
            return src_off + (ti * nsimp + si) * size + c

        # group-direction differential into (q+1, p)
        if (q + 1, p) in dst_set:
            dst_off = dst_offs[(q + 1, p)]
            dst_tuples = {t: i for i, t in enumerate(g.tuples(q + 1))}

            def dst_coord(ti, si, c):
                return dst_off + (ti * nsimp + si) * size + c

            for out_ti, out_tup in enumerate(g.tuples(q + 1)):
                # (delta f)(g1..g_{q+1}, s): express in terms of f
                g1 = out_tup[0]
                rest = out_tup[1:]
                for out_si, out_s in enumerate(level):
                    # term 0: g1 . f(rest)(s) = sign * rho(g1) f(rest, g1^-1 s)
                    ginv = g.inverse(g1)
                    moved, sign = act.act_on_simplex(ginv, out_s)
                    rho = act.coeff_actions[g1]
                    ti_rest = 0
                    # index of rest among q-tuples
                    ti_rest = _tuple_index(rest, g.n)
                    for outc in range(size):
                        for inc in range(size):
                            coef = sign * rho[outc][inc]
                            if coef:
                                cols[src_coord(ti_rest, simp_idx[moved], inc)][
                                    dst_coord(out_ti, out_si, outc)
                                ] += coef
                    # middle terms: (-1)^i f(.., g_i g_{i+1}, ..)
                    for i in range(1, q + 1):
                        merged = (
                            out_tup[:i - 1]
                            + (g.mult(out_tup[i - 1], out_tup[i]),)
                            + out_tup[i + 1:]
                        )
                        ti_m = _tuple_index(merged, g.n)
                        coef = -1 if i % 2 else 1
                        for c in range(size):
                            cols[src_coord(ti_m, out_si, c)][
                                dst_coord(out_ti, out_si, c)
                            ] += coef
                    # last term: (-1)^{q+1} f(g1..gq)
                    ti_l = _tuple_index(out_tup[:q], g.n)
                    coef = -1 if (q + 1) % 2 else 1
                    for c in range(size):
                        cols[src_coord(ti_l, out_si, c)][
                            dst_coord(out_ti, out_si, c)
                        ] += coef

        # Cech-direction differential into (q, p+1), with sign (-1)^q
        if (q, p + 1) in dst_set:
            dst_off = dst_offs[(q, p + 1)]
            dlevel = nerve.level(p + 1)
            nd = len(dlevel)

            def dst_coord2(ti, si, c):
                return dst_off + (ti * nd + si) * size + c

            tsign = -1 if q % 2 else 1
            for ti in range(len(gtuples)):
                for out_si, out_s in enumerate(dlevel):
                    for i in range(p + 2):
                        face = out_s[:i] + out_s[i + 1:]
                        si = simp_idx[face]
                        coef = tsign * (1 if i % 2 == 0 else -1)
                        for c in range(size):
                            cols[src_coord(ti, si, c)][
                                dst_coord2(ti, out_si, c)
                            ] += coef

    matrix = freeze([[cols[j][i] for j in range(src_total)]
                     for i in range(dst_total)]) if dst_total else ()
    return matrix, src_total, dst_total


def _tuple_index(tup, base: int) -> int:
    idx = 0
    for x in tup:
        idx = idx * base + x
    return idx


def _total_relations(act: FiniteAction, n: int, cap: int) -> tuple[Vector, ...]:
    g = act.group
    nerve = act.nerve
    group = act.coefficients
    size = group.size
    blocks = _blocks(nerve, n)
    total = 0
    slots = 0
    for (q, p) in blocks:
        cnt = (g.n ** q) * len(nerve.level(p))
        slots += cnt
        total += cnt * size
    if total > cap:
        raise ComplexCapExceeded(total, cap)
    out = []
    rels = group.relation_vectors()
    if not rels:
        return ()
    for slot in range(slots):
        for rel in rels:
            v = [0] * total
            for i, x in enumerate(rel):
                v[slot * size + i] = x
            out.append(tuple(v))
    return tuple(out)


def equivariant_cohomology(
    act: FiniteAction, degree: int, cap: int = 60000
) -> AbelianInvariants:
    """Total cohomology of the group-direction x Cech double complex.

    With the trivial group this agrees with plain cohomology of the
    nerve; on a point nerve it is group cohomology of the acting group.
    """
    if degree < 0:
        raise CechError("negative degree")
    d_out, n_here, _ = _equivariant_matrices(act, degree, cap)
    rel_out = _total_relations(act, degree + 1, cap)
    if degree == 0:
        d_in_cols: tuple[Vector, ...] = ()
    else:
        d_in, _, _ = _equivariant_matrices(act, degree - 1, cap)
        d_in_cols = tuple(tuple(r) for r in transpose(d_in)) if d_in else ()
    rel_in = _total_relations(act, degree, cap)
    inv, _, _ = _subquotient(n_here, d_out, rel_out, d_in_cols, rel_in)
    return inv


def group_cohomology(table: FiniteGroupTable, coefficients: CoefficientGroup,
                     degree: int, coeff_actions=None,
                     cap: int = 60000) -> AbelianInvariants:
    """Group cohomology via the one-point equivariant model."""
    act = point_action(table, coefficients, coeff_actions)
    return equivariant_cohomology(act, degree, cap)


# ---------------------------------------------------------------------------
# central extensions from 2-cocycles


@dataclass(frozen=True)
class ExtensionResult:
    table: FiniteGroupTable
    element_labels: tuple[tuple[Vector, int], ...]
    order_multiset: tuple[int, ...]
    center_size: int


def check_two_cocycle(group: FiniteGroupTable, coeff: CoefficientGroup,
                      psi: dict) -> tuple[int, int, int] | None:
    """First violating triple of the (central) 2-cocycle identity, if any."""
    e = group.identity

    def val(a, b):
        return coeff.reduce(psi.get((a, b), coeff.zero()))

    for gx in range(group.n):
        if any(val(e, gx)) or any(val(gx, e)):
            raise CechError("2-cochain is not normalized")
    for g1 in range(group.n):
        for g2 in range(group.n):
            for g3 in range(group.n):
                lhs = coeff.add(val(g2, g3), val(g1, group.mult(g2, g3)))
                rhs = coeff.add(val(group.mult(g1, g2), g3), val(g1, g2))
                if lhs != rhs:
                    return (g1, g2, g3)
    return None


def central_extension_from_cocycle(
    group: FiniteGroupTable, coeff: CoefficientGroup, psi: dict
) -> ExtensionResult:
    """Multiplication table of A x_psi G; rejects non-cocycles.

    (a1, g1) (a2, g2) = (a1 + a2 + psi(g1, g2), g1 g2); associativity is
    exactly the cocycle identity, re-verified on the built table.
    """
    if coeff.free_rank:
        raise CechError("extension tables need finite coefficients")
    bad = check_two_cocycle(group, coeff, psi)
    if bad is not None:
        raise CechError(f"not a 2-cocycle: fails on triple {bad}")
    elems = [(a, g) for a in coeff.elements() for g in range(group.n)]
    pos = {x: i for i, x in enumerate(elems)}

    def val(a, b):
        return coeff.reduce(psi.get((a, b), coeff.zero()))

    table = []
    for (a1, g1) in elems:
        row = []
        for (a2, g2) in elems:
            a = coeff.add(coeff.add(a1, a2), val(g1, g2))
            row.append(pos[(a, group.mult(g1, g2))])
        table.append(tuple(row))
    ext = FiniteGroupTable(tuple(table))
    return ExtensionResult(
        ext,
        tuple(elems),
        ext.order_multiset(),
        ext.center_size(),
    )


# ---------------------------------------------------------------------------
# circle covers of a torus and the level-induced cocycle


@dataclass(frozen=True)
class TorusCoverModel:
    """Product of subdivided circles with branch offsets on overlaps.

    arc_counts[i] arcs cover the i-th circle factor; offsets assign to
    every nerve edge the lattice jump between adjacent branches, and must
    satisfy the additive cocycle relation on triple overlaps.
    """

    arc_counts: tuple[int, ...]
    windings: tuple[int, ...]
    nerve: Nerve
    vertex_labels: tuple[tuple[int, ...], ...]
    offsets: dict

    def __post_init__(self):
        lam = self.cocycle()
        if not coboundary(lam).is_zero():
            raise CechError("branch offsets violate the triple-overlap relation")

    @property
    def rank(self) -> int:
        return len(self.arc_counts)

    def cocycle(self) -> Cochain:
        group = CoefficientGroup(self.rank, ())
        return Cochain(self.nerve, 1, group, dict(self.offsets))


def torus_cover_model(arc_counts, windings) -> TorusCoverModel:
    """Standard model: branch jumps concentrated on the wraparound edges."""
    arc_counts = tuple(int(k) for k in arc_counts)
    windings = tuple(int(w) for w in windings)
    if len(arc_counts) != len(windings):
        raise CechError("one winding per circle factor required")
    if any(k < 3 for k in arc_counts):
        raise CechError("each circle needs at least 3 arcs")
    rank = len(arc_counts)
    # ground set: 2k sample points per circle, arc a covers {2a, 2a+1, 2a+2}
    factors = []
    for k in arc_counts:
        arcs = []
        for a in range(k):
            arcs.append(frozenset({(2 * a) % (2 * k), 2 * a + 1, (2 * a + 2) % (2 * k)}))
        factors.append(arcs)
    labels = list(itertools.product(*[range(k) for k in arc_counts]))
    cover = []
    for lab in labels:
        pts = set(itertools.product(*[factors[i][a] for i, a in enumerate(lab)]))
        cover.append(pts)
    nerve = nerve_of_cover(cover, dim_cap=2 * rank)
    label_of = {i: labels[i] for i in range(len(labels))}

    def factor_jump(i, a, b):
        k = arc_counts[i]
        if a == b:
            return 0
        if (a, b) == (0, k - 1):
            return windings[i]
        if (a, b) == (k - 1, 0):
            return -windings[i]
        if b == a + 1:
            return 0
        if b == a - 1:
            return 0
        raise CechError("non-adjacent arcs sharing points")

    offsets = {}
    for (u, v) in nerve.level(1):
        la, lb = label_of[u], label_of[v]
        vec = tuple(
            factor_jump(i, la[i], lb[i]) for i in range(rank)
        )
        if any(vec):
            offsets[(u, v)] = vec
    return TorusCoverModel(arc_counts, windings, nerve, tuple(labels), offsets)


def torus_log_cocycle(model: TorusCoverModel) -> Cochain:
    """The branch-jump 1-cocycle; verified against the nerve."""
    lam = model.cocycle()
    if not coboundary(lam).is_zero():
        raise CechError("branch offsets do not form a cocycle")
    return lam


def winding_pairing(model: TorusCoverModel, c: Cochain) -> tuple[Vector, ...]:
    """Sums of a 1-cochain along each coordinate loop of the model.

    The traversal orientation is fixed so that the branch-jump cocycle of
    the standard model pairs to exactly its winding vector (values are
    taken on (next arc, this arc), matching jump = new branch - old).
    The pairing kills coboundaries, so it reads off the cohomology class.
    """
    rank = model.rank
    label_pos = {lab: i for i, lab in enumerate(model.vertex_labels)}
    out = []
    for i in range(rank):
        k = model.arc_counts[i]
        total = c.group.zero()
        base = [0] * rank
        for a in range(k):
            u = list(base)
            v = list(base)
            u[i] = a
            v[i] = (a + 1) % k
            total = c.group.add(
                total, c.value((label_pos[tuple(v)], label_pos[tuple(u)]))
            )
        out.append(total)
    return tuple(out)


def gerbe_cocycle_from_level(lam: Cochain, level) -> Cochain:
    """Push a lattice-valued 1-cocycle through bmap of a level tensor.

    Additive in the level and odd under lam -> -lam; the output is the
    overlap-class cocycle of the induced construction.
    """
    b = level
    r_t = b.iso.target.rank
    if lam.group.torsion or lam.group.free_rank != r_t:
        raise CechError(
            f"cocycle values must live in the rank-{r_t} cocharacter lattice"
        )
    out_group = CoefficientGroup(b.iso.source.rank, ())
    return lam.map_values(lambda v: matvec(b.matrix, v), out_group)
