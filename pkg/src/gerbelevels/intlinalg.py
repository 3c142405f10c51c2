"""Exact integer and rational linear algebra kernel.

Matrices are tuples of tuples of Python ints (arbitrary precision), row
major.  No floating point is used anywhere in this package: Hermite-form
intermediates can grow without bound and fixed-width arithmetic would
silently corrupt downstream certificates.

Hermite normal form convention (fixed project-wide, all golden values
depend on it): row-style echelon form whose lower-left triangle is zero.
Each nonzero row has a positive leading entry (its pivot), pivot columns
strictly increase from row to row, entries above a pivot are reduced into
[0, pivot), and zero rows sit at the bottom.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd

Vector = tuple[int, ...]
Matrix = tuple[Vector, ...]
FracVec = tuple[Fraction, ...]
FracMat = tuple[FracVec, ...]


class DimensionMismatch(ValueError):
    """Raised when operand shapes are incompatible."""


# ---------------------------------------------------------------------------
# basic matrix utilities


def freeze(rows) -> Matrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def shape(a: Matrix) -> tuple[int, int]:
    m = len(a)
    n = len(a[0]) if m else 0
    if any(len(row) != n for row in a):
        raise DimensionMismatch("ragged matrix")
    return m, n


def identity(n: int) -> Matrix:
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def zeros(m: int, n: int) -> Matrix:
    return tuple((0,) * n for _ in range(m))


def transpose(a: Matrix) -> Matrix:
    m, n = shape(a)
    return tuple(tuple(a[i][j] for i in range(m)) for j in range(n))


def matmul(a: Matrix, b: Matrix) -> Matrix:
    ma, na = shape(a)
    mb, nb = shape(b)
    if na != mb:
        raise DimensionMismatch(f"cannot multiply {ma}x{na} by {mb}x{nb}")
    bt = transpose(b)
    return tuple(
        tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a
    )


def matvec(a: Matrix, v: Vector) -> Vector:
    m, n = shape(a)
    if len(v) != n:
        raise DimensionMismatch(f"cannot apply {m}x{n} to vector of length {len(v)}")
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def vec_add(u: Vector, v: Vector) -> Vector:
    if len(u) != len(v):
        raise DimensionMismatch("vector length mismatch")
    return tuple(x + y for x, y in zip(u, v))


def vec_sub(u: Vector, v: Vector) -> Vector:
    if len(u) != len(v):
        raise DimensionMismatch("vector length mismatch")
    return tuple(x - y for x, y in zip(u, v))


def vec_scale(k: int, v: Vector) -> Vector:
    return tuple(k * x for x in v)


def det(a: Matrix) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    m, n = shape(a)
    if m != n:
        raise DimensionMismatch("determinant needs a square matrix")
    if m == 0:
        return 1
    w = [list(row) for row in a]
    sign = 1
    prev = 1
    for k in range(m - 1):
        if w[k][k] == 0:
            for i in range(k + 1, m):
                if w[i][k] != 0:
                    w[k], w[i] = w[i], w[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, m):
            for j in range(k + 1, m):
                w[i][j] = (w[i][j] * w[k][k] - w[i][k] * w[k][j]) // prev
            w[i][k] = 0
        prev = w[k][k]
    return sign * w[m - 1][m - 1]


def xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b = g."""
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    if g < 0:
        x, y, g = -x, -y, -g
    return g, x, y


# ---------------------------------------------------------------------------
# normal forms


def hnf(a: Matrix) -> tuple[Matrix, Matrix]:
    """Row Hermite normal form.

    Returns (H, U) with U unimodular and U @ a == H, H in the project's
    pivot convention (see module docstring).
    """
    m, n = shape(a)
    h = [list(row) for row in a]
    u = [list(row) for row in identity(m)]
    row = 0
    for col in range(n):
        pivot_row = None
        for r in range(row, m):
            if h[r][col] != 0:
                pivot_row = r
                break
        if pivot_row is None:
            continue
        if pivot_row != row:
            h[row], h[pivot_row] = h[pivot_row], h[row]
            u[row], u[pivot_row] = u[pivot_row], u[row]
        for r in range(row + 1, m):
            if h[r][col] == 0:
                continue
            aa, bb = h[row][col], h[r][col]
            if bb % aa == 0:
                q = bb // aa
                h[r] = [s - q * t for s, t in zip(h[r], h[row])]
                u[r] = [s - q * t for s, t in zip(u[r], u[row])]
                continue
            g, x, y = xgcd(aa, bb)
            p, q = aa // g, bb // g
            # [[x, y], [-q, p]] has determinant 1 and sends (aa, bb) to (g, 0)
            h[row], h[r] = (
                [x * s + y * t for s, t in zip(h[row], h[r])],
                [-q * s + p * t for s, t in zip(h[row], h[r])],
            )
            u[row], u[r] = (
                [x * s + y * t for s, t in zip(u[row], u[r])],
                [-q * s + p * t for s, t in zip(u[row], u[r])],
            )
        if h[row][col] < 0:
            h[row] = [-x for x in h[row]]
            u[row] = [-x for x in u[row]]
        d = h[row][col]
        for r in range(row):
            q = h[r][col] // d
            if q:
                h[r] = [s - q * t for s, t in zip(h[r], h[row])]
                u[r] = [s - q * t for s, t in zip(u[r], u[row])]
        row += 1
        if row == m:
            break
    return freeze(h), freeze(u)


def snf(a: Matrix) -> tuple[Matrix, Matrix, Matrix]:
    """Smith normal form.

    Returns (S, U, V) with U, V unimodular, U @ a @ V == S, S diagonal
    with nonnegative entries d1 | d2 | ...
    """
    m, n = shape(a)
    s = [list(row) for row in a]
    u = [list(row) for row in identity(m)]
    v = [list(row) for row in identity(n)]

    def row_op(i1, i2, x, y, p, q):
        s[i1], s[i2] = (
            [x * aa + y * bb for aa, bb in zip(s[i1], s[i2])],
            [-q * aa + p * bb for aa, bb in zip(s[i1], s[i2])],
        )
        u[i1], u[i2] = (
            [x * aa + y * bb for aa, bb in zip(u[i1], u[i2])],
            [-q * aa + p * bb for aa, bb in zip(u[i1], u[i2])],
        )

    def col_op(j1, j2, x, y, p, q):
        for row_s in s:
            aa, bb = row_s[j1], row_s[j2]
            row_s[j1], row_s[j2] = x * aa + y * bb, -q * aa + p * bb
        for row_v in v:
            aa, bb = row_v[j1], row_v[j2]
            row_v[j1], row_v[j2] = x * aa + y * bb, -q * aa + p * bb

    def swap_rows(i1, i2):
        if i1 != i2:
            s[i1], s[i2] = s[i2], s[i1]
            u[i1], u[i2] = u[i2], u[i1]

    def swap_cols(j1, j2):
        if j1 != j2:
            for row_s in s:
                row_s[j1], row_s[j2] = row_s[j2], row_s[j1]
            for row_v in v:
                row_v[j1], row_v[j2] = row_v[j2], row_v[j1]

    t = 0
    while t < min(m, n):
        # deterministic pivot: smallest |entry|, ties broken by position
        best = None
        for i in range(t, m):
            for j in range(t, n):
                e = abs(s[i][j])
                if e and (best is None or e < best[0]):
                    best = (e, i, j)
        if best is None:
            break
        _, bi, bj = best
        swap_rows(t, bi)
        swap_cols(t, bj)
        while True:
            for i in range(t + 1, m):
                if s[i][t] == 0:
                    continue
                aa, bb = s[t][t], s[i][t]
                if bb % aa == 0:
                    q = bb // aa
                    s[i] = [w - q * z for w, z in zip(s[i], s[t])]
                    u[i] = [w - q * z for w, z in zip(u[i], u[t])]
                else:
                    g, x, y = xgcd(aa, bb)
                    row_op(t, i, x, y, aa // g, bb // g)
            for j in range(t + 1, n):
                if s[t][j] == 0:
                    continue
                aa, bb = s[t][t], s[t][j]
                if bb % aa == 0:
                    q = bb // aa
                    for row_s in s:
                        row_s[j] -= q * row_s[t]
                    for row_v in v:
                        row_v[j] -= q * row_v[t]
                else:
                    g, x, y = xgcd(aa, bb)
                    col_op(t, j, x, y, aa // g, bb // g)
            if any(s[i][t] for i in range(t + 1, m)):
                continue
            if any(s[t][j] for j in range(t + 1, n)):
                continue
            # pivot must divide the rest of the submatrix
            culprit = None
            d = s[t][t]
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if s[i][j] % d:
                        culprit = i
                        break
                if culprit is not None:
                    break
            if culprit is None:
                break
            s[t] = [aa + bb for aa, bb in zip(s[t], s[culprit])]
            u[t] = [aa + bb for aa, bb in zip(u[t], u[culprit])]
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return freeze(s), freeze(u), freeze(v)


def diagonal(a: Matrix) -> tuple[int, ...]:
    m, n = shape(a)
    return tuple(a[i][i] for i in range(min(m, n)))


# ---------------------------------------------------------------------------
# solving, kernels, cokernels


@dataclass(frozen=True)
class SolveResult:
    """Outcome of an integer linear solve A x = y.

    solution is None when no integer solution exists; kernel is always a
    basis of the integer kernel of A; min_multiplier is the smallest
    k >= 1 such that A x = k*y is solvable (None if no such k exists,
    1 whenever solution is not None).
    """

    solution: Vector | None
    kernel: tuple[Vector, ...]
    min_multiplier: int | None


def kernel_basis(a: Matrix) -> tuple[Vector, ...]:
    """Basis of {x : a @ x = 0}; the lattice it spans is saturated."""
    m, n = shape(a)
    s, _u, v = snf(a)
    diag = diagonal(s)
    rank = sum(1 for d in diag if d != 0)
    return tuple(tuple(v[i][j] for i in range(n)) for j in range(rank, n))


def solve_z(a: Matrix, y: Vector) -> SolveResult:
    """Solve a @ x = y over the integers.

    Raises DimensionMismatch if len(y) differs from the row count.
    """
    m, n = shape(a)
    if len(y) != m:
        raise DimensionMismatch(f"rhs length {len(y)} != row count {m}")
    s, u, v = snf(a)
    diag = diagonal(s)
    rank = sum(1 for d in diag if d != 0)
    z = matvec(u, y)
    kern = tuple(tuple(v[i][j] for i in range(n)) for j in range(rank, n))
    if any(z[i] != 0 for i in range(rank, m)):
        return SolveResult(None, kern, None)
    ok = all(z[i] % diag[i] == 0 for i in range(rank))
    if ok:
        w = [z[i] // diag[i] for i in range(rank)] + [0] * (n - rank)
        x = matvec(v, tuple(w))
        return SolveResult(x, kern, 1)
    # minimal k with d_i | k*z_i for all i: lcm of d_i / gcd(d_i, z_i)
    k = 1
    for i in range(rank):
        need = diag[i] // gcd(diag[i], z[i])
        k = k * need // gcd(k, need)
    return SolveResult(None, kern, k)


@dataclass(frozen=True)
class AbelianInvariants:
    """A finitely generated abelian group Z^free_rank + Z/d1 + Z/d2 + ...

    Torsion entries satisfy d1 | d2 | ... and are all >= 2 (canonical).
    """

    free_rank: int
    torsion: tuple[int, ...]

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise ValueError("torsion entries must be >= 2")
        for d1, d2 in zip(self.torsion, self.torsion[1:]):
            if d2 % d1:
                raise ValueError("torsion divisibility chain broken")

    @classmethod
    def from_diagonal(cls, diag, extra_free: int = 0) -> "AbelianInvariants":
        torsion = tuple(d for d in diag if d not in (0, 1))
        free = extra_free + sum(1 for d in diag if d == 0)
        return cls(free, torsion)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def order(self) -> int | None:
        """Group order, or None when infinite."""
        if self.free_rank:
            return None
        n = 1
        for d in self.torsion:
            n *= d
        return n

    def label(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def cokernel(a: Matrix) -> AbelianInvariants:
    """Invariants of Z^rows / (column span of a)."""
    m, _n = shape(a)
    s, _u, _v = snf(a)
    diag = diagonal(s)
    rank = sum(1 for d in diag if d != 0)
    return AbelianInvariants(
        free_rank=m - rank, torsion=tuple(d for d in diag if d not in (0, 1))
    )


# ---------------------------------------------------------------------------
# lattices presented by row bases


def hnf_basis(rows: Matrix) -> Matrix:
    """Canonical basis (HNF, zero rows dropped) of the row span lattice."""
    if not rows:
        return ()
    h, _u = hnf(rows)
    return tuple(r for r in h if any(r))


def lattices_equal(rows_a: Matrix, rows_b: Matrix) -> bool:
    return hnf_basis(rows_a) == hnf_basis(rows_b)


def lattice_coords(basis_rows: Matrix, v: Vector) -> Vector | None:
    """Coordinates of v in the given row basis, or None if v is outside."""
    if not basis_rows:
        return () if not any(v) else None
    res = solve_z(transpose(basis_rows), v)
    return res.solution


def lattice_contains(basis_rows: Matrix, v: Vector) -> bool:
    return lattice_coords(basis_rows, v) is not None


def quotient_invariants(ambient_rows: Matrix, sub_rows: Matrix) -> AbelianInvariants:
    """Invariants of (lattice spanned by ambient_rows) / (span of sub_rows).

    sub_rows must lie inside the ambient lattice.
    """
    r = len(ambient_rows)
    if not sub_rows:
        return AbelianInvariants(free_rank=r, torsion=())
    coords = []
    for row in sub_rows:
        c = lattice_coords(ambient_rows, row)
        if c is None:
            raise ValueError("sub_rows are not inside the ambient lattice")
        coords.append(c)
    return cokernel(transpose(freeze(coords)))


def kernel_basis_mod2(a: Matrix) -> tuple[Vector, ...]:
    """Basis of the kernel of a over GF(2); vectors have 0/1 entries."""
    m, n = shape(a)
    rows = [[x & 1 for x in row] for row in a]
    pivot_of_col: dict[int, int] = {}
    r = 0
    for c in range(n):
        sel = None
        for i in range(r, m):
            if rows[i][c]:
                sel = i
                break
        if sel is None:
            continue
        rows[r], rows[sel] = rows[sel], rows[r]
        for i in range(m):
            if i != r and rows[i][c]:
                rows[i] = [(x + y) & 1 for x, y in zip(rows[i], rows[r])]
        pivot_of_col[c] = r
        r += 1
    basis = []
    free_cols = [c for c in range(n) if c not in pivot_of_col]
    for fc in free_cols:
        vec = [0] * n
        vec[fc] = 1
        for c, pr in pivot_of_col.items():
            if rows[pr][fc]:
                vec[c] = 1
        basis.append(tuple(vec))
    return tuple(basis)


# ---------------------------------------------------------------------------
# exact rational helpers (Fraction matrices)


def frac_matvec(a: FracMat, v) -> FracVec:
    return tuple(sum((x * y for x, y in zip(row, v)), Fraction(0)) for row in a)


def frac_solve(a: FracMat, y) -> FracVec | None:
    """Solve a @ x = y exactly over the rationals (None if inconsistent).

    When the solution is not unique the free variables are set to 0,
    deterministically.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    aug = [[Fraction(x) for x in row] + [Fraction(y[i])] for i, row in enumerate(a)]
    pivots = []
    r = 0
    for c in range(n):
        sel = None
        for i in range(r, m):
            if aug[i][c] != 0:
                sel = i
                break
        if sel is None:
            continue
        aug[r], aug[sel] = aug[sel], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(m):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y2 for x, y2 in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, m):
        if aug[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for i, c in enumerate(pivots):
        x[c] = aug[i][n]
    return tuple(x)


def frac_inverse(a: FracMat) -> FracMat:
    n = len(a)
    cols = []
    for j in range(n):
        e = tuple(Fraction(1) if i == j else Fraction(0) for i in range(n))
        col = frac_solve(a, e)
        if col is None:
            raise ValueError("matrix is singular")
        cols.append(col)
    return tuple(tuple(cols[j][i] for j in range(n)) for i in range(n))


# ---------------------------------------------------------------------------
# rational vectors with a common reduced denominator


@dataclass(frozen=True)
class RatVector:
    """Integer numerators over one positive denominator, fully reduced.

    Invariants: den >= 1 and gcd(gcd(nums), den) == 1.  Equality is
    structural, which is safe because construction always reduces.
    """

    nums: Vector
    den: int

    def __post_init__(self):
        if self.den < 1:
            raise ValueError("denominator must be >= 1")
        g = 0
        for x in self.nums:
            g = gcd(g, x)
        if gcd(g, self.den) != 1:
            raise ValueError("RatVector not reduced; use RatVector.make")

    @classmethod
    def make(cls, nums, den: int = 1) -> "RatVector":
        if den == 0:
            raise ValueError("zero denominator")
        if den < 0:
            nums = [-x for x in nums]
            den = -den
        g = den
        for x in nums:
            g = gcd(g, x)
        if g > 1:
            nums = [x // g for x in nums]
            den //= g
        return cls(tuple(int(x) for x in nums), int(den))

    @classmethod
    def from_fractions(cls, fracs) -> "RatVector":
        fracs = [Fraction(f) for f in fracs]
        den = 1
        for f in fracs:
            den = den * f.denominator // gcd(den, f.denominator)
        return cls.make([f.numerator * (den // f.denominator) for f in fracs], den)

    @classmethod
    def zero(cls, n: int) -> "RatVector":
        return cls((0,) * n, 1)

    def __len__(self) -> int:
        return len(self.nums)

    def fractions(self) -> FracVec:
        return tuple(Fraction(x, self.den) for x in self.nums)

    @property
    def is_integral(self) -> bool:
        return self.den == 1

    def int_vector(self) -> Vector:
        if self.den != 1:
            raise ValueError("vector is not integral")
        return self.nums

    def __add__(self, other: "RatVector") -> "RatVector":
        if len(self) != len(other):
            raise DimensionMismatch("vector length mismatch")
        d = self.den * other.den // gcd(self.den, other.den)
        a = d // self.den
        b = d // other.den
        return RatVector.make(
            [a * x + b * y for x, y in zip(self.nums, other.nums)], d
        )

    def __sub__(self, other: "RatVector") -> "RatVector":
        return self + (-other)

    def __neg__(self) -> "RatVector":
        return RatVector(tuple(-x for x in self.nums), self.den)

    def scale(self, k: int) -> "RatVector":
        return RatVector.make([k * x for x in self.nums], self.den)

    def apply(self, a: Matrix) -> "RatVector":
        """Exact image under an integer matrix; the output denominator
        divides the input denominator."""
        return RatVector.make(list(matvec(a, self.nums)), self.den)

    def mod1(self) -> "RatVector":
        """Representative with all coordinates in [0, 1)."""
        return RatVector.make([x % self.den for x in self.nums], self.den)
