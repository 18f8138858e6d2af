"""Exact integer linear algebra and finitely generated abelian groups.

Groups are represented as subquotients K/L of a fixed ambient lattice Z^n,
with K and L given by integer basis matrices (columns).  All structure
passes through a deterministic Smith normal form: pivots are chosen by
(|value|, row, column), so every derived basis, invariant-factor list and
report is reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import prod
from typing import Optional, Sequence

from .errors import IncompatibleAction, NotAutomorphism, NotFinite


@dataclass(frozen=True)
class IntMatrix:
    entries: tuple
    rows: int
    cols: int

    def __init__(self, entries: Sequence[Sequence[int]],
                 rows: Optional[int] = None, cols: Optional[int] = None):
        data = tuple(tuple(int(x) for x in row) for row in entries)
        r = len(data) if rows is None else rows
        if data:
            c = len(data[0])
            if any(len(row) != c for row in data):
                raise ValueError("ragged matrix")
        else:
            c = 0
        if cols is not None:
            c = cols
        if rows is not None and r != len(data) and data:
            raise ValueError("row count mismatch")
        if r and not data:
            data = tuple(() for _ in range(r))
        object.__setattr__(self, "entries", data)
        object.__setattr__(self, "rows", r)
        object.__setattr__(self, "cols", c)

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls([[0] * cols for _ in range(rows)], rows=rows, cols=cols)

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence[int]], dim: int) -> "IntMatrix":
        for v in cols:
            if len(v) != dim:
                raise ValueError("column length mismatch")
        return cls([[v[i] for v in cols] for i in range(dim)],
                   rows=dim, cols=len(cols))

    def column(self, j: int) -> tuple:
        return tuple(self.entries[i][j] for i in range(self.rows))

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> "IntMatrix":
        return IntMatrix([[self.entries[i][j] for i in range(self.rows)]
                          for j in range(self.cols)],
                         rows=self.cols, cols=self.rows)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.cols} vs {other.rows}")
        return IntMatrix(
            [[sum(self.entries[i][k] * other.entries[k][j]
                  for k in range(self.cols)) for j in range(other.cols)]
             for i in range(self.rows)],
            rows=self.rows, cols=other.cols)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return IntMatrix([[a + b for a, b in zip(ra, rb)]
                          for ra, rb in zip(self.entries, other.entries)],
                         rows=self.rows, cols=self.cols)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix([[-a for a in row] for row in self.entries],
                         rows=self.rows, cols=self.cols)

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        return IntMatrix([ra + rb for ra, rb in zip(self.entries, other.entries)],
                         rows=self.rows, cols=self.cols + other.cols)

    def is_zero(self) -> bool:
        return all(x == 0 for row in self.entries for x in row)

    def det(self) -> int:
        if self.rows != self.cols:
            raise ValueError("determinant needs a square matrix")
        n = self.rows
        a = [[Fraction(x) for x in row] for row in self.entries]
        d = Fraction(1)
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k]), None)
            if piv is None:
                return 0
            if piv != k:
                a[k], a[piv] = a[piv], a[k]
                d = -d
            d *= a[k][k]
            inv = 1 / a[k][k]
            for i in range(k + 1, n):
                f = a[i][k] * inv
                if f:
                    a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        assert d.denominator == 1
        return int(d)

    def inverse_unimodular(self) -> "IntMatrix":
        """Exact inverse; requires det = ±1."""
        if self.rows != self.cols:
            raise ValueError("inverse needs a square matrix")
        n = self.rows
        a = [[Fraction(x) for x in row] + [Fraction(int(i == j))
             for j in range(n)] for i, row in enumerate(self.entries)]
        for k in range(n):
            piv = next((i for i in range(k, n) if a[i][k]), None)
            if piv is None:
                raise ValueError("matrix is singular")
            a[k], a[piv] = a[piv], a[k]
            inv = 1 / a[k][k]
            a[k] = [x * inv for x in a[k]]
            for i in range(n):
                if i != k and a[i][k]:
                    f = a[i][k]
                    a[i] = [x - f * y for x, y in zip(a[i], a[k])]
        out = [[a[i][n + j] for j in range(n)] for i in range(n)]
        if any(x.denominator != 1 for row in out for x in row):
            raise ValueError("matrix is not unimodular")
        return IntMatrix([[int(x) for x in row] for row in out])

    def is_unimodular(self) -> bool:
        return self.rows == self.cols and abs(self.det()) == 1


def smith_normal_form(M: IntMatrix) -> tuple:
    """(U, S, V) with U @ M @ V = S diagonal, d_1 | d_2 | ..., d_i > 0.

    U and V are unimodular.  Pivot choice is (|value|, row, col)-minimal,
    making the whole decomposition deterministic.
    """
    r, c = M.rows, M.cols
    A = [list(row) for row in M.entries]
    U = [[int(i == j) for j in range(r)] for i in range(r)]
    V = [[int(i == j) for j in range(c)] for i in range(c)]

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in A:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def row_sub(i, j, q):  # row i -= q * row j
        A[i] = [x - q * y for x, y in zip(A[i], A[j])]
        U[i] = [x - q * y for x, y in zip(U[i], U[j])]

    def col_sub(i, j, q):  # col i -= q * col j
        for row in A:
            row[i] -= q * row[j]
        for row in V:
            row[i] -= q * row[j]

    t = 0
    while t < min(r, c):
        # re-select the minimal pivot on every round: remainder steps then
        # strictly shrink the submatrix minimum, which keeps entries small
        best = None
        for i in range(t, r):
            for j in range(t, c):
                if A[i][j] != 0 and (best is None
                                     or (abs(A[i][j]), i, j) < best):
                    best = (abs(A[i][j]), i, j)
        if best is None:
            break
        _, pi, pj = best
        if pi != t:
            swap_rows(t, pi)
        if pj != t:
            swap_cols(t, pj)
        p = A[t][t]
        i = next((i for i in range(t + 1, r) if A[i][t] % p), None)
        if i is not None:
            row_sub(i, t, A[i][t] // p)   # leaves |remainder| < |p|
            continue
        j = next((j for j in range(t + 1, c) if A[t][j] % p), None)
        if j is not None:
            col_sub(j, t, A[t][j] // p)
            continue
        for i in range(t + 1, r):         # exact elimination
            if A[i][t]:
                row_sub(i, t, A[i][t] // p)
        for j in range(t + 1, c):
            if A[t][j]:
                col_sub(j, t, A[t][j] // p)
        bad = next((i for i in range(t + 1, r)
                    for j in range(t + 1, c) if A[i][j] % p), None)
        if bad is not None:
            A[t] = [x + y for x, y in zip(A[t], A[bad])]
            U[t] = [x + y for x, y in zip(U[t], U[bad])]
            continue
        if p < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    return (IntMatrix(U, rows=r, cols=r),
            IntMatrix(A, rows=r, cols=c),
            IntMatrix(V, rows=c, cols=c))


def _snf_diagonal(S: IntMatrix) -> list:
    return [S.entries[i][i] for i in range(min(S.rows, S.cols))
            if S.entries[i][i] != 0]


def lattice_basis(M: IntMatrix) -> IntMatrix:
    """Basis (columns) of the lattice generated by the columns of M."""
    U, S, _V = smith_normal_form(M)
    diag = _snf_diagonal(S)
    uinv = U.inverse_unimodular()
    cols = [tuple(uinv.entries[i][k] * diag[k] for i in range(M.rows))
            for k in range(len(diag))]
    return IntMatrix.from_columns(cols, M.rows)


def solve_in_lattice(B: IntMatrix, targets: IntMatrix) -> Optional[IntMatrix]:
    """X with B @ X = targets over Z, or None. B must have independent cols."""
    U, S, V = smith_normal_form(B)
    rhs = U @ targets
    diag = [S.entries[i][i] for i in range(min(S.rows, S.cols))]
    Y = [[0] * targets.cols for _ in range(B.cols)]
    for j in range(targets.cols):
        for i in range(B.rows):
            d = diag[i] if i < len(diag) else 0
            v = rhs.entries[i][j]
            if d == 0:
                if v != 0:
                    return None
            else:
                if v % d != 0:
                    return None
                if i < B.cols:
                    Y[i][j] = v // d
    return V @ IntMatrix(Y, rows=B.cols, cols=targets.cols)


def kernel_basis(M: IntMatrix) -> IntMatrix:
    """Basis (columns) of {x : M @ x = 0}."""
    _U, S, V = smith_normal_form(M)
    rank = len(_snf_diagonal(S))
    cols = [V.column(j) for j in range(rank, M.cols)]
    return IntMatrix.from_columns(cols, M.cols)


def lattice_contains(B: IntMatrix, vectors: IntMatrix) -> bool:
    return solve_in_lattice(B, vectors) is not None


def lattice_sum(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    return lattice_basis(A.hstack(B))


def lattice_intersection(A: IntMatrix, B: IntMatrix) -> IntMatrix:
    ker = kernel_basis(A.hstack(-B))
    top = IntMatrix(ker.entries[:A.cols], rows=A.cols, cols=ker.cols)
    return lattice_basis(A @ top)


class FGAbelianGroup:
    """Subquotient K/L of Z^n; K and L are column-basis matrices, L ⊆ K."""

    def __init__(self, ambient_dim: int, sub: IntMatrix, rel: IntMatrix):
        if sub.rows != ambient_dim or rel.rows != ambient_dim:
            raise ValueError("basis matrices must live in the ambient lattice")
        self.ambient_dim = ambient_dim
        self.sub = lattice_basis(sub)
        self.rel = lattice_basis(rel)
        coords = solve_in_lattice(self.sub, self.rel)
        if coords is None:
            raise ValueError("relation lattice is not contained in the subgroup")
        self._coords = coords  # rel in sub-coordinates
        _U, S, _V = smith_normal_form(coords)
        diag = _snf_diagonal(S)
        self._coord_snf = (_U, S, _V)
        self.free_rank = self.sub.cols - len(diag)
        self.invariant_factors = tuple(d for d in diag if d > 1)

    # ------------------------------------------------------------- basics

    @classmethod
    def free(cls, n: int) -> "FGAbelianGroup":
        return cls(n, IntMatrix.identity(n), IntMatrix.zeros(n, 0))

    @classmethod
    def from_presentation(cls, relations: IntMatrix) -> "FGAbelianGroup":
        """Z^rows modulo the column span of `relations`."""
        return cls(relations.rows, IntMatrix.identity(relations.rows), relations)

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def order(self) -> Optional[int]:
        if not self.is_finite:
            return None
        return prod(self.invariant_factors)

    def describe(self) -> str:
        parts = ["Z"] * self.free_rank + [f"Z/{d}" for d in self.invariant_factors]
        return " + ".join(parts) if parts else "0"

    def __repr__(self) -> str:
        return f"FGAbelianGroup({self.describe()})"

    def same_ambient(self, other: "FGAbelianGroup") -> bool:
        return self.ambient_dim == other.ambient_dim

    # ------------------------------------------------------------ functors

    def _check_compatible(self, g: IntMatrix) -> None:
        if g.rows != self.ambient_dim or g.cols != self.ambient_dim:
            raise IncompatibleAction(
                f"operator must be {self.ambient_dim}x{self.ambient_dim}")
        if not lattice_contains(self.sub, g @ self.sub):
            raise IncompatibleAction("operator does not preserve the subgroup")
        if self.rel.cols and not lattice_contains(self.rel, g @ self.rel):
            raise IncompatibleAction("operator does not preserve the relations")

    def torsion(self) -> "FGAbelianGroup":
        """Subgroup of elements with m·x ∈ L for some m ≥ 1 (mod L)."""
        U, S, _V = self._coord_snf
        rank = len(_snf_diagonal(S))
        uinv = U.inverse_unimodular()
        cols = [uinv.column(i) for i in range(rank)]
        sat = IntMatrix.from_columns(cols, self.sub.cols)
        return FGAbelianGroup(self.ambient_dim, self.sub @ sat, self.rel)

    def p_torsion(self, p: int) -> "FGAbelianGroup":
        """Subgroup of elements of p-power order (mod L)."""
        if p < 2 or any(p % k == 0 for k in range(2, p)):
            raise ValueError(f"p = {p} is not prime")
        U, S, _V = self._coord_snf
        diag = _snf_diagonal(S)
        uinv = U.inverse_unimodular()
        cols = []
        for i, d in enumerate(diag):
            v = d
            while v % p == 0:
                v //= p
            # v = prime-to-p part; (v·e_i) has exact order p^{v_p(d)}
            cols.append(tuple(x * v for x in uinv.column(i)))
        gens = IntMatrix.from_columns(cols, self.sub.cols)
        return FGAbelianGroup(self.ambient_dim, self.sub @ gens, self.rel)


def cokernel(M: IntMatrix) -> FGAbelianGroup:
    return FGAbelianGroup.from_presentation(M)


def coinvariants(A: FGAbelianGroup, gens: Sequence[IntMatrix]) -> FGAbelianGroup:
    """A / <(g-1)a : g in gens>, for ambient operators preserving K and L."""
    rel = A.rel
    one = IntMatrix.identity(A.ambient_dim)
    for g in gens:
        A._check_compatible(g)
        rel = rel.hstack((g - one) @ A.sub)
    return FGAbelianGroup(A.ambient_dim, A.sub, rel)


def fixed_points(A: FGAbelianGroup, f: IntMatrix) -> FGAbelianGroup:
    """{a in A : f(a) = a}, for an ambient operator preserving K and L."""
    A._check_compatible(f)
    one = IntMatrix.identity(A.ambient_dim)
    stacked = ((f - one) @ A.sub).hstack(-A.rel)
    ker = kernel_basis(stacked)
    top = IntMatrix(ker.entries[:A.sub.cols], rows=A.sub.cols, cols=ker.cols)
    return FGAbelianGroup(A.ambient_dim, A.sub @ lattice_basis(top), A.rel)


def h1_cyclic(A: FGAbelianGroup, f: IntMatrix) -> FGAbelianGroup:
    """H^1 of the procyclic group generated by f, for finite A: the
    coinvariants A_f.  Requires f to induce an automorphism of A."""
    if not A.is_finite:
        raise NotFinite("H^1 of a procyclic group needs a finite module")
    A._check_compatible(f)
    ker = kernel_basis((f @ A.sub).hstack(-A.rel))
    top = IntMatrix(ker.entries[:A.sub.cols], rows=A.sub.cols, cols=ker.cols)
    injective = FGAbelianGroup(
        A.ambient_dim, A.sub @ lattice_basis(top), A.rel).is_trivial
    if not injective:
        raise NotAutomorphism("operator is not injective on the module")
    return coinvariants(A, [f])


@dataclass
class SubquotientMap:
    """Map K1/L1 -> K2/L2 induced by the identity of the shared ambient."""
    source: FGAbelianGroup
    target: FGAbelianGroup

    def __post_init__(self):
        if not self.source.same_ambient(self.target):
            raise ValueError("map needs a shared ambient lattice")

    def well_defined(self) -> bool:
        return (lattice_contains(self.target.sub, self.source.sub)
                and (self.source.rel.cols == 0
                     or lattice_contains(self.target.rel, self.source.rel)))

    def injective(self) -> bool:
        meet = lattice_intersection(self.source.sub, self.target.rel)
        return meet.cols == 0 or lattice_contains(self.source.rel, meet)

    def surjective(self) -> bool:
        return lattice_contains(
            lattice_sum(self.source.sub, self.target.rel), self.target.sub)

    def image(self) -> FGAbelianGroup:
        """The image, as a subgroup of the target."""
        return FGAbelianGroup(
            self.source.ambient_dim,
            lattice_sum(self.source.sub, self.target.rel), self.target.rel)

    def kernel(self) -> FGAbelianGroup:
        """The kernel, as a subgroup of the source."""
        meet = lattice_intersection(self.source.sub, self.target.rel)
        return FGAbelianGroup(
            self.source.ambient_dim,
            lattice_sum(meet, self.source.rel), self.source.rel)
