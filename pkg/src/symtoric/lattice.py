"""Exact integer and rational linear algebra.

Vectors are plain tuples of Python ints (lattice points) or of
``fractions.Fraction`` (rational points). Matrices are tuples of row tuples.
Nothing in this module touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence

LatticeVector = tuple[int, ...]
RationalVector = tuple[Fraction, ...]
IntMatrix = tuple[tuple[int, ...], ...]


def as_int_matrix(rows: Iterable[Iterable[int]]) -> IntMatrix:
    return tuple(tuple(int(x) for x in row) for row in rows)


def identity_matrix(n: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def transpose(a: Sequence[Sequence]) -> tuple:
    return tuple(zip(*a))


def mat_mul(a: Sequence[Sequence], b: Sequence[Sequence]) -> tuple:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def mat_vec(a: Sequence[Sequence], v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in a)


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def determinant(a: Sequence[Sequence[int]]) -> int:
    """Exact determinant of a square integer matrix (Bareiss elimination)."""
    n = len(a)
    if n == 0:
        return 1
    m = [list(row) for row in a]
    if any(len(row) != n for row in m):
        raise ValueError("determinant of a non-square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def solve_rational(a: Sequence[Sequence], b: Sequence) -> RationalVector:
    """Solve the square system ``a x = b`` exactly; raises on a singular matrix."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(rhs)] for row, rhs in zip(a, b)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[col], m[piv] = m[piv], m[col]
        p = m[col][col]
        m[col] = [x / p for x in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                f = m[r][col]
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return tuple(m[r][n] for r in range(n))


def inverse_rational(a: Sequence[Sequence]) -> tuple[tuple[Fraction, ...], ...]:
    n = len(a)
    cols = [solve_rational(a, [int(i == j) for i in range(n)]) for j in range(n)]
    return transpose(cols)


def primitive(v: Sequence[int]) -> LatticeVector:
    """Divide ``v`` by the gcd of its coordinates.

    >>> primitive((-3, 6, 9))
    (-1, 2, 3)
    """
    v = tuple(int(x) for x in v)
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("zero ray")
    return tuple(x // g for x in v)


@dataclass(frozen=True)
class UnimodularMap:
    """An element of GL(n, Z), acting on column vectors by ``matrix @ v``."""

    matrix: IntMatrix

    def __post_init__(self):
        m = as_int_matrix(self.matrix)
        object.__setattr__(self, "matrix", m)
        n = len(m)
        if any(len(row) != n for row in m):
            raise ValueError("unimodular map must be square")
        if abs(determinant(m)) != 1:
            raise ValueError(f"matrix is not unimodular: {m}")

    @classmethod
    def identity(cls, n: int) -> "UnimodularMap":
        return cls(identity_matrix(n))

    @property
    def dim(self) -> int:
        return len(self.matrix)

    @property
    def det(self) -> int:
        return determinant(self.matrix)

    def __call__(self, v: Sequence[int]) -> LatticeVector:
        return mat_vec(self.matrix, v)

    def __matmul__(self, other: "UnimodularMap") -> "UnimodularMap":
        return UnimodularMap(mat_mul(self.matrix, other.matrix))

    def inverse(self) -> "UnimodularMap":
        inv = inverse_rational(self.matrix)
        return UnimodularMap(tuple(tuple(int(x) for x in row) for row in inv))

    def transpose(self) -> "UnimodularMap":
        return UnimodularMap(transpose(self.matrix))

    def dual(self) -> "UnimodularMap":
        """Contragredient action (inverse transpose), preserving the pairing."""
        return self.inverse().transpose()

    def is_identity(self) -> bool:
        return self.matrix == identity_matrix(self.dim)

    def order(self, limit: int = 10_000) -> int:
        g = self
        for k in range(1, limit + 1):
            if g.is_identity():
                return k
            g = g @ self
        raise ValueError("element order exceeds limit")


def smith_normal_form(a: Sequence[Sequence[int]]):
    """Smith normal form with transforms: returns ``(U, S, V)`` with ``U A V = S``.

    ``S`` has the shape of ``A``, nonnegative diagonal entries ``d1 | d2 | ...``
    and zeros elsewhere. ``U`` and ``V`` are :class:`UnimodularMap` instances.
    """
    s = [list(int(x) for x in row) for row in a]
    m = len(s)
    n = len(s[0]) if m else 0
    u = [list(row) for row in identity_matrix(m)]
    v = [list(row) for row in identity_matrix(n)]

    def swap_rows(i, j):
        s[i], s[j] = s[j], s[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for row in s:
            row[i], row[j] = row[j], row[i]
        for row in v:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row_dst += q * row_src
        s[dst] = [x + q * y for x, y in zip(s[dst], s[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for row in s:
            row[dst] += q * row[src]
        for row in v:
            row[dst] += q * row[src]

    for t in range(min(m, n)):
        nonzero = [(abs(s[i][j]), i, j) for i in range(t, m) for j in range(t, n) if s[i][j]]
        if not nonzero:
            break
        _, i, j = min(nonzero)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            for i in range(t + 1, m):
                if s[i][t]:
                    add_row(i, t, -(s[i][t] // s[t][t]))
            for j in range(t + 1, n):
                if s[t][j]:
                    add_col(j, t, -(s[t][j] // s[t][t]))
            rest = [(abs(s[i][t]), i, None) for i in range(t + 1, m) if s[i][t]]
            rest += [(abs(s[t][j]), None, j) for j in range(t + 1, n) if s[t][j]]
            if rest:
                _, i, j = min(rest, key=lambda r: r[0])
                if i is not None:
                    swap_rows(t, i)
                else:
                    swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if s[i][j] % s[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if s[t][t] < 0:
            s[t] = [-x for x in s[t]]
            u[t] = [-x for x in u[t]]

    return UnimodularMap(u), as_int_matrix(s), UnimodularMap(v)


def matrix_rank(a: Sequence[Sequence[int]]) -> int:
    if not a:
        return 0
    _, s, _ = smith_normal_form(a)
    return sum(1 for i in range(min(len(s), len(s[0]))) if s[i][i])


def row_echelon_basis(vectors: Iterable[Sequence]) -> list[RationalVector]:
    """Reduced row echelon basis of the rational span of ``vectors``."""
    rows = [[Fraction(x) for x in v] for v in vectors]
    if not rows:
        return []
    ncols = len(rows[0])
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        rows[r] = [x / p for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        r += 1
    basis = rows[:r]
    return [tuple(row) for row in basis]


def rational_kernel(a: Sequence[Sequence[int]], ncols: int | None = None) -> list[RationalVector]:
    """Basis of ``{x : A x = 0}`` over Q, in reduced row echelon form.

    The kernel is read off the Smith form: if ``U A V = S`` has rank ``r``, the
    last ``n - r`` columns of ``V`` span it. An empty list means the kernel is 0.
    ``ncols`` is needed only when ``a`` has no rows.
    """
    if not a:
        if ncols is None:
            raise ValueError("ncols required for an empty matrix")
        return row_echelon_basis(identity_matrix(ncols))
    _, s, v = smith_normal_form(a)
    n = len(a[0])
    rank = sum(1 for i in range(min(len(s), n)) if s[i][i])
    cols = transpose(v.matrix)
    return row_echelon_basis(cols[rank:])


def fixed_subspace(maps: Iterable[UnimodularMap]) -> list[RationalVector]:
    """Common fixed space of ``maps`` (intersection of the kernels of g - 1)."""
    maps = list(maps)
    if not maps:
        raise ValueError("fixed_subspace needs at least one map")
    n = maps[0].dim
    rows = []
    for g in maps:
        if g.dim != n:
            raise ValueError("dimension mismatch")
        for i, row in enumerate(g.matrix):
            rows.append(tuple(x - (i == j) for j, x in enumerate(row)))
    return rational_kernel(rows)
