"""Small dense linear algebra over the rationals.

Matrices are lists of lists of Fractions.  Sizes here are tiny (n <= ~6), so
plain Gauss-Jordan elimination is all that is needed.
"""

from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence

Matrix = List[List[Fraction]]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def _row_reduce(m: Matrix) -> tuple[Matrix, list[int]]:
    m = [row[:] for row in m]
    pivots: list[int] = []
    r = 0
    ncols = len(m[0]) if m else 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m, pivots


def rank(m: Sequence[Sequence]) -> int:
    if not m:
        return 0
    return len(_row_reduce(to_matrix(m))[1])


def solve(a: Sequence[Sequence], b: Sequence) -> Optional[list[Fraction]]:
    """Unique solution of the square system ``a x = b``, or None if singular."""
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(a, b)]
    red, pivots = _row_reduce(aug)
    if pivots != list(range(n)):
        return None
    return [red[i][n] for i in range(n)]


def det(a: Sequence[Sequence]) -> Fraction:
    m = to_matrix(a)
    n = len(m)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pivot = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot is None:
            return Fraction(0)
        if pivot != c:
            m[c], m[pivot] = m[pivot], m[c]
            sign = -sign
        result *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return sign * result


def inverse(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(int(i == j)) for j in range(n)]
           for i, row in enumerate(a)]
    red, pivots = _row_reduce(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def null_vector(rows: Sequence[Sequence], n: int) -> Optional[list[Fraction]]:
    """A nonzero vector orthogonal to every row when the rows have rank n-1."""
    if not rows:
        return [Fraction(1)] if n == 1 else None
    red, pivots = _row_reduce(to_matrix(rows))
    free = [c for c in range(n) if c not in pivots]
    if len(free) != 1:
        return None
    f = free[0]
    v = [Fraction(0)] * n
    v[f] = Fraction(1)
    for i, p in enumerate(pivots):
        v[p] = -red[i][f]
    return v


def affine_rank(points: Sequence[Sequence]) -> int:
    if len(points) <= 1:
        return 0
    base = points[0]
    return rank([[Fraction(x) - Fraction(y) for x, y in zip(p, base)] for p in points[1:]])
