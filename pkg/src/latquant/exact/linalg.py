"""Exact dense linear algebra over Q or Q(sqrt d).

Matrices are tuples of row tuples whose entries are ``Fraction`` or
:class:`QuadElem` values.  Everything is plain Gaussian elimination; the
matrices in this package never exceed 16 x 16.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .quad import QuadElem

Matrix = tuple  # tuple[tuple[scalar, ...], ...]


def to_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(normalize(x) for x in row) for row in rows)


def normalize(x):
    """Collapse rational QuadElems to Fraction; keep others as-is."""
    if isinstance(x, QuadElem):
        return x.r if x.s == 0 else x
    if isinstance(x, bool):
        raise TypeError("bool entries are not allowed")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise TypeError(f"not an exact scalar: {x!r}")


def field_of(rows) -> int:
    """Common quadratic discriminant of the entries (1 when all rational)."""
    d = 1
    for row in rows:
        for x in row:
            if isinstance(x, QuadElem) and x.s != 0:
                if d not in (1, x.d):
                    raise ValueError(f"mixed fields sqrt({d}) and sqrt({x.d}) in one matrix")
                d = x.d
    return d


def shape(A: Matrix) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def transpose(A: Matrix) -> Matrix:
    return tuple(zip(*A))


def matmul(A: Matrix, B: Matrix) -> Matrix:
    n, k = shape(A)
    k2, m = shape(B)
    if k != k2:
        raise ValueError(f"shape mismatch {n}x{k} @ {k2}x{m}")
    Bt = transpose(B)
    out = []
    for row in A:
        out.append(tuple(normalize(_dot(row, col)) for col in Bt))
    return tuple(out)


def _dot(u, v):
    acc = Fraction(0)
    for a, b in zip(u, v):
        if a and b:
            acc = acc + a * b
    return acc


def vecmat(v: Sequence, A: Matrix) -> tuple:
    return tuple(normalize(_dot(v, col)) for col in transpose(A))


def scale(c, A: Matrix) -> Matrix:
    return tuple(tuple(normalize(c * x) for x in row) for row in A)


def _is_zero(x) -> bool:
    return not x


def det(A: Matrix):
    n, m = shape(A)
    if n != m:
        raise ValueError("determinant of a non-square matrix")
    M = [list(r) for r in A]
    sign = 1
    out = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if not _is_zero(M[r][c])), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            sign = -sign
        p = M[c][c]
        out = out * p
        inv = 1 / p
        for r in range(c + 1, n):
            if not _is_zero(M[r][c]):
                f = M[r][c] * inv
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return normalize(out * sign)


def solve_left(A: Matrix, b: Sequence) -> tuple:
    """Solve ``x A = b`` for row vector ``x`` (A square, nonsingular)."""
    sols = solve_left_many(A, [b])
    return sols[0]


def solve_left_many(A: Matrix, rhs: Sequence[Sequence]) -> list[tuple]:
    """Solve ``X A = R`` row by row; ``A`` square nonsingular."""
    At = transpose(A)
    n = len(At)
    k = len(rhs)
    # augmented [A^T | R^T]
    M = [list(At[i]) + [rhs[j][i] for j in range(k)] for i in range(n)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not _is_zero(M[r][c])), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        inv = 1 / M[c][c]
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and not _is_zero(M[r][c]):
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [tuple(normalize(M[i][n + j]) for i in range(n)) for j in range(k)]


def inverse(A: Matrix) -> Matrix:
    n = len(A)
    # rows of A^{-1} solve x A = e_i
    return tuple(solve_left_many(A, identity(n)))


def is_integer_matrix(A: Matrix) -> bool:
    return all(isinstance(x, Fraction) and x.denominator == 1 for row in A for x in row)


def is_symmetric(A: Matrix) -> bool:
    n = len(A)
    return all(A[i][j] == A[j][i] for i in range(n) for j in range(i + 1, n))


def leading_minors_positive(A: Matrix) -> bool:
    """Exact positive-definiteness test via an LDL^T sweep."""
    n = len(A)
    M = [list(r) for r in A]
    for c in range(n):
        p = M[c][c]
        if not (p > 0):
            return False
        for r in range(c + 1, n):
            f = M[r][c] / p
            if f:
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return True


def to_float(A: Matrix):
    import numpy as np

    return np.array([[float(x) for x in row] for row in A], dtype=float)


def common_denominator(A: Matrix) -> int:
    from math import lcm

    out = 1
    for row in A:
        for x in row:
            if not isinstance(x, Fraction):
                raise TypeError("common_denominator needs rational entries")
            out = lcm(out, x.denominator)
    return out
