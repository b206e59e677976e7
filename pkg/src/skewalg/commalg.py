"""Small commutative linear algebra helpers shared by several modules.

Everything here works on lists of lists of ring elements supporting ``+``,
``-``, ``*``; no division is used except in :func:`solve_field`.
"""

from __future__ import annotations

from typing import Callable, Sequence

from .errors import SingularAtPrecision


def berkowitz(A: Sequence[Sequence], one, zero) -> list:
    """Coefficients of det(lambda*I - A), highest degree first.

    Division-free, so valid over any commutative ring.
    """
    n = len(A)
    vect = [one]
    for r in range(1, n + 1):
        a = A[r - 1][r - 1]
        R = [A[r - 1][j] for j in range(r - 1)]
        S = [A[i][r - 1] for i in range(r - 1)]
        col = [one, -a]
        cur = S
        for k in range(r - 1):
            acc = zero
            for x, y in zip(R, cur):
                acc = acc + x * y
            col.append(-acc)
            if k < r - 2:
                cur = [_dot(A[i][: r - 1], cur, zero) for i in range(r - 1)]
        new = []
        for i in range(r + 1):
            acc = zero
            for j in range(min(i + 1, len(vect))):
                acc = acc + col[i - j] * vect[j]
            new.append(acc)
        vect = new
    return vect


def _dot(row, vec, zero):
    acc = zero
    for x, y in zip(row, vec):
        acc = acc + x * y
    return acc


def det_berkowitz(A: Sequence[Sequence], one, zero):
    n = len(A)
    if n == 0:
        return one
    c = berkowitz(A, one, zero)[-1]
    return -c if n % 2 else c


def solve_field(A: Sequence[Sequence], b: Sequence, valuation: Callable) -> list:
    """Solve A x = b over a discretely valued field, pivoting on minimal valuation.

    ``valuation`` returns None for zero elements.
    """
    n = len(A)
    M = [list(row) + [bi] for row, bi in zip(A, b)]
    for col in range(n):
        best, best_v = None, None
        for r in range(col, n):
            v = valuation(M[r][col])
            if v is not None and (best_v is None or v < best_v):
                best, best_v = r, v
        if best is None:
            raise SingularAtPrecision("matrix is singular at the working precision")
        M[col], M[best] = M[best], M[col]
        inv = M[col][col].inv()
        M[col] = [x * inv for x in M[col]]
        for r in range(n):
            if r != col:
                f = M[r][col]
                if f:
                    M[r] = [x - f * y for x, y in zip(M[r], M[col])]
    return [M[i][n] for i in range(n)]


def matmul(A, B, zero):
    return [[_dot(row, col, zero) for col in zip(*B)] for row in A]
