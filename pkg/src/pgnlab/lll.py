"""Exact LLL reduction of small integer bases.

Only the unimodular transform matters to callers: it conditions the
enumeration basis.  Exact rational Gram-Schmidt keeps the reduction
deterministic across platforms.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence


def lll_reduce(columns: Sequence[Sequence[int]], delta: Fraction = Fraction(99, 100)):
    """LLL-reduce the lattice spanned by ``columns`` (linearly independent).

    Returns ``(reduced_columns, U)`` where ``U`` is a unimodular integer matrix
    (list of rows) with ``reduced[:, j] = sum_i columns[:, i] * U[i][j]``.
    """
    b = [list(map(int, c)) for c in columns]
    k_dim = len(b)
    U = [[int(i == j) for j in range(k_dim)] for i in range(k_dim)]  # columns of U track b

    def gram_schmidt():
        bstar, mu, norms = [], [[Fraction(0)] * k_dim for _ in range(k_dim)], []
        for i in range(k_dim):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                mu[i][j] = sum(x * y for x, y in zip(b[i], bstar[j])) / norms[j]
                v = [a - mu[i][j] * c for a, c in zip(v, bstar[j])]
            bstar.append(v)
            norms.append(sum(x * x for x in v))
        return bstar, mu, norms

    bstar, mu, norms = gram_schmidt()
    k = 1
    guard = 0
    while k < k_dim:
        guard += 1
        if guard > 100000:  # pragma: no cover - defensive
            raise RuntimeError("LLL failed to terminate")
        for j in range(k - 1, -1, -1):
            q = round(mu[k][j])
            if q:
                b[k] = [x - q * y for x, y in zip(b[k], b[j])]
                for row in U:
                    row[k] -= q * row[j]
                for l in range(j + 1):
                    mu[k][l] -= q * (mu[j][l] if l < j else 1)
        if norms[k] >= (delta - mu[k][k - 1] ** 2) * norms[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            for row in U:
                row[k], row[k - 1] = row[k - 1], row[k]
            bstar, mu, norms = gram_schmidt()
            k = max(k - 1, 1)
    return b, U


def scaled_integer_columns(matrix, bits: int) -> list[list[int]]:
    """Columns of ``round(matrix * 2**bits)`` for a real (float or Fraction) matrix."""
    rows = len(matrix)
    cols = len(matrix[0])
    scale = 1 << bits
    return [[int(math.floor(Fraction(matrix[i][j]) * scale + Fraction(1, 2))) for i in range(rows)]
            for j in range(cols)]
