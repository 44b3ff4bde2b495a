"""Exact sparse linear algebra over the rationals.

Rows are dicts mapping column index to a nonzero :class:`Fraction`.
Elimination keeps every pivot row with its pivot as the smallest column,
so reducing a new row only ever introduces larger columns.
"""
from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Iterable, Mapping

from .core import ONE, ZERO, InvariantViolation


def echelon(rows: Iterable[Mapping[int, Fraction]]) -> dict[int, dict[int, Fraction]]:
    """Row-echelon form as ``{pivot_column: row}`` with unit pivots."""
    pivots: dict[int, dict[int, Fraction]] = {}
    for raw in rows:
        r = {c: Fraction(v) for c, v in raw.items() if v}
        heap = list(r)
        heapq.heapify(heap)
        while heap:
            c = heapq.heappop(heap)
            coef = r.get(c)
            if not coef:
                continue
            piv = pivots.get(c)
            if piv is None:
                continue
            for j, v in piv.items():
                nv = r.get(j, ZERO) - coef * v
                if nv:
                    if j not in r:
                        heapq.heappush(heap, j)
                    r[j] = nv
                else:
                    r.pop(j, None)
        if r:
            lead = min(r)
            inv = 1 / r[lead]
            pivots[lead] = {j: v * inv for j, v in r.items()}
    return pivots


def nullspace(rows: Iterable[Mapping[int, Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of ``{x : A x = 0}`` for the sparse matrix ``A`` given by ``rows``."""
    pivots = echelon(rows)
    free = [c for c in range(ncols) if c not in pivots]
    order = sorted(pivots, reverse=True)
    basis = []
    for f in free:
        x = [ZERO] * ncols
        x[f] = ONE
        for c in order:
            s = ZERO
            for j, v in pivots[c].items():
                if j != c and x[j]:
                    s += v * x[j]
            x[c] = -s
        basis.append(x)
    return basis


def stationary_vector(matrix: list[Mapping[int, Fraction]]) -> list[Fraction]:
    """Unique probability vector ``pi`` with ``pi P = pi`` for row-stochastic ``P``.

    Solves the nullspace of ``P^T - I``; raises :class:`InvariantViolation`
    unless it is one-dimensional.
    """
    n = len(matrix)
    cols: list[dict[int, Fraction]] = [dict() for _ in range(n)]
    for i, row in enumerate(matrix):
        for j, v in row.items():
            cols[j][i] = cols[j].get(i, ZERO) + v
    for j in range(n):
        cols[j][j] = cols[j].get(j, ZERO) - 1
    basis = nullspace(cols, n)
    if len(basis) != 1:
        raise InvariantViolation(f"stationary solution space has dimension {len(basis)}, expected 1")
    v = basis[0]
    total = sum(v, ZERO)
    if total == 0:
        raise InvariantViolation("stationary direction sums to zero")
    return [x / total for x in v]
