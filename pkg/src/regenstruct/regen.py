"""Decrement matrices and the correspondence between ``q(n, .)``,
regenerative compositions and regenerative partitions.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Sequence

from .core import (
    ONE,
    ZERO,
    AmbiguityError,
    DomainError,
    Partition,
    as_fraction,
    check_composition,
    delete_part,
    draw_index,
    enumerate_compositions,
    enumerate_partitions,
    hook,
    hypergeometric_weight,
    ones,
)
from .core import rising_factorial as rf
from .eppf import Levels, PartitionDistribution, TwoParamModel, check_consistent, p_of
from .kernels import DecrementRow, as_row
from .linalg import echelon


class DecrementMatrix:
    """Triangular array ``q(m, j)``, ``1 <= j <= m <= n_max``."""

    __slots__ = ("_rows", "_hash")

    def __init__(self, rows: Iterable):
        self._rows = tuple(as_row(r) for r in rows)
        for m, row in enumerate(self._rows, 1):
            if row.n != m:
                raise DomainError(f"row {m} has {row.n} entries")
        self._hash = hash(self._rows)

    @property
    def n_max(self) -> int:
        return len(self._rows)

    def row(self, m: int) -> DecrementRow:
        if not 1 <= m <= self.n_max:
            raise DomainError(f"level {m} outside 1..{self.n_max}")
        return self._rows[m - 1]

    def q(self, m: int, j: int) -> Fraction:
        return self.row(m)[j]

    @property
    def rows(self) -> tuple[DecrementRow, ...]:
        return self._rows

    def __eq__(self, other):
        return isinstance(other, DecrementMatrix) and self._rows == other._rows

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"DecrementMatrix(n_max={self.n_max})"


@dataclass(frozen=True)
class CompositionDistribution:
    """Exact law of a random composition of ``n``; missing entries are zero."""

    n: int
    probs: dict

    def __getitem__(self, c) -> Fraction:
        return self.probs.get(tuple(c), ZERO)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CompositionDistribution) or other.n != self.n:
            return NotImplemented
        return all(self[c] == other[c] for c in set(self.probs) | set(other.probs))

    __hash__ = None

    def total(self) -> Fraction:
        return sum(self.probs.values(), ZERO)


# --------------------------------------------------------------------------
# q(n,.) -> lower rows

def hypergeometric_mixture(q_row: DecrementRow, m: int) -> list[Fraction]:
    """``q0(m, k)`` for ``k = 0..m``: the sampled occupancy of the deleted box."""
    n = q_row.n
    return [sum((q_row[x] * hypergeometric_weight(n, m, x, k) for x in range(1, n + 1)), ZERO)
            for k in range(m + 1)]


def hypgeom_project(q_row, m: int) -> DecrementRow:
    """Row at level ``m`` induced by ``q(n, .)``: ``q0(m,k) / (1 - q0(m,0))``."""
    q_row = as_row(q_row)
    if not 1 <= m <= q_row.n:
        raise DomainError(f"projection level {m} outside 1..{q_row.n}")
    if m == q_row.n:
        return q_row
    q0 = hypergeometric_mixture(q_row, m)
    hit = 1 - q0[0]
    return DecrementRow(v / hit for v in q0[1:])


def full_matrix(q_row) -> DecrementMatrix:
    q_row = as_row(q_row)
    return DecrementMatrix(hypgeom_project(q_row, m) for m in range(1, q_row.n + 1))


# --------------------------------------------------------------------------
# laws generated by a decrement matrix

def composition_probability(Q: DecrementMatrix, c: Sequence[int]) -> Fraction:
    """Residual-allocation probability ``prod_j q(c_j + ... + c_l, c_j)``."""
    c = check_composition(c)
    remaining = sum(c)
    if remaining > Q.n_max:
        raise DomainError(f"composition of {remaining} exceeds matrix level {Q.n_max}")
    out = ONE
    for part in c:
        out *= Q.q(remaining, part)
        if out == 0:
            return ZERO
        remaining -= part
    return out


def partition_probability(Q: DecrementMatrix, lam: Partition) -> Fraction:
    """Total probability of the compositions that rank to ``lam``.

    Evaluated by conditioning on the first part, which sums the same
    products as a walk over the distinct orderings of ``lam``.
    """
    if lam.n > Q.n_max:
        raise DomainError(f"partition of {lam.n} exceeds matrix level {Q.n_max}")
    return _partition_probability(Q, lam)


@lru_cache(maxsize=65536)
def _partition_probability(Q: DecrementMatrix, lam: Partition) -> Fraction:
    if lam.is_empty():
        return ONE
    row = Q.row(lam.n)
    total = ZERO
    for x in lam.distinct_parts:
        if row[x]:
            total += row[x] * _partition_probability(Q, delete_part(lam, x))
    return total


def composition_distribution(Q: DecrementMatrix, n: int) -> CompositionDistribution:
    return CompositionDistribution(n, {c: composition_probability(Q, c) for c in enumerate_compositions(n)})


def partition_law(Q: DecrementMatrix, n: int) -> PartitionDistribution:
    return PartitionDistribution.from_function(n, lambda lam: partition_probability(Q, lam))


def matrix_levels(Q: DecrementMatrix, n: int | None = None) -> Levels:
    n = Q.n_max if n is None else n
    return {m: partition_law(Q, m) for m in range(1, n + 1)}


def sample_composition(Q: DecrementMatrix, n: int, rng: random.Random) -> tuple[int, ...]:
    """Residual allocation: draw each part from ``q(remaining, .)``."""
    if n > Q.n_max:
        raise DomainError(f"n={n} exceeds matrix level {Q.n_max}")
    parts = []
    while n:
        x = draw_index(Q.row(n).as_tuple(), rng) + 1
        parts.append(x)
        n -= x
    return tuple(parts)


def drop_random_ball(law: CompositionDistribution) -> CompositionDistribution:
    """Push a composition law forward by deleting one uniformly chosen ball."""
    n = law.n
    out: dict = {}
    for c, p in law.probs.items():
        if p == 0:
            continue
        for i, ci in enumerate(c):
            smaller = c[:i] + ((ci - 1,) if ci > 1 else ()) + c[i + 1:]
            out[smaller] = out.get(smaller, ZERO) + p * Fraction(ci, n)
    return CompositionDistribution(n - 1, out)


# --------------------------------------------------------------------------
# p -> q

@dataclass(frozen=True)
class Witness:
    level: int
    item: object
    detail: str

    def __str__(self):
        return f"level {self.level}, {self.item}: {self.detail}"


class NotRegenerative(Exception):
    """The supplied partition structure admits no decrement matrix.

    ``rows`` holds the candidate rows computed before the failure.
    """

    def __init__(self, witness: Witness, rows: Sequence[DecrementRow] = ()):
        super().__init__(str(witness))
        self.witness = witness
        self.rows = tuple(rows)


def _solve_level(p_levels: Levels, m: int, below: DecrementRow | None) -> DecrementRow:
    """Solve for ``q(m, .)`` as an exact linear system.

    Equations: ``p(lam) = sum_y q(m,y) p(lam - {y})`` for every ``lam`` of
    ``m``, the row sum, and agreement of the projected row with ``below``.
    Used when the hook recursion would divide by a vanishing ``p(1^k)``.
    """
    rhs = m  # column holding the right-hand side
    eqs = []
    for lam in enumerate_partitions(m):
        eq = {y - 1: p_of(p_levels, delete_part(lam, y)) for y in lam.distinct_parts}
        eq[rhs] = -p_of(p_levels, lam)
        eqs.append(eq)
    eqs.append({**{x: ONE for x in range(m)}, rhs: -ONE})
    if below is not None:
        for j in range(1, m):
            eqs.append({x - 1: hypergeometric_weight(m, m - 1, x, j)
                        - below[j] * (1 - hypergeometric_weight(m, m - 1, x, 0))
                        for x in range(1, m + 1)})
    pivots = echelon(eqs)
    if rhs in pivots:
        raise NotRegenerative(Witness(m, None, "no decrement row reproduces p at this level"))
    free = [c for c in range(m) if c not in pivots]
    if free:
        raise AmbiguityError(f"p at level {m} leaves q({m}, {free[0] + 1}) undetermined")
    q = [ZERO] * m
    for c in sorted(pivots, reverse=True):
        q[c] = -sum((v * (q[j] if j < m else ONE) for j, v in pivots[c].items() if j != c), ZERO)
    return DecrementRow(q)


def candidate_rows(p_levels: Levels) -> list[DecrementRow]:
    """Rows ``q(m, .)``, ``m = 1..n``, that a regenerative ``p`` would force.

    Where possible only hook-shaped probabilities are used:
    ``q(m,1) = p(1^m)/p(1^(m-1))``, ``q(m,m) = p(m)``, and for ``1 < x < m``
    the expansion of ``p(x,1^(m-x))`` over the position of ``x`` among the
    singletons, in which the unknown ``q(m,x)`` appears once with
    coefficient ``p(1^(m-x))``.  Levels where some ``p(1^k)`` vanishes are
    solved as a linear system instead.  No validation is done here;
    entries may be negative.
    """
    n = max(p_levels)
    single = [p_of(p_levels, ones(k)) for k in range(n + 1)]
    if n >= 2 and single[2] == 0:
        # p(1,1) = 0: the one-block structure
        return [DecrementRow([ZERO] * (m - 1) + [ONE]) for m in range(1, n + 1)]
    rows: list[DecrementRow] = []
    for m in range(1, n + 1):
        if any(single[k] == 0 for k in range(m)):
            rows.append(_solve_level(p_levels, m, rows[-1] if rows else None))
            continue
        q = [ZERO] * m
        q[0] = single[m] / single[m - 1]
        for x in range(2, m):
            rhs = p_of(p_levels, hook(x, m - x))
            lead = ONE  # prod_{k=m-j+1..m} q(k,1)
            for j in range(1, m - x + 1):
                lead *= q[0] if j == 1 else rows[m - j].get(1)
                rhs -= lead * rows[m - j - 1].get(x) * single[m - x - j]
            q[x - 1] = rhs / single[m - x]
        if m > 1:
            q[m - 1] = p_of(p_levels, Partition([m]))
        rows.append(DecrementRow(q))
    return rows


def _row_problem(row: DecrementRow) -> Witness | None:
    for x, v in enumerate(row, 1):
        if v < 0:
            return Witness(row.n, x, f"negative entry q({row.n},{x}) = {v}")
        if v > 1:
            return Witness(row.n, x, f"entry q({row.n},{x}) = {v} exceeds 1")
    if row.total() != 1:
        return Witness(row.n, None, f"row sums to {row.total()}")
    return None


def invert_p_to_q(p_levels: Levels) -> DecrementRow:
    """The unique candidate ``q(n, .)`` for a structure given at levels ``1..n``.

    Raises :class:`NotRegenerative` when some forced row is not a
    probability distribution.
    """
    check_consistent(p_levels)
    rows = candidate_rows(p_levels)
    for i, row in enumerate(rows):
        w = _row_problem(row)
        if w is not None:
            raise NotRegenerative(w, rows[: i + 1])
    return rows[-1]


@dataclass(frozen=True)
class Verdict:
    regenerative: bool
    matrix: DecrementMatrix | None = None
    witness: Witness | None = None

    def __bool__(self):
        return self.regenerative


def regenerativity_check(p_levels: Levels) -> Verdict:
    """Recover ``q``, regenerate ``p*`` from it and compare with ``p`` exactly."""
    try:
        q = invert_p_to_q(p_levels)
    except NotRegenerative as exc:
        return Verdict(False, witness=exc.witness)
    Q = full_matrix(q)
    for m in sorted(p_levels):
        for lam in enumerate_partitions(m):
            star = partition_probability(Q, lam)
            if star != p_levels[m][lam]:
                return Verdict(False, witness=Witness(
                    m, lam, f"regenerated p* = {star} differs from p = {p_levels[m][lam]}"))
    return Verdict(True, matrix=Q)


# --------------------------------------------------------------------------
# closed form for the two-parameter family

def two_param_decrement(alpha, theta, n: int) -> DecrementRow:
    """``q(n, .)`` of the ``(alpha, theta)`` structure::

        q(n,m) = C(n,m) (1-alpha)_{m-1} (theta)_{n-m} ((n-m) alpha + m theta)
                 / (n (theta)_n)

    At ``theta = 0`` the common factor ``theta`` is cancelled.
    """
    model = TwoParamModel(alpha, theta)
    a, t = model.alpha, model.theta
    if n < 1:
        raise DomainError("n must be positive")
    q = []
    for m in range(1, n + 1):
        if t == 0:
            if m == n:
                v = rf(1 - a, n - 1) / rf(1, n - 1)
            else:
                # (theta)_{n-m}/(theta)_n -> (n-m-1)!/(n-1)!
                v = comb(n, m) * rf(1 - a, m - 1) * rf(1, n - m - 1) * (n - m) * a / (n * rf(1, n - 1))
        else:
            v = comb(n, m) * rf(1 - a, m - 1) * rf(t, n - m) * ((n - m) * a + m * t) / (n * rf(t, n))
        q.append(v)
    return DecrementRow(q)
