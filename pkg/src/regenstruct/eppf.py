"""Ewens and two-parameter partition probability functions.

Also houses :class:`PartitionDistribution` and the one-step sampling
projection that tests whether consecutive levels form a partition
structure.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Callable, Iterable, Mapping

from .core import (
    ONE,
    ZERO,
    DomainError,
    Partition,
    ValidationError,
    as_fraction,
    enumerate_partitions,
    rising_factorial,
)


@dataclass(frozen=True)
class PartitionDistribution:
    """Exact law of a random partition of ``n``.

    Partitions missing from ``probs`` have probability zero.
    """

    n: int
    probs: Mapping[Partition, Fraction] = field(compare=False)

    def __post_init__(self):
        for lam, p in self.probs.items():
            if lam.n != self.n:
                raise ValidationError(f"{lam} is not a partition of {self.n}")

    def __getitem__(self, lam: Partition) -> Fraction:
        if lam.is_empty() and self.n == 0:
            return ONE
        return self.probs.get(lam, ZERO)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PartitionDistribution) or other.n != self.n:
            return NotImplemented
        keys = set(self.probs) | set(other.probs)
        return all(self[k] == other[k] for k in keys)

    def total(self) -> Fraction:
        return sum(self.probs.values(), ZERO)

    def support(self) -> list[Partition]:
        return [lam for lam, p in self.probs.items() if p != 0]

    def items(self):
        """Pairs ``(partition, probability)`` over all partitions of ``n``."""
        return [(lam, self[lam]) for lam in enumerate_partitions(self.n)]

    def is_distribution(self) -> bool:
        return all(p >= 0 for p in self.probs.values()) and self.total() == 1

    @classmethod
    def from_function(cls, n: int, fn: Callable[[Partition], Fraction]) -> "PartitionDistribution":
        return cls(n, {lam: Fraction(fn(lam)) for lam in enumerate_partitions(n)})

    @classmethod
    def point_mass(cls, lam: Partition) -> "PartitionDistribution":
        return cls(lam.n, {lam: ONE})


Levels = dict  # dict[int, PartitionDistribution], keys 1..n


def make_levels(dists: Iterable[PartitionDistribution]) -> Levels:
    levels = {d.n: d for d in dists}
    n = max(levels, default=0)
    if sorted(levels) != list(range(1, n + 1)):
        raise ValidationError(f"levels must be 1..n without gaps, got {sorted(levels)}")
    return levels


def p_of(levels: Levels, lam: Partition) -> Fraction:
    """Probability of ``lam`` at its own level; the empty partition has mass 1."""
    if lam.is_empty():
        return ONE
    return levels[lam.n][lam]


@dataclass(frozen=True)
class TwoParamModel:
    """Parameters of the two-parameter family.

    The default range is ``0 <= alpha <= 1, theta >= 0``.  With
    ``extended_range`` the pairs ``0 < alpha < 1, theta > -alpha`` are also
    admitted; those are partition structures but not regenerative ones.
    """

    alpha: Fraction
    theta: Fraction
    extended_range: bool = False

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_fraction(self.alpha))
        object.__setattr__(self, "theta", as_fraction(self.theta))
        a, t = self.alpha, self.theta
        if 0 <= a <= 1 and t >= 0:
            return
        if self.extended_range and 0 < a < 1 and t > -a:
            return
        where = "extended range 0<alpha<1, theta>-alpha" if self.extended_range else \
            "range 0<=alpha<=1, theta>=0"
        raise DomainError(f"(alpha, theta) = ({a}, {t}) outside the {where}")

    @classmethod
    def ewens(cls, theta) -> "TwoParamModel":
        return cls(ZERO, as_fraction(theta))

    def __str__(self) -> str:
        return f"({self.alpha},{self.theta})"


def eppf_two_param(model: TwoParamModel, lam: Partition) -> Fraction:
    """Two-parameter sampling formula evaluated at ``lam``.

    At ``theta = 0`` the leading ``theta`` of numerator and denominator is
    cancelled, which also covers the one-block case ``alpha = theta = 0``.
    """
    n, ell = lam.n, lam.length
    a, t = model.alpha, model.theta
    blocks = ONE
    for r, ar in lam.multiplicities.items():
        blocks *= (rising_factorial(1 - a, r - 1) / factorial(r)) ** ar / factorial(ar)
    if t == 0:
        lead = a ** (ell - 1) * factorial(ell - 1) / Fraction(factorial(n - 1))
    else:
        lead = rising_factorial(t, ell, a) / rising_factorial(t, n)
    return factorial(n) * lead * blocks


def eppf_ewens(theta, lam: Partition) -> Fraction:
    """Ewens sampling formula ``n! theta^l / (theta)_n  prod 1/(r^a_r a_r!)``."""
    theta = as_fraction(theta)
    if theta < 0:
        raise DomainError("Ewens formula needs theta >= 0")
    n, ell = lam.n, lam.length
    if theta == 0:
        return ONE if ell == 1 else ZERO
    out = factorial(n) * theta ** ell / rising_factorial(theta, n)
    for r, ar in lam.multiplicities.items():
        out /= r ** ar * factorial(ar)
    return out


def partition_distribution(model: TwoParamModel, n: int) -> PartitionDistribution:
    dist = PartitionDistribution.from_function(n, lambda lam: eppf_two_param(model, lam))
    if model.extended_range and not dist.is_distribution():
        raise ValidationError(f"two-parameter formula at {model} is not a distribution at n={n}")
    return dist


def model_levels(model: TwoParamModel, n: int) -> Levels:
    return {m: partition_distribution(model, m) for m in range(1, n + 1)}


def project_one_level(dist: PartitionDistribution) -> PartitionDistribution:
    """Law of the partition of ``n`` left after sampling ``n`` of ``n+1`` balls.

    For each target ``lam`` of ``n`` the mass comes from ``lam + {1}`` with
    weight ``(a_1+1)/(n+1)`` and from every ``lam - {s} + {s+1}`` with weight
    ``(s+1)(a_{s+1}+1)/(n+1)``.
    """
    n = dist.n - 1
    if n < 1:
        raise DomainError("projection needs a distribution on n+1 >= 2")
    out = {}
    for lam in enumerate_partitions(n):
        total = dist[lam.add_part(1)] * (lam.a(1) + 1) / (n + 1)
        for s in lam.distinct_parts:
            m = lam.multiplicities
            m[s] -= 1
            m[s + 1] = m.get(s + 1, 0) + 1
            total += dist[Partition.from_multiplicities(m)] * Fraction((s + 1) * (lam.a(s + 1) + 1), n + 1)
        out[lam] = total
    return PartitionDistribution(n, out)


def project_to(dist: PartitionDistribution, m: int) -> PartitionDistribution:
    while dist.n > m:
        dist = project_one_level(dist)
    return dist


def levels_by_projection(dist: PartitionDistribution) -> Levels:
    """Levels ``1..n`` obtained by repeated sampling from a law at level ``n``."""
    levels = {dist.n: dist}
    while dist.n > 1:
        dist = project_one_level(dist)
        levels[dist.n] = dist
    return levels


def consistency_residual(dist_hi: PartitionDistribution, dist_lo: PartitionDistribution) -> Fraction:
    """Largest discrepancy between the projection of ``dist_hi`` and ``dist_lo``."""
    if dist_hi.n != dist_lo.n + 1:
        raise DomainError("consistency_residual needs levels n+1 and n")
    proj = project_one_level(dist_hi)
    keys = set(proj.probs) | set(dist_lo.probs)
    return max((abs(proj[k] - dist_lo[k]) for k in keys), default=ZERO)


def check_consistent(levels: Levels) -> None:
    """Raise :class:`ValidationError` naming the first inconsistent level."""
    n = max(levels)
    for m in range(1, n + 1):
        if m not in levels:
            raise ValidationError(f"level {m} missing")
        if not levels[m].is_distribution():
            raise ValidationError(f"level {m} is not a probability distribution")
    for m in range(1, n):
        res = consistency_residual(levels[m + 1], levels[m])
        if res != 0:
            raise ValidationError(
                f"levels {m + 1} and {m} are not sampling consistent (residual {res})")
