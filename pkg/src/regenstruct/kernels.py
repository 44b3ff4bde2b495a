"""Deletion kernels, decrement rows and the regeneration identities."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .core import (
    ONE,
    ZERO,
    AmbiguityError,
    DomainError,
    InsufficientDataError,
    Partition,
    ValidationError,
    as_fraction,
    delete_part,
    enumerate_partitions,
    format_fraction,
)
from .eppf import Levels, PartitionDistribution, check_consistent, p_of


class DecrementRow:
    """A law ``q(n, .)`` on ``{1..n}``, indexed from 1.

    Negative entries are allowed so that failed inversions can be reported;
    :meth:`is_distribution` tells the two cases apart.
    """

    __slots__ = ("_q",)

    def __init__(self, values: Iterable):
        self._q = tuple(as_fraction(v) for v in values)
        if not self._q:
            raise DomainError("a decrement row needs n >= 1 entries")

    @property
    def n(self) -> int:
        return len(self._q)

    def __getitem__(self, x: int) -> Fraction:
        if not 1 <= x <= len(self._q):
            raise IndexError(f"part size {x} outside 1..{self.n}")
        return self._q[x - 1]

    def get(self, x: int) -> Fraction:
        return self._q[x - 1] if 1 <= x <= len(self._q) else ZERO

    def __iter__(self):
        return iter(self._q)

    def __len__(self) -> int:
        return len(self._q)

    def __eq__(self, other) -> bool:
        if isinstance(other, DecrementRow):
            return self._q == other._q
        if isinstance(other, (tuple, list)):
            return self._q == tuple(other)
        return NotImplemented

    def __hash__(self):
        return hash(self._q)

    def total(self) -> Fraction:
        return sum(self._q, ZERO)

    def negative_entries(self) -> list[int]:
        return [x for x, v in enumerate(self._q, 1) if v < 0]

    def is_distribution(self) -> bool:
        return not self.negative_entries() and self.total() == 1

    def as_tuple(self) -> tuple[Fraction, ...]:
        return self._q

    def __repr__(self) -> str:
        return "DecrementRow([" + ", ".join(format_fraction(v) for v in self._q) + "])"


# --------------------------------------------------------------------------
# kernels

class DeletionKernel:
    """Conditional law ``d(lam, x)`` of the size of the deleted part."""

    name = "kernel"

    def value(self, lam: Partition, x: int) -> Fraction:
        raise NotImplementedError

    def __call__(self, lam: Partition, x: int) -> Fraction:
        if x not in lam:
            raise DomainError(f"{x} is not a part of {lam}")
        return self.value(lam, x)


class TauKernel(DeletionKernel):
    """The one-parameter family interpolating size-biased (tau=0),
    uniform (tau=1/2) and cosize-biased (tau=1) deletion::

        d(lam, r) = a_r/n * ((n-r) tau + r (1-tau)) / (1 - tau + (l-1) tau)
    """

    def __init__(self, tau):
        tau = as_fraction(tau)
        if not 0 <= tau <= 1:
            raise DomainError(f"tau must lie in [0, 1], got {tau}")
        self.tau = tau

    @property
    def name(self) -> str:
        return {ZERO: "size-biased", Fraction(1, 2): "uniform", ONE: "cosize"}.get(
            self.tau, f"tau={format_fraction(self.tau)}")

    def value(self, lam, x):
        if lam.length == 1:
            return ONE
        n, t = lam.n, self.tau
        return Fraction(lam.a(x), n) * ((n - x) * t + x * (1 - t)) / (1 - t + (lam.length - 1) * t)

    def __eq__(self, other):
        return isinstance(other, TauKernel) and other.tau == self.tau

    def __hash__(self):
        return hash(("tau", self.tau))

    def __repr__(self):
        return f"TauKernel({format_fraction(self.tau)})"


SIZE_BIASED = TauKernel(0)
UNIFORM = TauKernel(Fraction(1, 2))
COSIZE = TauKernel(1)


class TableKernel(DeletionKernel):
    """A kernel given by an explicit table ``{(partition, part_size): d}``.

    Every partition in the table must have its row summing to exactly 1 and
    only parts of the partition may appear.
    """

    name = "table"

    def __init__(self, entries: Mapping[tuple[Partition, int], object]):
        table: dict[Partition, dict[int, Fraction]] = {}
        for (lam, x), v in entries.items():
            if x not in lam:
                raise ValidationError(f"table entry for {x} but {x} is not a part of {lam}")
            v = as_fraction(v)
            if v < 0:
                raise ValidationError(f"negative kernel value at ({lam}, {x})")
            table.setdefault(lam, {})[x] = v
        for lam, row in table.items():
            if sum(row.values(), ZERO) != 1:
                raise ValidationError(f"kernel row at {lam} sums to {sum(row.values())}, not 1")
        self.table = table

    @classmethod
    def from_function(cls, fn, n_max: int) -> "TableKernel":
        return cls({(lam, x): fn(lam, x) for m in range(1, n_max + 1)
                    for lam in enumerate_partitions(m) for x in lam.distinct_parts})

    def value(self, lam, x):
        try:
            return self.table[lam].get(x, ZERO)
        except KeyError:
            raise DomainError(f"kernel table has no row for {lam}") from None


def tau_for(alpha, theta) -> Fraction:
    """``alpha/(alpha+theta)``, with ``alpha = theta = 0`` mapped to 1."""
    alpha, theta = as_fraction(alpha), as_fraction(theta)
    if alpha + theta == 0:
        return ONE
    return alpha / (alpha + theta)


def kernel_value(k: DeletionKernel, lam: Partition, x: int) -> Fraction:
    return k(lam, x)


def parse_kernel(spec) -> DeletionKernel:
    """Build a kernel from JSON-like data or a short string.

    Accepted: ``{"kernel": "tau", "tau": "1/2"}``, ``{"kernel": "size-biased"}``,
    ``{"kernel": "table", "entries": [{"partition": [2, 1], "part": 1, "d": "1/2"}, ...]}``,
    and the strings ``"tau=1/2"``, ``"size-biased"``, ``"uniform"``, ``"cosize"``.
    """
    if isinstance(spec, str):
        s = spec.strip()
        if s.startswith("tau="):
            return TauKernel(as_fraction(s[4:]))
        spec = {"kernel": s}
    kind = spec.get("kernel")
    named = {"size-biased": SIZE_BIASED, "uniform": UNIFORM, "cosize": COSIZE}
    if kind in named:
        return named[kind]
    if kind == "tau":
        return TauKernel(as_fraction(spec["tau"]))
    if kind == "table":
        entries = {}
        for e in spec["entries"]:
            entries[(Partition(e["partition"]), int(e["part"]))] = as_fraction(e["d"])
        return TableKernel(entries)
    raise ValidationError(f"unknown kernel spec {spec!r}")


# --------------------------------------------------------------------------
# regeneration identities

class Residual(NamedTuple):
    """Largest absolute defect of an identity, and where it occurred.

    ``witness`` is ``(level, partition, part)`` or ``None`` when the defect is 0.
    """

    value: Fraction
    witness: tuple | None = None


def q_from_p_d(p: PartitionDistribution, k: DeletionKernel) -> DecrementRow:
    """Unconditional law of the deleted part size: ``sum_lam d(lam,x) p(lam)``."""
    q = [ZERO] * p.n
    for lam, prob in p.probs.items():
        if prob == 0:
            continue
        for x in lam.distinct_parts:
            q[x - 1] += k(lam, x) * prob
    return DecrementRow(q)


def _max_defect(triples) -> Residual:
    best = Residual(ZERO)
    for defect, where in triples:
        d = abs(defect)
        if d > best.value:
            best = Residual(d, where)
    return best


def reduces_residual(p0: PartitionDistribution, p1_levels: Levels, k: DeletionKernel) -> Residual:
    """Defect of ``p0(lam) d(lam,x) = q(n,x) p1(lam - {x})`` over ``lam`` of ``n``.

    ``q`` is the deleted-part law computed from ``p0`` and ``k``; ``p1`` is
    read at the level of the remaining partition (mass 1 for the empty one).
    """
    q = q_from_p_d(p0, k)
    n = p0.n

    def defects():
        for lam in enumerate_partitions(n):
            for x in lam.distinct_parts:
                rhs = q[x] * p_of(p1_levels, delete_part(lam, x)) if q[x] else ZERO
                yield p0[lam] * k(lam, x) - rhs, (n, lam, x)

    return _max_defect(defects())


def regen_residual(p_levels: Levels, k: DeletionKernel) -> Residual:
    """Defect of the regeneration identity at every level ``1..n``.

    Zero exactly when the structure is regenerative with respect to ``k``
    up to level ``n``.
    """
    check_consistent(p_levels)
    n = max(p_levels)
    best = Residual(ZERO)
    for m in range(1, n + 1):
        r = reduces_residual(p_levels[m], p_levels, k)
        if r.value > best.value:
            best = r
    return best


def d_from_p_q(p_levels: Levels, q: DecrementRow, lam: Partition, x: int) -> Fraction:
    """Kernel value forced by the regeneration identity: ``q(n,x) p(lam-{x}) / p(lam)``."""
    if x not in lam:
        raise DomainError(f"{x} is not a part of {lam}")
    if q.n != lam.n:
        raise DomainError(f"decrement row is at level {q.n}, partition at {lam.n}")
    p = p_of(p_levels, lam)
    if p == 0:
        raise AmbiguityError(
            f"p{lam} = 0 so d({lam}, {x}) is not determined; this happens only for "
            "hook structures, where any kernel deleting singletons first fits")
    return q[x] * p_of(p_levels, delete_part(lam, x)) / p


class Dichotomy(enum.Enum):
    HOOK = "hook"
    STRICTLY_POSITIVE = "strictly-positive"
    NOT_REGENERATIVE = "not-regenerative"


def positivity_dichotomy(p_levels: Levels) -> Dichotomy:
    """Classify a structure by ``p(2,2)``.

    A regenerative structure is either a hook structure (``p(2,2) = 0`` and
    all mass on hooks) or has every ``p`` strictly positive.  Anything else
    cannot be regenerative.
    """
    n = max(p_levels, default=0)
    if n < 4:
        raise InsufficientDataError("the p(2,2) dichotomy needs levels up to n >= 4")
    check_consistent(p_levels)
    if p_levels[4][Partition([2, 2])] == 0:
        hooks_only = all(lam.is_hook() for m in range(1, n + 1) for lam in p_levels[m].support())
        return Dichotomy.HOOK if hooks_only else Dichotomy.NOT_REGENERATIVE
    positive = all(p_levels[m][lam] > 0 for m in range(1, n + 1) for lam in enumerate_partitions(m))
    return Dichotomy.STRICTLY_POSITIVE if positive else Dichotomy.NOT_REGENERATIVE


def kernel_row_sums(k: DeletionKernel, n: int) -> dict[Partition, Fraction]:
    return {lam: sum((k(lam, x) for x in lam.distinct_parts), ZERO) for lam in enumerate_partitions(n)}


def kernel_table(k: DeletionKernel, n: int) -> list[tuple[Partition, int, Fraction]]:
    return [(lam, x, k(lam, x)) for lam in enumerate_partitions(n) for x in lam.distinct_parts]


def as_row(values: Sequence) -> DecrementRow:
    return values if isinstance(values, DecrementRow) else DecrementRow(values)
