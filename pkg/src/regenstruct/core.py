"""Exact rationals, partitions, compositions and their enumeration.

All probabilities in this package are :class:`fractions.Fraction` values.
A partition is stored by its multiplicities ``a_r`` (how many parts of size
``r``); the ranked, non-increasing view is derived on demand.  Compositions
are plain tuples of positive integers.
"""
from __future__ import annotations

import os
import random
from contextlib import contextmanager
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial, gcd, prod
from typing import Iterable, Mapping, Sequence

ZERO = Fraction(0)
ONE = Fraction(1)

Composition = tuple  # tuple[int, ...], every entry >= 1


class RegenError(Exception):
    """Base class for errors raised by this package."""


class DomainError(RegenError, ValueError):
    """An argument lies outside the domain of the operation."""


class ValidationError(RegenError, ValueError):
    """Input data fails a required consistency or normalization check."""


class ResourceError(RegenError):
    """A configured enumeration limit would be exceeded."""


class AmbiguityError(RegenError):
    """The requested quantity is not uniquely determined by the data."""


class InvariantViolation(RegenError, AssertionError):
    """An identity that holds by theory failed on exact data."""


class InsufficientDataError(RegenError, ValueError):
    """Not enough levels were supplied to decide the question."""


# --------------------------------------------------------------------------
# limits

@dataclass(frozen=True)
class Limits:
    partitions: int = 30
    compositions: int = 16
    composition_chain: int = 10
    partition_chain: int = 12
    fragperm_chain: int = 5


def _limits_from_env() -> Limits:
    raw = os.environ.get("REGEN_STRUCT_LIMIT")
    if not raw:
        return Limits()
    cap = int(raw)
    return Limits(cap, cap, cap, cap, cap)


_limits = _limits_from_env()


def get_limits() -> Limits:
    return _limits


def set_limits(**caps) -> Limits:
    """Replace selected caps; returns the previous setting."""
    global _limits
    old = _limits
    _limits = replace(_limits, **caps)
    return old


@contextmanager
def override_limits(cap: int):
    """Temporarily set every enumeration cap to ``cap``."""
    global _limits
    old = _limits
    _limits = Limits(cap, cap, cap, cap, cap)
    try:
        yield _limits
    finally:
        _limits = old


def check_limit(name: str, n: int) -> None:
    cap = getattr(_limits, name)
    if n > cap:
        raise ResourceError(
            f"n={n} exceeds the {name} limit {cap}; cost is exponential in n "
            "(raise it with --limit or REGEN_STRUCT_LIMIT)")


# --------------------------------------------------------------------------
# rationals

def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions and strings like ``"3/4"`` or ``"-2"``.

    Floats are refused: every value in this package is exact.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DomainError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                num, den = text.split("/")
                return Fraction(int(num), int(den))
            return Fraction(int(text))
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse rational {value!r}") from exc
    raise DomainError(f"expected an exact rational, got {type(value).__name__}")


def format_fraction(q: Fraction) -> str:
    """Canonical ``num/den`` string (integers render without ``/1``)."""
    q = Fraction(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def rising_factorial(x, n: int, b=1) -> Fraction:
    """``prod_{i=1..n} (x + (i-1) b)``; the empty product is 1."""
    if n < 0:
        raise DomainError("rising factorial needs n >= 0")
    x = as_fraction(x)
    b = as_fraction(b)
    out = ONE
    for i in range(n):
        out *= x + i * b
    return out


def lcm_of_denominators(values: Iterable[Fraction]) -> int:
    out = 1
    for v in values:
        d = v.denominator
        out = out * d // gcd(out, d)
    return out


# --------------------------------------------------------------------------
# random generation

def make_rng(seed: int) -> random.Random:
    """Seeded Mersenne Twister (MT19937) generator.

    The seed must fit in an unsigned 64-bit integer.  Python's MT19937 is
    platform independent, so equal seeds give equal draws everywhere.
    """
    if not 0 <= int(seed) < 2 ** 64:
        raise DomainError("seed must be an unsigned 64-bit integer")
    return random.Random(int(seed))


def draw_index(weights: Sequence[Fraction], rng: random.Random) -> int:
    """Draw an index with probability proportional to exact ``weights``.

    The draw is exact: weights are brought to a common denominator and a
    uniform integer below the total is located.
    """
    scale = lcm_of_denominators(weights)
    ints = [int(w * scale) for w in weights]
    if any(w < 0 for w in ints):
        raise DomainError("negative sampling weight")
    total = sum(ints)
    if total <= 0:
        raise DomainError("sampling weights sum to zero")
    u = rng.randrange(total)
    acc = 0
    for i, w in enumerate(ints):
        acc += w
        if u < acc:
            return i
    raise AssertionError("unreachable")


# --------------------------------------------------------------------------
# partitions

class Partition:
    """A partition of ``n`` as a multiset of positive parts.

    >>> Partition([3, 1, 3]).parts
    (3, 3, 1)
    >>> Partition.from_multiplicities({1: 2, 2: 1}) == Partition([2, 1, 1])
    True
    """

    __slots__ = ("_mult", "_n", "_hash")

    def __init__(self, parts: Iterable[int] = ()):
        counts: dict[int, int] = {}
        for r in parts:
            r = int(r)
            if r < 1:
                raise DomainError(f"partition parts must be positive, got {r}")
            counts[r] = counts.get(r, 0) + 1
        self._set(counts)

    def _set(self, counts: Mapping[int, int]) -> None:
        self._mult = tuple(sorted(((r, a) for r, a in counts.items() if a), reverse=True))
        self._n = sum(r * a for r, a in self._mult)
        self._hash = hash(self._mult)

    @classmethod
    def from_multiplicities(cls, mult: Mapping[int, int]) -> "Partition":
        obj = cls.__new__(cls)
        for r, a in mult.items():
            if r < 1 or a < 0:
                raise DomainError(f"bad multiplicity {a} for part {r}")
        obj._set(mult)
        return obj

    @property
    def n(self) -> int:
        return self._n

    @property
    def length(self) -> int:
        """Number of parts (written ``l`` in the formulas)."""
        return sum(a for _, a in self._mult)

    @property
    def multiplicities(self) -> dict[int, int]:
        return dict(self._mult)

    def a(self, r: int) -> int:
        for s, a in self._mult:
            if s == r:
                return a
        return 0

    @property
    def distinct_parts(self) -> tuple[int, ...]:
        return tuple(r for r, _ in self._mult)

    @property
    def parts(self) -> tuple[int, ...]:
        return tuple(r for r, a in self._mult for _ in range(a))

    def __contains__(self, x: int) -> bool:
        return self.a(x) > 0

    def __iter__(self):
        return iter(self.parts)

    def __len__(self) -> int:
        return self.length

    def is_empty(self) -> bool:
        return self._n == 0

    def is_hook(self) -> bool:
        """At most one part larger than 1."""
        return sum(a for r, a in self._mult if r > 1) <= 1

    def add_part(self, x: int) -> "Partition":
        m = dict(self._mult)
        m[x] = m.get(x, 0) + 1
        return Partition.from_multiplicities(m)

    def __eq__(self, other) -> bool:
        return isinstance(other, Partition) and self._mult == other._mult

    def __hash__(self) -> int:
        return self._hash

    def sort_key(self):
        """Key putting partitions of equal weight in reverse-lex order."""
        return tuple(-r for r in self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"

    def __repr__(self) -> str:
        return f"Partition({list(self.parts)})"


EMPTY = Partition(())


def ones(m: int) -> Partition:
    """The all-singleton partition ``(1^m)``; ``EMPTY`` for ``m = 0``."""
    return Partition.from_multiplicities({1: m}) if m else EMPTY


def hook(x: int, singles: int) -> Partition:
    """The partition ``(x, 1^singles)``."""
    return Partition([x] + [1] * singles)


@lru_cache(maxsize=None)
def _partitions(n: int, largest: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def enumerate_partitions(n: int) -> list[Partition]:
    """All partitions of ``n`` in reverse-lexicographic ranked order."""
    if n < 1:
        raise DomainError("enumerate_partitions needs n >= 1")
    check_limit("partitions", n)
    return [Partition(p) for p in _partitions(n, n)]


@lru_cache(maxsize=None)
def _compositions(n: int) -> tuple[tuple[int, ...], ...]:
    if n == 0:
        return ((),)
    return tuple((first,) + rest for first in range(1, n + 1)
                 for rest in _compositions(n - first))


def enumerate_compositions(n: int) -> list[tuple[int, ...]]:
    """All ``2**(n-1)`` compositions of ``n`` in lexicographic order."""
    if n < 1:
        raise DomainError("enumerate_compositions needs n >= 1")
    check_limit("compositions", n)
    return list(_compositions(n))


def check_composition(c: Sequence[int]) -> tuple[int, ...]:
    c = tuple(int(x) for x in c)
    if any(x < 1 for x in c):
        raise DomainError(f"composition parts must be positive: {c}")
    return c


def rank(c: Sequence[int]) -> Partition:
    """The partition formed by the parts of a composition."""
    if not c:
        raise DomainError("cannot rank an empty composition")
    return Partition(check_composition(c))


def delete_part(lam: Partition, x: int) -> Partition:
    """``lam - {x}``: remove one part of size ``x``."""
    a = lam.a(x)
    if a == 0:
        raise DomainError(f"{x} is not a part of {lam}")
    m = lam.multiplicities
    m[x] = a - 1
    return Partition.from_multiplicities(m)


def distinct_orderings(lam: Partition) -> int:
    """``l! / prod a_r!``, the number of compositions that rank to ``lam``."""
    return factorial(lam.length) // prod(factorial(a) for a in lam.multiplicities.values())


def hypergeometric_weight(n: int, m: int, x: int, k: int) -> Fraction:
    """P(k of the m sampled balls fall in a fixed box of x balls out of n)."""
    return Fraction(comb(n - x, m - k) * comb(x, k), comb(n, m))
