"""Subordinator paintbox: Laplace exponent and decrement rows from a
Levy measure image ``nu`` on ``(0, 1]`` plus drift, and a stick-breaking
sampler for the compound-Poisson case.

The measure is a finite sum of atoms ``w * delta_u`` and optionally one
beta component ``c * x^(sigma-1) (1-x)^(theta-1) / B(1+sigma, theta) dx``,
normalized so that its first moment equals ``c``.  Every integral needed
reduces to a ratio of rising factorials, so all values stay rational.
"""
from __future__ import annotations

import random
from bisect import bisect_left
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, sqrt

from .core import (
    ONE,
    ZERO,
    DomainError,
    ValidationError,
    as_fraction,
    draw_index,
    enumerate_compositions,
    make_rng,
)
from .kernels import DecrementRow
from .regen import composition_probability, full_matrix


@dataclass(frozen=True)
class BetaComponent:
    c: Fraction
    sigma: Fraction
    theta: Fraction

    def __post_init__(self):
        for name in ("c", "sigma", "theta"):
            object.__setattr__(self, name, as_fraction(getattr(self, name)))
        if self.c <= 0:
            raise DomainError("beta component needs moment mass c > 0")
        if self.sigma <= -1:
            raise DomainError("beta component needs sigma > -1")
        if self.theta <= 0:
            raise DomainError("beta component needs theta > 0")

    def moment_ratio(self, n: int, r: int) -> Fraction:
        """``B(r+sigma, n-r+theta) / B(1+sigma, theta)``."""
        s, t = self.sigma, self.theta
        out = ONE
        for i in range(1, r):
            out *= s + i
        for j in range(n - r):
            out *= t + j
        for k in range(1, n):
            out /= s + t + k
        return out

    def total_mass(self) -> Fraction | None:
        """``c (sigma+theta)/sigma`` when finite (``sigma > 0``), else ``None``."""
        if self.sigma <= 0:
            return None
        return self.c * (self.sigma + self.theta) / self.sigma


@dataclass(frozen=True)
class LevyMeasureSpec:
    atoms: tuple = ()
    beta: BetaComponent | None = None
    drift: Fraction = ZERO

    def __post_init__(self):
        atoms = tuple((as_fraction(u), as_fraction(w)) for u, w in self.atoms)
        for u, w in atoms:
            if not 0 < u <= 1:
                raise DomainError(f"atom location {u} outside (0, 1]")
            if w <= 0:
                raise DomainError(f"atom weight {w} must be positive")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "drift", as_fraction(self.drift))
        if self.drift < 0:
            raise DomainError("drift must be nonnegative")
        if not atoms and self.beta is None and self.drift == 0:
            raise DomainError("the zero measure with zero drift defines no paintbox")

    def scaled(self, factor) -> "LevyMeasureSpec":
        factor = as_fraction(factor)
        if factor <= 0:
            raise DomainError("scale factor must be positive")
        beta = None if self.beta is None else BetaComponent(self.beta.c * factor, self.beta.sigma, self.beta.theta)
        return LevyMeasureSpec(tuple((u, w * factor) for u, w in self.atoms), beta, self.drift * factor)

    def total_mass(self) -> Fraction | None:
        mass = sum((w for _, w in self.atoms), ZERO)
        if self.beta is not None:
            b = self.beta.total_mass()
            if b is None:
                return None
            mass += b
        return mass


def dirac(u=1, weight=1, drift=0) -> LevyMeasureSpec:
    return LevyMeasureSpec(((u, weight),), drift=drift)


def beta_spec(c, sigma, theta, drift=0) -> LevyMeasureSpec:
    return LevyMeasureSpec(beta=BetaComponent(c, sigma, theta), drift=drift)


LEBESGUE = beta_spec(Fraction(1, 2), 1, 1)


def phi_nr(spec: LevyMeasureSpec, n: int, r: int) -> Fraction:
    """``n d 1(r=1) + C(n,r) * integral of x^r (1-x)^(n-r) nu(dx)``."""
    if not 1 <= r <= n:
        raise DomainError(f"need 1 <= r <= n, got r={r}, n={n}")
    integral = sum((w * u ** r * (1 - u) ** (n - r) for u, w in spec.atoms), ZERO)
    if spec.beta is not None:
        integral += spec.beta.c * spec.beta.moment_ratio(n, r)
    out = comb(n, r) * integral
    if r == 1:
        out += n * spec.drift
    return out


def laplace_exponent(spec: LevyMeasureSpec, n: int) -> Fraction:
    """``Phi(n)`` as the sum of ``Phi(n, r)`` over ``r``."""
    if n < 1:
        raise DomainError("n must be positive")
    return sum((phi_nr(spec, n, r) for r in range(1, n + 1)), ZERO)


def laplace_exponent_direct(spec: LevyMeasureSpec, n: int) -> Fraction:
    """``n d + integral of (1 - (1-x)^n) nu(dx)`` evaluated without Phi(n, r).

    The beta part uses ``1-(1-x)^n = x * sum_{j<n} (1-x)^j``.
    """
    out = n * spec.drift + sum((w * (1 - (1 - u) ** n) for u, w in spec.atoms), ZERO)
    if spec.beta is not None:
        s, t = spec.beta.sigma, spec.beta.theta
        term, acc = ONE, ZERO
        for j in range(n):
            acc += term
            term *= (t + j) / (1 + s + t + j)
        out += spec.beta.c * acc
    return out


def decrement_from_paintbox(spec: LevyMeasureSpec, n: int) -> DecrementRow:
    """``q(n, r) = Phi(n, r) / Phi(n)``."""
    phis = [phi_nr(spec, n, r) for r in range(1, n + 1)]
    total = sum(phis, ZERO)
    if total <= 0:
        raise DomainError("Laplace exponent vanishes; spec defines no decrement row")
    return DecrementRow(p / total for p in phis)


# --------------------------------------------------------------------------
# stick-breaking sampler

class UnsupportedSpec(DomainError):
    """The paintbox set cannot be simulated by finite stick-breaking."""


def _jump_sampler(spec: LevyMeasureSpec):
    if spec.drift != 0:
        raise UnsupportedSpec("stick-breaking needs zero drift; use the decrement matrix instead")
    if spec.total_mass() is None:
        raise UnsupportedSpec("beta component with sigma <= 0 has infinite mass; not simulable")
    weights = [w for _, w in spec.atoms]
    locations = [float(u) for u, _ in spec.atoms]
    if spec.beta is not None:
        weights.append(spec.beta.total_mass())
        a, b = float(spec.beta.sigma), float(spec.beta.theta)
    else:
        a = b = None

    def draw(rng: random.Random) -> float:
        i = draw_index(weights, rng)
        if i < len(locations):
            return locations[i]
        return rng.betavariate(a, b)

    return draw


def sample_composition_via_paintbox(spec: LevyMeasureSpec, n: int, rng: random.Random,
                                    _draw=None) -> tuple[int, ...]:
    """Drop ``n`` uniforms into the gaps of ``R = {1 - prod_{i<=j}(1 - W_i)}``.

    ``W_i`` are i.i.d. from the normalized measure.  Blocks are the gap
    occupancies from left to right; a uniform landing exactly on a point of
    ``R`` forms its own block.
    """
    draw = _draw or _jump_sampler(spec)
    points = sorted(rng.random() for _ in range(n))
    parts = []
    survive, i = 1.0, 0
    while i < n:
        w = draw(rng)
        survive *= 1.0 - w
        right = 1.0 - survive if survive > 0.0 else 1.0
        if right >= 1.0:
            parts.append(n - i)
            break
        j = bisect_left(points, right, lo=i)
        if j > i:
            parts.append(j - i)
        i = j
        while i < n and points[i] == right:
            parts.append(1)
            i += 1
    return tuple(parts)


@dataclass
class PaintboxSampleReport:
    n: int
    sample_count: int
    seed: int
    empirical: Counter
    exact: dict
    max_abs_deviation: Fraction = field(default=ZERO)

    def within_sigma(self, k: float = 3.0) -> dict:
        """Per composition: is ``|count - N p| <= k sqrt(N p (1-p))``?"""
        out = {}
        N = self.sample_count
        for c, p in self.exact.items():
            sd = sqrt(N * float(p) * (1 - float(p)))
            dev = abs(self.empirical.get(c, 0) - N * p)
            out[c] = dev <= k * sd if sd > 0 else dev == 0
        return out


def paintbox_sample_report(spec: LevyMeasureSpec, n: int, sample_count: int, seed: int) -> PaintboxSampleReport:
    rng = make_rng(seed)
    draw = _jump_sampler(spec)
    counts = Counter(sample_composition_via_paintbox(spec, n, rng, _draw=draw) for _ in range(sample_count))
    Q = full_matrix(decrement_from_paintbox(spec, n))
    exact = {c: composition_probability(Q, c) for c in enumerate_compositions(n)}
    unknown = set(counts) - set(exact)
    if unknown:
        raise ValidationError(f"sampler produced non-compositions {unknown}")
    dev = max(abs(Fraction(counts.get(c, 0), sample_count) - p) for c, p in exact.items())
    return PaintboxSampleReport(n, sample_count, seed, counts, exact, dev)


def parse_spec(data: dict) -> LevyMeasureSpec:
    """``{"atoms": [{"u": "1/2", "w": "1"}], "beta": {"c": .., "sigma": .., "theta": ..}, "drift": "0"}``."""
    try:
        atoms = tuple((a["u"], a["w"]) for a in data.get("atoms", ()))
        beta = data.get("beta")
        beta = None if beta is None else BetaComponent(beta["c"], beta["sigma"], beta["theta"])
        return LevyMeasureSpec(atoms, beta, data.get("drift", 0))
    except KeyError as exc:
        raise ValidationError(f"paintbox spec missing field {exc}") from None
