from collections import defaultdict
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from regenstruct.core import DomainError, Partition, ValidationError, enumerate_partitions
from regenstruct.eppf import (
    PartitionDistribution,
    TwoParamModel,
    check_consistent,
    consistency_residual,
    eppf_ewens,
    eppf_two_param,
    levels_by_projection,
    model_levels,
    partition_distribution,
    project_one_level,
    project_to,
)

F = Fraction


def crp_law(alpha, theta, n):
    """Exact seating law of the two-parameter restaurant, customer by customer."""
    alpha, theta = F(alpha), F(theta)
    law = {(): F(1)}
    for k in range(n):
        nxt = defaultdict(F)
        for tables, p in law.items():
            if k == 0:
                nxt[(1,)] += p
                continue
            ell = len(tables)
            nxt[tuple(sorted(tables + (1,), reverse=True))] += p * (theta + ell * alpha) / (theta + k)
            for i, s in enumerate(tables):
                grown = tables[:i] + (s + 1,) + tables[i + 1:]
                nxt[tuple(sorted(grown, reverse=True))] += p * (s - alpha) / (theta + k)
        law = {t: p for t, p in nxt.items() if p}
    return law


def remove_random_ball(dist):
    """Drop one uniformly chosen ball from a law on partitions of n+1."""
    n1 = dist.n
    out = defaultdict(F)
    for lam, p in dist.probs.items():
        for s, a in lam.multiplicities.items():
            parts = list(lam.parts)
            parts.remove(s)
            if s > 1:
                parts.append(s - 1)
            out[Partition(parts)] += p * F(s * a, n1)
    return PartitionDistribution(n1 - 1, dict(out))


GRID = [(a, t) for a in (0, F(1, 4), F(1, 2), F(3, 4), 1) for t in (0, F(1, 2), 1, 2)]


@pytest.mark.parametrize("alpha,theta", GRID)
def test_two_param_matches_restaurant(alpha, theta):
    model = TwoParamModel(alpha, theta)
    for n in range(1, 7):
        law = crp_law(alpha, theta, n)
        for lam in enumerate_partitions(n):
            assert eppf_two_param(model, lam) == law.get(lam.parts, 0), (n, lam)


def test_worked_values():
    m = TwoParamModel(F(1, 2), F(1, 2))
    assert [p for _, p in partition_distribution(m, 3).items()] == [F(1, 5), F(2, 5), F(2, 5)]
    ew = TwoParamModel.ewens(1)
    assert [p for _, p in partition_distribution(ew, 3).items()] == [F(1, 3), F(1, 2), F(1, 6)]
    d = partition_distribution(TwoParamModel(1, 1), 4)
    assert d.support() == [Partition([1, 1, 1, 1])] and d[Partition([1, 1, 1, 1])] == 1


def test_one_block_corner():
    d = partition_distribution(TwoParamModel(0, 0), 5)
    assert d.support() == [Partition([5])]


@pytest.mark.parametrize("theta", [F(1, 3), 1, 2, 5])
def test_ewens_formula_agrees(theta):
    model = TwoParamModel.ewens(theta)
    for n in range(1, 8):
        for lam in enumerate_partitions(n):
            assert eppf_ewens(theta, lam) == eppf_two_param(model, lam)


def test_ewens_theta_zero():
    assert eppf_ewens(0, Partition([3])) == 1
    assert eppf_ewens(0, Partition([2, 1])) == 0


def test_projection_examples():
    m = TwoParamModel(F(1, 2), F(1, 2))
    proj = project_one_level(partition_distribution(m, 3))
    assert proj[Partition([2])] == F(1, 3) and proj[Partition([1, 1])] == F(2, 3)


@pytest.mark.parametrize("alpha,theta", GRID)
def test_projection_matches_ball_removal(alpha, theta):
    model = TwoParamModel(alpha, theta)
    for n in range(2, 8):
        d = partition_distribution(model, n)
        assert project_one_level(d) == remove_random_ball(d)


def test_consistency_residual_zero_on_grid():
    for alpha, theta in GRID:
        levels = model_levels(TwoParamModel(alpha, theta), 7)
        for n in range(1, 7):
            assert consistency_residual(levels[n + 1], levels[n]) == 0


def test_inconsistent_levels_named():
    levels = model_levels(TwoParamModel.ewens(1), 4)
    levels[3] = PartitionDistribution(3, {Partition([3]): F(1)})
    with pytest.raises(ValidationError, match="levels 3 and 2"):
        check_consistent(levels)
    assert consistency_residual(levels[4], levels[3]) > 0


def test_point_mass_is_a_distribution_not_consistent():
    levels = {1: PartitionDistribution.point_mass(Partition([1])),
              2: PartitionDistribution.point_mass(Partition([2])),
              3: PartitionDistribution.point_mass(Partition([2, 1]))}
    with pytest.raises(ValidationError):
        check_consistent(levels)


def test_domain_errors():
    with pytest.raises(DomainError):
        TwoParamModel(F(1, 2), F(-1, 4))
    with pytest.raises(DomainError):
        TwoParamModel(F(3, 2), 1)
    TwoParamModel(F(3, 4), F(-1, 4), extended_range=True)
    with pytest.raises(DomainError):
        TwoParamModel(F(3, 4), F(-1), extended_range=True)
    with pytest.raises(DomainError):
        eppf_ewens(-1, Partition([1]))


def test_extended_range_is_consistent():
    levels = model_levels(TwoParamModel(F(3, 4), F(-1, 4), True), 6)
    check_consistent(levels)


def test_levels_by_projection_round_trip():
    m = TwoParamModel(F(1, 4), 2)
    top = partition_distribution(m, 6)
    assert levels_by_projection(top) == model_levels(m, 6)
    assert project_to(top, 2) == partition_distribution(m, 2)


rationals = st.fractions(min_value=0, max_value=3, max_denominator=6)


@settings(max_examples=40, deadline=None)
@given(alpha=st.fractions(min_value=0, max_value=1, max_denominator=6), theta=rationals,
       n=st.integers(1, 8))
def test_normalized_and_nonnegative(alpha, theta, n):
    d = partition_distribution(TwoParamModel(alpha, theta), n)
    assert d.is_distribution()


@settings(max_examples=30, deadline=None)
@given(alpha=st.fractions(min_value=0, max_value=1, max_denominator=5), theta=rationals,
       n=st.integers(2, 7))
def test_sampling_consistent_property(alpha, theta, n):
    m = TwoParamModel(alpha, theta)
    assert consistency_residual(partition_distribution(m, n), partition_distribution(m, n - 1)) == 0
