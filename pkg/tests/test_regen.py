import itertools
from collections import Counter, defaultdict
from fractions import Fraction
from math import sqrt

import pytest
from hypothesis import given, settings, strategies as st

from regenstruct.core import Partition, ValidationError, enumerate_compositions, enumerate_partitions, make_rng, ones
from regenstruct.eppf import PartitionDistribution, TwoParamModel, levels_by_projection, model_levels
from regenstruct.kernels import DecrementRow, TauKernel, q_from_p_d, tau_for
from regenstruct.regen import (
    DecrementMatrix,
    NotRegenerative,
    candidate_rows,
    composition_distribution,
    composition_probability,
    drop_random_ball,
    full_matrix,
    hypgeom_project,
    invert_p_to_q,
    matrix_levels,
    partition_law,
    partition_probability,
    regenerativity_check,
    sample_composition,
    two_param_decrement,
)

F = Fraction
P = Partition
UNIFORM3 = DecrementRow([F(1, 3)] * 3)
HALF3 = DecrementRow([F(3, 5), F(1, 5), F(1, 5)])


def test_hypgeom_examples():
    assert hypgeom_project(UNIFORM3, 2) == (F(1, 2), F(1, 2))
    assert hypgeom_project(HALF3, 2) == (F(2, 3), F(1, 3))
    assert hypgeom_project(HALF3, 3) == HALF3


@pytest.mark.parametrize("alpha,theta", [(0, 1), (F(1, 4), 2), (F(1, 2), F(1, 2)), (F(3, 4), 0), (1, 1)])
def test_hypgeom_against_closed_form(alpha, theta):
    top = two_param_decrement(alpha, theta, 8)
    for m in range(1, 9):
        assert hypgeom_project(top, m) == two_param_decrement(alpha, theta, m)


def test_full_matrix_examples():
    Q = full_matrix(UNIFORM3)
    assert Q.rows == (DecrementRow([1]), DecrementRow([F(1, 2)] * 2), UNIFORM3)
    one_block = full_matrix(DecrementRow([0, 0, 0, 1]))
    assert all(one_block.q(m, m) == 1 for m in range(1, 5))
    singles = full_matrix(DecrementRow([1, 0, 0, 0]))
    assert all(singles.q(m, 1) == 1 for m in range(1, 5))


def test_composition_probability_examples():
    Q = full_matrix(UNIFORM3)
    assert [composition_probability(Q, c) for c in [(2, 1), (1, 2), (1, 1, 1), (3,)]] == [
        F(1, 3), F(1, 6), F(1, 6), F(1, 3)]
    assert composition_probability(full_matrix(HALF3), (1, 1, 1)) == F(2, 5)


def test_partition_probability_examples():
    assert partition_probability(full_matrix(UNIFORM3), P([2, 1])) == F(1, 2)
    assert partition_probability(full_matrix(HALF3), P([2, 1])) == F(2, 5)
    Q = full_matrix(two_param_decrement(F(1, 4), 1, 5))
    expect = F(1)
    for k in range(1, 6):
        expect *= Q.q(k, 1)
    assert partition_probability(Q, ones(5)) == expect


@pytest.mark.parametrize("row", [UNIFORM3, HALF3, two_param_decrement(F(1, 2), 2, 6),
                                 DecrementRow([F(1, 7), F(2, 7), 0, F(3, 7), F(1, 7), 0])])
def test_partition_probability_sums_distinct_orderings(row):
    Q = full_matrix(row)
    for m in range(1, row.n + 1):
        for lam in enumerate_partitions(m):
            direct = sum(composition_probability(Q, c) for c in set(itertools.permutations(lam.parts)))
            assert partition_probability(Q, lam) == direct


def remove_ball_from_compositions(law, n):
    out = defaultdict(F)
    for c, p in law.items():
        for i, size in enumerate(c):
            smaller = list(c)
            smaller[i] -= 1
            out[tuple(s for s in smaller if s)] += p * F(size, n)
    return dict(out)


@pytest.mark.parametrize("row", [UNIFORM3, two_param_decrement(F(3, 4), F(1, 2), 7),
                                 DecrementRow([F(1, 2), 0, 0, 0, F(1, 4), F(1, 4)])])
def test_composition_structure_is_sampling_consistent(row):
    Q = full_matrix(row)
    for n in range(2, row.n + 1):
        law = {c: composition_probability(Q, c) for c in enumerate_compositions(n)}
        lower = {c: composition_probability(Q, c) for c in enumerate_compositions(n - 1)}
        dropped = remove_ball_from_compositions(law, n)
        assert {c: p for c, p in dropped.items() if p} == {c: p for c, p in lower.items() if p}
        assert drop_random_ball(composition_distribution(Q, n)) == composition_distribution(Q, n - 1)


def test_laws_sum_to_one():
    Q = full_matrix(two_param_decrement(F(1, 3), F(5, 2), 8))
    for n in range(1, 9):
        assert composition_distribution(Q, n).total() == 1
        assert partition_law(Q, n).total() == 1


def test_invert_examples():
    half = model_levels(TwoParamModel(F(1, 2), F(1, 2)), 3)
    assert invert_p_to_q(half) == HALF3
    one_block = model_levels(TwoParamModel(0, 0), 5)
    assert invert_p_to_q(one_block) == (0, 0, 0, 0, 1)


def test_extended_range_detected():
    levels = model_levels(TwoParamModel(F(3, 4), F(-1, 4), extended_range=True), 6)
    with pytest.raises(NotRegenerative) as info:
        invert_p_to_q(levels)
    w = info.value.witness
    assert w.level <= 6 and "negative" in w.detail
    assert any(v < 0 for row in candidate_rows(levels) for v in row)
    verdict = regenerativity_check(levels)
    assert not verdict and verdict.witness == w


def test_invert_requires_consistency():
    levels = model_levels(TwoParamModel.ewens(1), 3)
    levels[3] = PartitionDistribution.point_mass(P([3]))
    with pytest.raises(ValidationError):
        invert_p_to_q(levels)


def test_regenerativity_verdicts():
    assert regenerativity_check(model_levels(TwoParamModel(F(1, 2), F(1, 2)), 6))
    v = regenerativity_check(model_levels(TwoParamModel.ewens(2), 6))
    assert v and v.matrix.row(6) == two_param_decrement(0, 2, 6)
    uniform4 = PartitionDistribution(4, {lam: F(1, 5) for lam in enumerate_partitions(4)})
    verdict = regenerativity_check(levels_by_projection(uniform4))
    assert not verdict and verdict.witness is not None


GRID = [(a, t) for a in (0, F(1, 4), F(1, 2), F(3, 4), 1) for t in (0, F(1, 2), 1, 2)]


@pytest.mark.parametrize("alpha,theta", GRID)
def test_two_param_decrement_matches_kernel_route(alpha, theta):
    levels = model_levels(TwoParamModel(alpha, theta), 7)
    k = TauKernel(tau_for(alpha, theta))
    for n in range(1, 8):
        row = two_param_decrement(alpha, theta, n)
        assert row.total() == 1
        assert row == q_from_p_d(levels[n], k)
    for n in range(8, 11):
        assert two_param_decrement(alpha, theta, n).total() == 1


def test_two_param_decrement_examples():
    for n in range(1, 9):
        assert two_param_decrement(0, 1, n) == (F(1, n),) * n
    assert two_param_decrement(F(1, 2), F(1, 2), 3) == HALF3
    m = TwoParamModel(F(1, 4), F(3, 2))
    for n in range(1, 7):
        assert two_param_decrement(m.alpha, m.theta, n)[n] == model_levels(m, n)[n][P([n])]


def test_eppf_round_trip():
    m = TwoParamModel(F(3, 4), 2)
    levels = model_levels(m, 6)
    assert matrix_levels(full_matrix(invert_p_to_q(levels))) == levels


def test_matrix_json_shape():
    Q = full_matrix(HALF3)
    assert Q.n_max == 3 and Q.row(1) == (1,)
    assert DecrementMatrix(Q.rows) == Q and hash(DecrementMatrix(Q.rows)) == hash(Q)


def test_sampler_trivial_cases():
    rng = make_rng(3)
    blocks = full_matrix(DecrementRow([0, 0, 0, 1]))
    singles = full_matrix(DecrementRow([1, 0, 0, 0]))
    assert {sample_composition(blocks, 4, rng) for _ in range(50)} == {(4,)}
    assert {sample_composition(singles, 4, rng) for _ in range(50)} == {(1, 1, 1, 1)}


def test_sampler_frequencies_uniform_n3():
    Q = full_matrix(UNIFORM3)
    rng = make_rng(42)
    N = 100_000
    counts = Counter(sample_composition(Q, 3, rng) for _ in range(N))
    for c in enumerate_compositions(3):
        p = float(composition_probability(Q, c))
        assert abs(counts[c] - N * p) <= 3 * sqrt(N * p * (1 - p))


rows = st.lists(st.integers(0, 9), min_size=1, max_size=7).filter(any).map(
    lambda w: DecrementRow([F(x, sum(w)) for x in w]))


@settings(max_examples=60, deadline=None)
@given(rows)
def test_round_trip_property(row):
    levels = matrix_levels(full_matrix(row))
    assert invert_p_to_q(levels) == row


@settings(max_examples=40, deadline=None)
@given(rows, st.integers(1, 7))
def test_projection_is_a_distribution(row, m):
    m = min(m, row.n)
    proj = hypgeom_project(row, m)
    assert proj.is_distribution()
    assert hypgeom_project(row, 1) == (1,)
