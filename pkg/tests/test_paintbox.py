from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from regenstruct.core import DomainError, ValidationError, enumerate_compositions, make_rng
from regenstruct.eppf import check_consistent
from regenstruct.paintbox import (
    LEBESGUE,
    BetaComponent,
    LevyMeasureSpec,
    UnsupportedSpec,
    beta_spec,
    decrement_from_paintbox,
    dirac,
    laplace_exponent,
    laplace_exponent_direct,
    paintbox_sample_report,
    parse_spec,
    phi_nr,
    sample_composition_via_paintbox,
)
from regenstruct.regen import full_matrix, hypgeom_project, matrix_levels, two_param_decrement

F = Fraction

SPECS = {
    "hook": dirac(1, 1, drift=1),
    "half": dirac(F(1, 2)),
    "lebesgue": LEBESGUE,
    "stable": beta_spec(1, F(-1, 2), F(1, 2)),
    "mixed": LevyMeasureSpec(((F(1, 3), 2), (1, F(1, 5))), BetaComponent(F(1, 4), F(3, 2), 2), F(1, 7)),
}


def test_hook_phi():
    for d in (F(1, 2), 1, 2):
        spec = dirac(1, 1, d)
        for n in range(2, 9):
            assert phi_nr(spec, n, 1) == n * d
            assert phi_nr(spec, n, n) == 1
            assert all(phi_nr(spec, n, r) == 0 for r in range(2, n))
            assert laplace_exponent(spec, n) == n * d + 1


def test_lebesgue_phi():
    for n in range(1, 9):
        for r in range(1, n + 1):
            assert phi_nr(LEBESGUE, n, r) == F(1, n + 1)
        assert laplace_exponent(LEBESGUE, n) == F(n, n + 1)
        assert decrement_from_paintbox(LEBESGUE, n) == (F(1, n),) * n


def test_n_one_is_first_moment_plus_drift():
    spec = SPECS["mixed"]
    first_moment = sum(w * u for u, w in spec.atoms) + spec.beta.c
    assert phi_nr(spec, 1, 1) == spec.drift + first_moment


def test_half_atom_rows():
    for n in range(1, 10):
        assert decrement_from_paintbox(SPECS["half"], n) == tuple(F(comb(n, r), 2 ** n - 1)
                                                                   for r in range(1, n + 1))


def test_hook_rows():
    row = decrement_from_paintbox(dirac(1, 1, 1), 3)
    assert row == (F(3, 4), 0, F(1, 4))


@pytest.mark.parametrize("name", sorted(SPECS))
def test_laplace_exponent_two_ways(name):
    for n in range(1, 10):
        assert laplace_exponent(SPECS[name], n) == laplace_exponent_direct(SPECS[name], n)


@pytest.mark.parametrize("name", sorted(SPECS))
def test_projection_coherence(name):
    spec = SPECS[name]
    for n in range(1, 9):
        top = decrement_from_paintbox(spec, n)
        assert top.total() == 1
        for m in range(1, n + 1):
            assert hypgeom_project(top, m) == decrement_from_paintbox(spec, m)


@pytest.mark.parametrize("name", sorted(SPECS))
def test_paintbox_structures_consistent(name):
    check_consistent(matrix_levels(full_matrix(decrement_from_paintbox(SPECS[name], 7))))


@pytest.mark.parametrize("alpha", [F(1, 4), F(1, 3), F(1, 2), F(3, 4)])
def test_theta_equals_alpha_is_a_beta_paintbox(alpha):
    spec = beta_spec(1, -alpha, alpha)
    for n in range(1, 7):
        assert decrement_from_paintbox(spec, n) == two_param_decrement(alpha, alpha, n)
    assert decrement_from_paintbox(beta_spec(1, F(-1, 2), F(1, 2)), 2) == (F(2, 3), F(1, 3))


@pytest.mark.parametrize("theta", [F(1, 2), 1, 2, 3])
def test_ewens_is_a_beta_paintbox(theta):
    spec = beta_spec(1, 1, theta)
    for n in range(1, 7):
        assert decrement_from_paintbox(spec, n) == two_param_decrement(0, theta, n)


def test_rows_sum_to_one_up_to_12():
    for spec in SPECS.values():
        for n in range(1, 13):
            assert decrement_from_paintbox(spec, n).total() == 1


@settings(max_examples=40, deadline=None)
@given(factor=st.fractions(min_value=F(1, 10), max_value=10, max_denominator=10), n=st.integers(1, 8))
def test_scale_invariance(factor, n):
    for spec in SPECS.values():
        assert decrement_from_paintbox(spec.scaled(factor), n) == decrement_from_paintbox(spec, n)


def test_spec_validation():
    with pytest.raises(DomainError):
        LevyMeasureSpec()
    with pytest.raises(DomainError):
        dirac(0)
    with pytest.raises(DomainError):
        dirac(F(1, 2), -1)
    with pytest.raises(DomainError):
        beta_spec(1, -1, 1)
    with pytest.raises(DomainError):
        beta_spec(1, 1, 0)
    with pytest.raises(DomainError):
        phi_nr(LEBESGUE, 3, 4)


def test_parse_spec():
    spec = parse_spec({"atoms": [{"u": "1/2", "w": "1"}],
                       "beta": {"c": "1", "sigma": "-1/2", "theta": "1/2"}, "drift": "0"})
    assert spec.atoms == ((F(1, 2), F(1)),) and spec.beta.sigma == F(-1, 2)
    with pytest.raises(ValidationError):
        parse_spec({"atoms": [{"u": "1/2"}]})


def test_beta_total_mass():
    assert BetaComponent(1, 1, 1).total_mass() == 2
    assert BetaComponent(1, F(-1, 2), F(1, 2)).total_mass() is None


def test_sampler_refusals():
    rng = make_rng(0)
    with pytest.raises(UnsupportedSpec):
        sample_composition_via_paintbox(dirac(1, 1, drift=1), 3, rng)
    with pytest.raises(UnsupportedSpec):
        sample_composition_via_paintbox(SPECS["stable"], 3, rng)


def test_sampler_unit_atom_gives_one_block():
    rng = make_rng(5)
    assert {sample_composition_via_paintbox(dirac(1), 4, rng) for _ in range(30)} == {(4,)}


def test_sampler_hits_are_singletons():
    class OnTheBoundary:
        def random(self):
            return 0.5

    # all uniforms sit on the first point of R, each becomes its own block
    out = sample_composition_via_paintbox(dirac(F(1, 2)), 3, OnTheBoundary(), _draw=lambda g: 0.5)
    assert out == (1, 1, 1)


def test_sampler_half_atom_n2_exact_law():
    # P((2)) = 1/3 and P((1,1)) = 2/3
    report = paintbox_sample_report(SPECS["half"], 2, 30_000, seed=11)
    assert report.exact[(2,)] == F(1, 3)
    assert all(report.within_sigma(3).values())


def test_sampler_reproducible():
    def draws(seed):
        rng = make_rng(seed)
        return [sample_composition_via_paintbox(LEBESGUE, 6, rng) for _ in range(50)]

    assert draws(9) == draws(9)


def test_sampler_lebesgue_frequencies():
    report = paintbox_sample_report(LEBESGUE, 4, 40_000, seed=3)
    assert sum(report.empirical.values()) == 40_000
    assert set(report.empirical) <= set(enumerate_compositions(4))
    assert all(report.within_sigma(3).values())


def test_mixed_sampler_frequencies():
    spec = LevyMeasureSpec(((F(1, 3), 2),), BetaComponent(F(1, 4), F(3, 2), 2))
    report = paintbox_sample_report(spec, 4, 40_000, seed=8)
    assert all(report.within_sigma(3).values())
