import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levyest.ecf import FrequencyGrid, SplitSample, cf_derivatives, split_halves
from levyest.errors import InputError, ParameterError
from levyest.models import LevyGamma, ModelSpec
from levyest.npest import (
    DensityEstimate,
    Estimator,
    Method,
    SpectralEstimate,
    StateGrid,
    closed_form_sinc_estimate,
    cutoff_weights,
    g_bar_star,
    h_bar_star,
    h_bar_norm_closed_form,
    h_hat_star,
    invert_on_cutoff,
    p_bar_star,
    sinc,
    spectral_estimate,
    squared_norm,
    squared_norms,
    truncated_levy_density,
)
from levyest.paramest import estimate_b, estimate_c_ell
from levyest.sim import SampleIncrements, SeedSpec, simulate_increments

GRID = FrequencyGrid.for_cutoff(4.0, 50)


def sample(z, delta=0.1):
    return SampleIncrements(np.asarray(z, dtype=float), delta)


def centre(grid):
    return grid.count // 2


@pytest.fixture(scope="module")
def gamma_samples():
    model = ModelSpec(0.0, 0.0, LevyGamma(1.0, 1.0))
    return [simulate_increments(model, 50_000, 0.01, SeedSpec(100, k)) for k in range(20)]


# -- spectral estimators ---------------------------------------------------------------


def test_single_point_formulas():
    a, d = 1.3, 0.2
    s = sample([a], d)
    cf = cf_derivatives(s, 3, GRID)
    u = GRID.points()
    e = np.exp(1j * u * a)
    np.testing.assert_allclose(h_bar_star(cf).values, a ** 2 * e / d, atol=1e-12)
    np.testing.assert_allclose(p_bar_star(cf).values, a ** 3 * e / d, atol=1e-12)
    np.testing.assert_allclose(g_bar_star(cf).values, a * e / d, atol=1e-12)


@pytest.mark.parametrize("target", list(Estimator))
def test_zero_sample_gives_zero(target):
    spec = spectral_estimate(sample([0.0, 0.0]), target, GRID)
    assert np.all(spec.values == 0)
    est = invert_on_cutoff(spec, 2.0, StateGrid(-3, 3, 31))
    assert np.all(est.values == 0)


def test_h_hat_equal_singletons_cancel():
    a = 0.8
    split = SplitSample(sample([a]), sample([a]))
    np.testing.assert_allclose(h_hat_star(split, GRID).values, 0, atol=1e-12)


def test_h_hat_mismatched_delta():
    bad = SplitSample.__new__(SplitSample)
    object.__setattr__(bad, "first_half", sample([1.0], 0.1))
    object.__setattr__(bad, "second_half", sample([1.0], 0.2))
    with pytest.raises(InputError):
        h_hat_star(bad, GRID)


def test_missing_order():
    cf = cf_derivatives(sample([1.0]), 2, GRID)
    with pytest.raises(InputError):
        p_bar_star(cf)


def test_zero_frequency_identities():
    z = np.random.default_rng(0).normal(0.3, 1.0, 1001)
    s = sample(z, 0.05)
    cf = cf_derivatives(s, 3, GRID)
    c = centre(GRID)
    assert g_bar_star(cf).values[c] == pytest.approx(estimate_b(s), rel=1e-13)
    assert h_bar_star(cf).values[c] == pytest.approx(estimate_c_ell(s, 2), rel=1e-13)
    assert p_bar_star(cf).values[c] == pytest.approx(estimate_c_ell(s, 3), rel=1e-13)


def test_h_hat_gamma_at_zero(gamma_samples):
    g = FrequencyGrid.symmetric(1.0, 1)
    vals = [h_hat_star(split_halves(s), g).values[1] for s in gamma_samples]
    np.testing.assert_allclose(np.imag(vals), 0, atol=1e-12)
    assert abs(np.median(np.real(vals)) - 1.0) < 0.1


def test_p_bar_gamma_at_zero(gamma_samples):
    g = FrequencyGrid.symmetric(1.0, 1)
    vals = [p_bar_star(cf_derivatives(s, 3, g)).values[1].real for s in gamma_samples]
    assert abs(np.median(vals) - 2.0) < 0.15


def test_g_bar_gamma_at_zero(gamma_samples):
    s = gamma_samples[0]
    g = FrequencyGrid.symmetric(1.0, 1)
    v = g_bar_star(cf_derivatives(s, 1, g)).values[1]
    assert abs(v - 1.0) <= 3 * math.sqrt(1.0 / (s.n * s.delta))


@pytest.mark.parametrize("target", list(Estimator))
def test_conjugate_symmetry(target):
    z = np.random.default_rng(1).standard_normal(400)
    v = spectral_estimate(sample(z), target, GRID).values
    np.testing.assert_allclose(v[::-1], np.conj(v), atol=1e-12)


# -- inversion --------------------------------------------------------------------------


def test_single_point_inversion_analytic():
    a, m = 1.0, 5.0
    g = FrequencyGrid.symmetric(math.pi * m, 2 ** 11)
    spec = h_bar_star(cf_derivatives(sample([a], 1.0), 2, g))
    # trapezoid error grows like h^2 |a - x|, so compare near the atom
    xg = StateGrid(0.5, 1.5, 41)
    est = invert_on_cutoff(spec, m, xg)
    x = xg.points()
    np.testing.assert_allclose(est.values, a * a * m * sinc(m * (a - x)), atol=1e-6)


def test_single_point_inversion_discrete_kernel():
    # the trapezoid sum of e^{iut} over K-panel halves is a Dirichlet kernel minus the endpoint
    a, m, d = 1.0, 5.0, 0.5
    k = 2 ** 11
    g = FrequencyGrid.symmetric(math.pi * m, k)
    h = g.spacing
    spec = h_bar_star(cf_derivatives(sample([a], d), 2, g))
    xg = StateGrid(-10, 10, 333)
    est = invert_on_cutoff(spec, m, xg)
    t = a - xg.points()
    dirichlet = np.where(np.abs(t) < 1e-14, 2 * k + 1.0,
                         np.sin((k + 0.5) * h * t) / np.where(t == 0, 1.0, np.sin(h * t / 2)))
    expected = (a * a / d) * h * (dirichlet - np.cos(k * h * t)) / (2 * math.pi)
    np.testing.assert_allclose(est.values, expected, atol=1e-9)


@pytest.mark.parametrize("target", [Estimator.G_BAR, Estimator.H_BAR, Estimator.P_BAR])
def test_sinc_sum_matches_quadrature(target):
    rng = np.random.default_rng(2)
    z = rng.normal(0.0, 2.0, 200)
    m = 3.0
    s = sample(z, 0.1)
    g = FrequencyGrid.symmetric(math.pi * m, 2 ** 13)
    xg = StateGrid(-8, 8, 161)
    quad = invert_on_cutoff(spectral_estimate(s, target, g), m, xg)
    closed = closed_form_sinc_estimate(s, target, m, xg)
    assert quad.method is Method.QUADRATURE and closed.method is Method.SINC_SUM
    np.testing.assert_allclose(quad.values, closed.values, atol=1e-4)


def test_h_hat_sinc_sum_matches_quadrature():
    rng = np.random.default_rng(3)
    s = sample(rng.normal(0.0, 1.0, 300), 0.1)
    split = split_halves(s)
    m = 2.0
    g = FrequencyGrid.symmetric(math.pi * m, 2 ** 13)
    xg = StateGrid(-5, 5, 101)
    quad = invert_on_cutoff(h_hat_star(split, g), m, xg)
    closed = closed_form_sinc_estimate(split, Estimator.H_HAT, m, xg)
    np.testing.assert_allclose(quad.values, closed.values, atol=1e-4)


def test_closed_form_single_point_at_atom():
    a, m, d = 0.7, 4.0, 0.25
    xg = StateGrid(a, a + 1, 2)
    est = closed_form_sinc_estimate(sample([a], d), Estimator.H_BAR, m, xg)
    assert est.values[0] == pytest.approx(a * a * m / d, rel=1e-14)
    zero = closed_form_sinc_estimate(sample([0.0] * 5), Estimator.H_BAR, m, xg)
    assert np.all(zero.values == 0)


def test_closed_form_input_errors():
    xg = StateGrid()
    with pytest.raises(InputError):
        closed_form_sinc_estimate(sample([1.0, 2.0]), Estimator.H_HAT, 1.0, xg)
    with pytest.raises(InputError):
        closed_form_sinc_estimate(split_halves(sample([1.0, 2.0])), Estimator.H_BAR, 1.0, xg)
    with pytest.raises(ParameterError):
        closed_form_sinc_estimate(sample([1.0]), Estimator.H_BAR, 0.0, xg)


@pytest.mark.parametrize("target", list(Estimator))
def test_realness(target, caplog):
    z = np.random.default_rng(4).exponential(1.0, 500) - 0.5
    spec = spectral_estimate(sample(z), target, GRID)
    est, im = invert_on_cutoff(spec, 3.7, StateGrid(), return_imag=True)
    assert np.all(np.abs(im) <= 1e-8 * (1 + np.abs(est.values)))
    assert np.all(np.isfinite(est.values))
    assert "imaginary residual" not in caplog.text


def test_coverage_errors():
    spec = h_bar_star(cf_derivatives(sample([1.0]), 2, GRID))
    with pytest.raises(InputError):
        invert_on_cutoff(spec, 4.5, StateGrid())
    with pytest.raises(InputError):
        squared_norm(spec, 4.5)
    with pytest.raises(ParameterError):
        cutoff_weights(GRID, 0.0)
    # the grid edge itself is admissible
    assert squared_norm(spec, 4.0) > 0


def test_sinc_values():
    assert sinc(0.0) == 1.0
    assert sinc(1e-12) == pytest.approx(1.0)
    assert sinc(1.0) == pytest.approx(0.0, abs=1e-16)
    assert sinc(0.5) == pytest.approx(2 / math.pi)


# -- norms ------------------------------------------------------------------------------


def test_norm_of_zero_spec():
    spec = h_bar_star(cf_derivatives(sample([0.0]), 2, GRID))
    assert squared_norm(spec, 2.0) == 0.0


def test_single_point_norm():
    a, d, m = 1.2, 0.5, 3.0
    g = FrequencyGrid.symmetric(math.pi * m, 600)
    spec = h_bar_star(cf_derivatives(sample([a], d), 2, g))
    expected = a ** 4 * m / d ** 2
    assert squared_norm(spec, m) == pytest.approx(expected, rel=1e-6)
    assert h_bar_norm_closed_form(sample([a], d), m) == pytest.approx(expected, rel=1e-14)


@pytest.mark.parametrize("n", [50, 500])
def test_parseval(n):
    z = np.random.default_rng(n).normal(0.2, 1.3, n)
    s = sample(z, 0.05)
    for m in (0.5, 2.5, 10.0):
        g = FrequencyGrid.symmetric(math.pi * m, 2 ** 13)
        spec = h_bar_star(cf_derivatives(s, 2, g))
        assert squared_norm(spec, m) == pytest.approx(h_bar_norm_closed_form(s, m), rel=1e-6)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from(list(Estimator)))
def test_norm_monotone_and_batch_consistent(seed, target):
    z = np.random.default_rng(seed).standard_cauchy(64).clip(-30, 30)
    spec = spectral_estimate(sample(z), target, GRID)
    ms = np.arange(1, 41) / 10
    batch = squared_norms(spec, ms)
    single = np.array([squared_norm(spec, m) for m in ms])
    assert np.all(np.diff(batch) >= 0)
    assert np.all(np.diff(single) >= 0)
    np.testing.assert_allclose(batch, single, rtol=1e-12, atol=0)


def test_squared_norms_on_asymmetric_grid():
    g = FrequencyGrid(-10.0, 10.5, 1001)
    spec = h_bar_star(cf_derivatives(sample([0.3, -1.0]), 2, g))
    ms = [0.5, 1.0, 2.0]
    np.testing.assert_allclose(squared_norms(spec, ms), [squared_norm(spec, m) for m in ms])


# -- truncation -------------------------------------------------------------------------


def test_truncated_density():
    xg = StateGrid(-2, 2, 41)
    x = xg.points()
    est = DensityEstimate(xg, x ** 2 * np.exp(-np.abs(x)), 1.0, Estimator.H_BAR, Method.QUADRATURE)
    n = truncated_levy_density(est, 0.5)
    inside = np.abs(x) <= 0.5
    assert np.all(n.values[inside] == 0)
    np.testing.assert_allclose(n.values[~inside], np.exp(-np.abs(x[~inside])))
    zero = DensityEstimate(xg, np.zeros(41), 1.0, Estimator.P_BAR, Method.QUADRATURE)
    assert np.all(truncated_levy_density(zero, 1.0).values == 0)
    with pytest.raises(ParameterError):
        truncated_levy_density(est, 0.0)


def test_state_grid_validation():
    with pytest.raises(InputError):
        StateGrid(1.0, 1.0, 10)
    with pytest.raises(InputError):
        StateGrid(0.0, 1.0, 1)
    assert StateGrid().points().size == 500


def test_estimator_tags():
    assert [e.power for e in Estimator] == [1, 2, 2, 3]
    assert Estimator("h_hat").target == "h"
    assert isinstance(SpectralEstimate, type)
