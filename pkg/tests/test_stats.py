import math

import numpy as np
import pytest
from scipy.stats import norm

from levyma.errors import DegenerateVarianceError, ParameterError, WrongVariantError
from levyma.kernels import OuExponential
from levyma.rng import RngStream, SymmetricStable
from levyma.simulate import ProcessModel, SimGrid
from levyma.stats import (
    Cos,
    DistanceEstimate,
    GaussBump,
    Sin,
    SmoothedIndicator,
    compute_vn,
    estimate_variance,
    expected_f,
    fit_rate,
    kolmogorov_distance,
    wasserstein1_distance,
)

OU = ProcessModel(SymmetricStable(1.5, 1.0), OuExponential(lam=1.0))


# ---------------------------------------------------------------------------
# test functions and their means
# ---------------------------------------------------------------------------

def test_function_bounds_exposed():
    f = Cos(theta=2.0)
    assert (f.f_sup, f.df_sup, f.d2f_sup) == (1.0, 2.0, 4.0)
    g = SmoothedIndicator(threshold=0.0, bandwidth=0.1)
    assert g.f_sup == 1.0 and g.df_sup > 0 and g.d2f_sup > 0
    with pytest.raises(ParameterError):
        SmoothedIndicator(threshold=0.0, bandwidth=0.0)


def test_smoothed_indicator_shape():
    f = SmoothedIndicator(threshold=1.0, bandwidth=0.5)
    assert f(0.49) == 1.0
    assert f(1.51) == 0.0
    xs = np.linspace(0.5, 1.5, 101)
    vals = f(xs)
    assert np.all(np.diff(vals) <= 1e-12)
    assert f(1.0) == pytest.approx(0.5, abs=1e-9)


def test_expected_f_sin_is_zero():
    assert expected_f(OU, Sin(theta=3.0)) == 0.0


def test_expected_f_cos_analytic_value():
    # sigma_g^beta = 1/(lam beta) = 2/3, so E cos(X) = exp(-2/3)
    val = expected_f(OU, Cos(theta=1.0))
    assert val == pytest.approx(math.exp(-2.0 / 3.0), rel=1e-10)
    # oracle: quadrature against the inverted stable density agrees to 1e-4
    val_q = expected_f(OU, Cos(theta=1.0, mean_mode="quadrature"), tol=1e-6)
    assert abs(val - val_q) < 1e-4


def test_expected_f_analytic_rejects_other_f():
    with pytest.raises(WrongVariantError):
        expected_f(OU, GaussBump(center=0.0, width=1.0, mean_mode="analytic"))


def test_expected_f_gauss_bump_cross_oracle():
    f = GaussBump(center=0.5, width=1.0)
    val_q = expected_f(OU, f, tol=1e-8)
    fm = GaussBump(center=0.5, width=1.0, mean_mode="monte-carlo")
    val_mc = expected_f(OU, fm, stream=RngStream(2, 0))
    draws = 100_000
    # bound the MC stderr by the sample spread of f on stable draws
    se = 0.5 / math.sqrt(draws)
    assert abs(val_q - val_mc) < 4 * se


def test_expected_f_smoothed_indicator_at_zero_is_half():
    f = SmoothedIndicator(threshold=0.0, bandwidth=0.1)
    assert expected_f(OU, f, tol=1e-8) == pytest.approx(0.5, abs=1e-6)


# ---------------------------------------------------------------------------
# V_n
# ---------------------------------------------------------------------------

def test_vn_trivial_cases():
    f = Cos(theta=0.0)        # constant 1
    assert compute_vn([0.7, -1.0, 3.0], f, 1.0) == 0.0
    val = compute_vn([0.0], Cos(theta=1.0), 0.5)
    assert val == pytest.approx(0.5, rel=1e-15)
    with pytest.raises(ParameterError):
        compute_vn([], Cos(theta=1.0), 0.0)


def test_vn_matches_compensated_sum_oracle():
    rng = np.random.default_rng(5)
    path = rng.normal(size=10_001)
    f = Cos(theta=1.3)
    mean = 0.4321
    val = compute_vn(path, f, mean)
    # Kahan-style compensated oracle
    s = 0.0
    c = 0.0
    for v in np.cos(1.3 * path) - mean:
        y = v - c
        t = s + y
        c = (t - s) - y
        s = t
    oracle = s / math.sqrt(path.size)
    assert val == pytest.approx(oracle, rel=1e-12, abs=1e-12)


def test_vn_permutation_invariance_exact():
    rng = np.random.default_rng(6)
    path = rng.normal(size=4097)
    f = Cos(theta=0.7)
    mean = 0.3
    v1 = compute_vn(path, f, mean)
    v2 = compute_vn(path[::-1].copy(), f, mean)
    v3 = compute_vn(rng.permutation(path), f, mean)
    assert v1 == v2 == v3


# ---------------------------------------------------------------------------
# variance estimation
# ---------------------------------------------------------------------------

def test_estimate_variance_ou():
    grid = SimGrid(m=1, horizon=1.0, n=4096)
    est = estimate_variance(OU, Cos(theta=1.0), grid, j_max=50, R=400,
                            stream=RngStream(2025, 0))
    c = est.per_lag
    # covariances decay and become statistically indistinguishable from 0
    assert c[0] > 0
    assert abs(c[5]) < abs(c[0])
    mask = np.arange(c.size) >= 20
    assert np.all(np.abs(c[mask]) < 3.0 * np.maximum(est.per_lag_stderr[mask], 1e-12))
    # Lemma-style convergence: direct variance of V_n near the lag-window sum
    assert abs(est.vn2 - est.v2) < 3.0 * (est.v2_stderr + est.vn2_stderr)


def test_estimate_variance_degenerate():
    grid = SimGrid(m=1, horizon=1.0, n=256)
    with pytest.raises(DegenerateVarianceError):
        estimate_variance(OU, Cos(theta=0.0), grid, j_max=10, R=8,
                          stream=RngStream(1, 0))


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------

def test_kolmogorov_single_sample_at_median():
    assert kolmogorov_distance([0.0], norm.cdf) == pytest.approx(0.5)


def test_kolmogorov_quantile_grid():
    r = 200
    q = norm.ppf((np.arange(1, r + 1) - 0.5) / r)
    assert kolmogorov_distance(q, norm.cdf) == pytest.approx(1.0 / (2 * r), abs=1e-12)


def test_kolmogorov_normal_sample_within_ks_band():
    r = 10 ** 5
    draws = RngStream(11, 0).generator.normal(size=r)
    assert kolmogorov_distance(draws, norm.cdf) < 1.95 / math.sqrt(r)


def test_kolmogorov_increasing_transform_invariance():
    samples = np.array([0.1, 0.4, 0.9, 2.0])
    ref = norm.cdf
    t = lambda x: x ** 3 + 2.0 * x          # strictly increasing
    tinv_cdf = lambda y: ref(np.array([_inv_t(v) for v in np.atleast_1d(y)]))
    d1 = kolmogorov_distance(samples, ref)
    d2 = kolmogorov_distance(t(samples), tinv_cdf)
    assert d1 == pytest.approx(d2, abs=1e-12)


def _inv_t(y):
    from scipy.optimize import brentq
    return brentq(lambda x: x ** 3 + 2.0 * x - y, -50, 50)


def test_kolmogorov_bounded_by_one():
    assert kolmogorov_distance([1e9, 2e9], norm.cdf) <= 1.0


def test_wasserstein_quantile_grid_and_shift():
    r = 500
    q = norm.ppf((np.arange(1, r + 1) - 0.5) / r)
    assert wasserstein1_distance(q, norm.ppf) == pytest.approx(0.0, abs=1e-12)
    assert wasserstein1_distance(q + 0.7, norm.ppf) == pytest.approx(0.7, abs=1e-12)


def test_wasserstein_matches_cdf_integral_oracle():
    # oracle: trapezoid integration of |F_hat - Phi|
    r = 2000
    draws = np.sort(RngStream(12, 0).generator.normal(size=r))
    val = wasserstein1_distance(draws, norm.ppf)
    xs = np.linspace(-6, 6, 200_001)
    fhat = np.searchsorted(draws, xs, side="right") / r
    diff = np.abs(fhat - norm.cdf(xs))
    oracle = np.trapz(diff, xs)
    assert val == pytest.approx(oracle, abs=5.0 / r)


def test_wasserstein_jensen_lower_bound():
    r = 300
    draws = RngStream(13, 0).generator.normal(size=r) + 0.3
    q = norm.ppf((np.arange(1, r + 1) - 0.5) / r)
    val = wasserstein1_distance(draws, norm.ppf)
    assert val >= abs(draws.mean() - q.mean()) - 1e-12


def test_distance_estimate_validation():
    with pytest.raises(ParameterError):
        DistanceEstimate(metric="dK", value=1.5, mc_stderr=0.0, R=10, n=10)
    with pytest.raises(ParameterError):
        DistanceEstimate(metric="dW", value=-0.1, mc_stderr=0.0, R=10, n=10)
    DistanceEstimate(metric="dW", value=2.5, mc_stderr=0.1, R=10, n=10)


# ---------------------------------------------------------------------------
# rate fitting
# ---------------------------------------------------------------------------

def test_fit_rate_exact_power():
    ns = [64, 128, 256, 512]
    vals = [3.0 * n ** -0.5 for n in ns]
    fit = fit_rate(ns, vals)
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)
    assert fit.stderr == pytest.approx(0.0, abs=1e-12)
    assert fit.intercept == pytest.approx(math.log(3.0), abs=1e-10)


def test_fit_rate_log_factor_band():
    ns = [2 ** e for e in range(6, 13)]
    vals = [n ** -0.5 * math.log(n) for n in ns]
    fit = fit_rate(ns, vals)
    assert -0.5 < fit.slope < -0.30


def test_fit_rate_zero_weight_outlier():
    ns = [64, 128, 256, 512]
    vals = [3.0 * n ** -0.5 for n in ns[:-1]] + [100.0]
    fit = fit_rate(ns, vals, weights=[1.0, 1.0, 1.0, 0.0])
    assert fit.slope == pytest.approx(-0.5, abs=1e-12)


def test_fit_rate_domain_errors():
    with pytest.raises(ParameterError):
        fit_rate([1, 2], [1.0, 0.5])
    with pytest.raises(ParameterError):
        fit_rate([1, 2, 3], [1.0, -0.5, 0.2])
