import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gammaln, gammasgn

from levyma.errors import ParameterError, StationarityError
from levyma.kernels import (
    DiscreteMA,
    FractionalLevyIncrement,
    LfsnIncrement,
    OuExponential,
    PowerLaw,
    arima_coefficients,
    kernel_beta_integral,
    kernel_eval,
    product4_integral,
    rho_k,
)

ALL_KERNELS = [
    PowerLaw(gamma=0.5, alpha=1.5),
    PowerLaw(gamma=-0.25, alpha=2.0, K=0.7),
    LfsnIncrement(H=0.2, beta=1.5),
    FractionalLevyIncrement(rho=0.6),
    OuExponential(lam=1.3),
    DiscreteMA(b=(1.0, -0.5, 0.25)),
]


@pytest.mark.parametrize("spec", ALL_KERNELS)
def test_support_vanishes_left_of_zero(spec):
    xs = np.array([-5.0, -1.0, -1e-9, 0.0])
    assert np.all(kernel_eval(spec, xs) == 0.0)


def test_ou_values():
    ou = OuExponential(lam=1.0)
    assert kernel_eval(ou, 0.0) == 0.0
    assert kernel_eval(ou, 1e-12) == pytest.approx(1.0, abs=1e-9)
    assert kernel_eval(ou, 2.0) == pytest.approx(math.exp(-2.0))


def test_lfsn_value_direct_evaluation():
    # oracle: direct evaluation of the increment kernel exponent H - 1/beta
    spec = LfsnIncrement(H=0.2, beta=1.5)
    expo = 0.2 - 1.0 / 1.5
    expected = 2.0 ** expo - 1.0 ** expo
    assert kernel_eval(spec, 2.0) == pytest.approx(expected, rel=1e-14)
    assert expected == pytest.approx(-0.27637, abs=5e-6)


def test_powerlaw_tail_is_exact_envelope():
    spec = PowerLaw(gamma=0.5, alpha=1.5, K=1.0)
    assert kernel_eval(spec, 4.0) == pytest.approx(4.0 ** -1.5, rel=1e-15)
    assert kernel_eval(spec, 4.0) <= 0.125 + 1e-15


def test_powerlaw_domination_grid():
    spec = PowerLaw(gamma=-0.3, alpha=1.7, K=1.0)
    xs = np.linspace(1e-4, 0.9999, 500)
    assert np.all(np.abs(kernel_eval(spec, xs)) <= xs ** -0.3 + 1e-12)
    xs = np.linspace(1.0, 50.0, 500)
    assert np.all(np.abs(kernel_eval(spec, xs)) <= xs ** -1.7 + 1e-12)


def test_discrete_ma_steps():
    spec = DiscreteMA(b=(2.0, -1.0))
    assert kernel_eval(spec, 0.5) == 2.0
    assert kernel_eval(spec, 1.0) == -1.0
    assert kernel_eval(spec, 1.999) == -1.0
    assert kernel_eval(spec, 2.0) == 0.0
    assert kernel_eval(spec, 0.0) == 0.0   # x <= 0 convention wins at 0


# ---------------------------------------------------------------------------
# FARIMA coefficients
# ---------------------------------------------------------------------------

def gamma_ratio_oracle(j, d):
    # b_j = Gamma(j + d) / (Gamma(d) Gamma(j + 1)), via log-gamma with signs
    sign = gammasgn(j + d) * gammasgn(d)
    return sign * math.exp(gammaln(j + d) - gammaln(d) - gammaln(j + 1))


def test_fractional_weights_small_cases():
    d = 0.3
    b = arima_coefficients([], [], d, 2)
    assert b[0] == 1.0
    assert b[1] == pytest.approx(d, rel=1e-15)
    assert b[2] == pytest.approx(d * (d + 1) / 2, rel=1e-15)
    for j in range(3):
        assert b[j] == pytest.approx(gamma_ratio_oracle(j, d), rel=1e-13)


def test_d_zero_is_identity():
    b = arima_coefficients([], [], 0.0, 5)
    assert b[0] == 1.0
    assert np.all(b[1:] == 0.0)


def test_pure_ar_geometric():
    b = arima_coefficients([0.5], [], 0.0, 10)
    assert np.allclose(b, 0.5 ** np.arange(11), rtol=1e-14)
    # oracle: direct convolution Phi(B) b must reproduce the delta sequence
    conv = np.convolve(b, [1.0, -0.5])[:11]
    expect = np.zeros(11)
    expect[0] = 1.0
    assert np.allclose(conv, expect, atol=1e-14)


def test_ma_convolution():
    b = arima_coefficients([], [0.4], 0.3, 6)
    psi = arima_coefficients([], [], 0.3, 6)
    manual = psi.copy()
    manual[1:] += 0.4 * psi[:-1]
    assert np.allclose(b, manual, rtol=1e-14)


@pytest.mark.parametrize("d", [0.3, -1.2])
def test_gamma_ratio_identity_to_1e10(d):
    b = arima_coefficients([], [], d, 1000)
    js = np.arange(1001)
    oracle = np.array([gamma_ratio_oracle(int(j), d) for j in js])
    rel = np.abs(b - oracle) / np.abs(oracle)
    assert np.max(rel) < 1e-10


def test_stationarity_error():
    with pytest.raises(StationarityError):
        arima_coefficients([1.05], [], 0.0, 4)
    with pytest.raises(StationarityError):
        arima_coefficients([1.0], [], 0.0, 4)     # root on the unit circle


# ---------------------------------------------------------------------------
# rho_k overlap integrals
# ---------------------------------------------------------------------------

def test_rho_zero_kernel():
    assert rho_k(DiscreteMA(b=(0.0, 0.0)), 1.5, 1) == 0.0


@pytest.mark.parametrize("k", [0, 1, 3])
def test_rho_ou_closed_form(k):
    # oracle: int_0^inf e^{-lam beta (x + (x+k))/2} dx = e^{-lam beta k/2}/(lam beta)
    lam, beta = 1.0, 1.5
    expected = math.exp(-lam * beta * k / 2.0) / (lam * beta)
    assert rho_k(OuExponential(lam=lam), beta, k) == pytest.approx(expected, rel=1e-8)


def test_rho_k0_matches_beta_integral():
    spec = PowerLaw(gamma=-0.2, alpha=1.6)
    beta = 1.4
    assert rho_k(spec, beta, 0) == pytest.approx(
        kernel_beta_integral(spec, beta), rel=1e-7)


def test_rho_exchange_symmetry():
    # roles of the two factors exchanged: int |g(x - k) g(x)|^(b/2) dx
    spec = PowerLaw(gamma=0.0, alpha=1.5)
    beta, k = 1.5, 2.0
    direct = rho_k(spec, beta, k)

    def integrand(x):
        return abs(float(kernel_eval(spec, x - k)) * float(kernel_eval(spec, x))) ** (beta / 2)
    swapped = quad(integrand, k, k + 1, points=[k + 1])[0] \
        + quad(integrand, k + 1, 200, limit=300)[0] \
        + quad(lambda u: integrand(1 / u) / u ** 2, 1e-9, 1 / 200, limit=300)[0]
    assert direct == pytest.approx(swapped, rel=1e-6)


def test_rho_lfsn_interior_singularity():
    # oracle: plain scipy quad with singular points declared
    spec = LfsnIncrement(H=0.2, beta=1.5)
    beta, k = 1.5, 1.0

    def integrand(x):
        return abs(float(kernel_eval(spec, x)) * float(kernel_eval(spec, x + k))) ** 0.75
    parts = [quad(integrand, a, b, limit=400, points=None)[0]
             for a, b in [(0, 1), (1, 2), (2, 60)]]
    tail = quad(lambda u: integrand(1 / u) / u ** 2, 1e-8, 1 / 60.0, limit=400)[0]
    oracle = sum(parts) + tail
    assert rho_k(spec, beta, k) == pytest.approx(oracle, rel=2e-5)


def test_rho_truncation_bounded_by_tail_envelope():
    spec = PowerLaw(gamma=0.0, alpha=1.5)
    beta, k = 1.5, 4.0
    ab = 1.5 * 1.5
    for t in (50.0, 100.0):
        lo = rho_k(spec, beta, k, tail_cutoff=t)
        hi = rho_k(spec, beta, k, tail_cutoff=2 * t)
        # envelope bound: integrand <= x^(-alpha beta) beyond t
        tail_bound = t ** (1.0 - ab) / (ab - 1.0)
        assert 0 <= hi - lo < tail_bound
    full = rho_k(spec, beta, k)
    assert full >= rho_k(spec, beta, k, tail_cutoff=100.0)


# ---------------------------------------------------------------------------
# 4-fold product integral
# ---------------------------------------------------------------------------

def test_product4_zero_kernel():
    assert product4_integral(DiscreteMA(b=(0.0,)), 1.5, (1, 2, 3, 4)) == 0.0


@pytest.mark.parametrize("t", [3.0, 7.0])
def test_product4_equal_times_translation_invariance(t):
    spec = PowerLaw(gamma=0.0, alpha=1.5)
    beta = 1.5
    val = product4_integral(spec, beta, (t, t, t, t))
    ref = kernel_beta_integral(spec, beta)
    assert val == pytest.approx(ref, rel=1e-7)


def test_product4_riemann_oracle_and_decay():
    # oracle: fine-grid Riemann sum at k = 8, agreement to 1%
    spec = PowerLaw(gamma=0.0, alpha=1.5)
    beta = 1.5
    k = 8
    times = (1.0, 1.0 + k, 1.0 + k, 1.0 + k)
    val = product4_integral(spec, beta, times)

    s = np.linspace(-2000.0, 1.0, 2_000_001)[:-1]
    s += (s[1] - s[0]) / 2
    prod = np.ones_like(s)
    for t in times:
        prod *= np.abs(kernel_eval(spec, t - s))
    riemann = (prod ** (beta / 4)).sum() * (s[1] - s[0])
    assert val == pytest.approx(riemann, rel=0.01)

    # decay in k: log-log slope at least as steep as -alpha beta/4 net of
    # the t1-anchored factor staying put
    ks = np.array([8, 32, 128, 256])
    vals = [product4_integral(spec, beta, (1.0, 1.0 + kk, 1.0 + kk, 1.0 + kk))
            for kk in ks]
    slope = np.polyfit(np.log(ks), np.log(vals), 1)[0]
    assert slope <= -1.5 * 1.5 / 4 * 3 + 0.75   # 3 separations, wide margin


def test_product4_rejects_bad_times():
    spec = PowerLaw(gamma=0.0, alpha=1.5)
    with pytest.raises(ParameterError):
        product4_integral(spec, 1.5, (0.5, 1, 1, 1))
    with pytest.raises(ParameterError):
        product4_integral(spec, 1.5, (1, 1, 1))


# ---------------------------------------------------------------------------
# |g|^beta integrals
# ---------------------------------------------------------------------------

def test_beta_integral_powerlaw_closed_form():
    # (int_0^1 1 + int_1^inf s^-2.25) = 1 + 1/1.25
    spec = PowerLaw(gamma=0.0, alpha=1.5)
    assert kernel_beta_integral(spec, 1.5) == pytest.approx(1.8, rel=1e-9)


def test_beta_integral_ou_closed_form():
    spec = OuExponential(lam=2.0)
    beta = 1.3
    assert kernel_beta_integral(spec, beta) == pytest.approx(1 / (2.0 * beta), rel=1e-9)


def test_beta_integral_singular_head():
    # gamma beta in (-1, 0): closed form 1/(gamma beta + 1) + 1/(alpha beta - 1)
    spec = PowerLaw(gamma=-0.4, alpha=2.0)
    beta = 1.5
    expected = 1.0 / (1 - 0.6) + 1.0 / (2.0 * 1.5 - 1.0)
    assert kernel_beta_integral(spec, beta) == pytest.approx(expected, rel=1e-9)


def test_beta_integral_lower_cutoff():
    spec = PowerLaw(gamma=0.0, alpha=1.5)
    # int_M^inf s^-2.25 ds = M^-1.25/1.25
    assert kernel_beta_integral(spec, 1.5, lower=4.0) == pytest.approx(
        4.0 ** -1.25 / 1.25, rel=1e-9)
