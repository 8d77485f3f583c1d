import math

import numpy as np
import pytest
from scipy.stats import levy_stable, norm

from levyma.stable import StableDist, stable_tail_constant


def test_cauchy_exact():
    d = StableDist(1.0, 2.0)
    xs = np.array([-3.0, 0.0, 1.0, 10.0])
    assert np.allclose(d.cdf(xs), 0.5 + np.arctan(xs / 2.0) / np.pi, rtol=1e-12)
    assert d.pdf_exact(0.0) == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)


def test_gaussian_exact():
    d = StableDist(2.0, 1.0)
    xs = np.array([-1.0, 0.3, 2.0])
    assert np.allclose(d.cdf(xs), norm.cdf(xs, scale=math.sqrt(2.0)), rtol=1e-10)


@pytest.mark.parametrize("beta", [1.3, 1.5, 1.8])
def test_cdf_against_scipy(beta):
    d = StableDist(beta, 1.0)
    xs = np.array([0.1, 0.5, 1.0, 2.0, 5.0, 20.0, 100.0])
    ref = levy_stable.cdf(xs, beta, 0.0)
    assert np.max(np.abs(d.cdf(xs) - ref)) < 2e-5
    assert np.max(np.abs(d.cdf(-xs) - levy_stable.cdf(-xs, beta, 0.0))) < 2e-5


def test_pdf_against_scipy():
    d = StableDist(1.5, 1.0)
    xs = np.array([0.0, 0.7, 3.0])
    ref = levy_stable.pdf(xs, 1.5, 0.0)
    assert np.max(np.abs(d.pdf(xs) - ref)) < 1e-6


def test_cdf_monotone_and_symmetric():
    d = StableDist(1.6, 0.8)
    xs = np.linspace(-50, 50, 501)
    vals = d.cdf(xs)
    assert np.all(np.diff(vals) >= -1e-12)
    assert np.allclose(vals + d.cdf(-xs), 1.0, atol=1e-8)


def test_tail_constant_matches_scipy_far_tail():
    beta = 1.5
    c = stable_tail_constant(beta)
    x = 50.0
    ref = levy_stable.sf(x, beta, 0.0)
    assert c * x ** -beta == pytest.approx(ref, rel=0.05)
