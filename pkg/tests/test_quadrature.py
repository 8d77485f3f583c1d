import math

import numpy as np
import pytest

from levyma.errors import AccuracyError
from levyma.quadrature import (
    adaptive_gk,
    integrate_cells,
    integrate_lower_tail,
    integrate_upper_tail,
    quad_singular_left,
    quad_singular_right,
)


def test_singular_left_sqrt():
    val, err = quad_singular_left(lambda x: x ** -0.5, 0.0, 1.0, -0.5, 1e-10)
    assert val == pytest.approx(2.0, rel=1e-9)


def test_singular_right():
    val, err = quad_singular_right(lambda x: (1 - x) ** -0.25, 0.0, 1.0, -0.25, 1e-10)
    assert val == pytest.approx(1.0 / 0.75, rel=1e-9)


def test_upper_tail_power():
    val, err = integrate_upper_tail(lambda x: x ** -2.0, 1.0, 1e-10)
    assert val == pytest.approx(1.0, rel=1e-9)
    # shifted cutoff
    val, err = integrate_upper_tail(lambda x: x ** -2.0, 5.0, 1e-10)
    assert val == pytest.approx(0.2, rel=1e-9)


def test_upper_tail_negative_cutoff():
    # cutoff need not be positive thanks to the shifted substitution
    val, err = integrate_upper_tail(lambda x: math.exp(-abs(x + 10)), -10.0, 1e-10)
    assert val == pytest.approx(1.0, rel=1e-8)


def test_upper_tail_divergence_flagged():
    with pytest.raises(AccuracyError):
        integrate_upper_tail(lambda x: 1.0 / x, 1.0, 1e-8, power_check=1.0)


def test_lower_tail():
    val, err = integrate_lower_tail(lambda x: math.exp(x), 0.0, 1e-10)
    assert val == pytest.approx(1.0, rel=1e-8)


def test_integrate_cells_with_singular_map():
    # int_0^2 x^{-1/2} dx = 2 sqrt 2, singularity declared at 0
    val, err = integrate_cells(lambda x: x ** -0.5, [0.0, 1.0, 2.0], 1e-10,
                               singular={0.0: (None, -0.5)})
    assert val == pytest.approx(2.0 * math.sqrt(2.0), rel=1e-9)


def test_adaptive_gk_smooth():
    val, err, nev = adaptive_gk(np.sin, 0.0, math.pi, 1e-10)
    assert val == pytest.approx(2.0, rel=1e-9)
    assert err < 1e-8


def test_adaptive_gk_kinked():
    val, err, nev = adaptive_gk(lambda x: np.minimum(x, 1.0 - x), 0.0, 1.0, 1e-9)
    assert val == pytest.approx(0.25, rel=1e-7)
