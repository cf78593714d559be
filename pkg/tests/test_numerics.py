import math

import mpmath as mp
import numpy as np
import pytest

from tunneltimes.numerics import (coshc_sq, gauss_legendre_panels,
                                  golden_section_max, parabolic_refine,
                                  ridders_derivative, sinhc_sq)

mp.mp.dps = 40


@pytest.mark.parametrize("z", [-400.0, -9.0, -1e-3, -1e-8, 0.0, 1e-8, 1e-3, 4.0, 900.0])
def test_sinhc_coshc_match_mpmath(z):
    r = mp.sqrt(mp.mpf(z)) if z >= 0 else 1j * mp.sqrt(-mp.mpf(z))
    want_s = float(mp.re(mp.sinh(r) / r)) if z != 0 else 1.0
    want_c = float(mp.re(mp.cosh(r))) if z != 0 else 1.0
    assert sinhc_sq(z) == pytest.approx(want_s, rel=1e-14)
    assert coshc_sq(z) == pytest.approx(want_c, rel=1e-14)


def test_sinhc_vectorized_matches_scalar():
    zs = np.array([-25.0, -1e-7, 0.0, 1e-7, 2.5, 1e4])
    vec_s = sinhc_sq(zs)
    vec_c = coshc_sq(zs)
    for i, z in enumerate(zs):
        assert vec_s[i] == sinhc_sq(float(z))
        assert vec_c[i] == coshc_sq(float(z))


def test_golden_section_max_quadratic():
    xm = golden_section_max(lambda x: -(x - 0.37) ** 2, 0.0, 1.0, tol=1e-13)
    assert abs(xm - 0.37) < 1e-10


def test_golden_section_max_needs_interval():
    with pytest.raises(ValueError):
        golden_section_max(lambda x: x, 1.0, 1.0)


def test_ridders_derivative_trig():
    d, err = ridders_derivative(math.sin, 0.7, 0.1)
    assert abs(d - math.cos(0.7)) < 1e-11
    assert err < 1e-9


def test_ridders_rejects_zero_step():
    with pytest.raises(ValueError):
        ridders_derivative(math.sin, 0.0, 0.0)


def test_gauss_panels_integrate_polynomial_exactly():
    ks, wts = gauss_legendre_panels(-1.0, 3.0, panels=3, order=6)
    # order-6 Gauss is exact through degree 11
    val = float(np.sum(wts * ks**9))
    exact = (3.0**10 - (-1.0) ** 10) / 10.0
    assert val == pytest.approx(exact, rel=1e-13)
    assert np.all(np.diff(ks) > 0)


def test_gauss_panels_validation():
    with pytest.raises(ValueError):
        gauss_legendre_panels(1.0, 0.0, 2, 4)
    with pytest.raises(ValueError):
        gauss_legendre_panels(0.0, 1.0, 0, 4)


def test_parabolic_refine_recovers_vertex():
    x = np.linspace(0.0, 1.0, 101)
    y = -(x - 0.5037) ** 2
    i = int(np.argmax(y))
    assert abs(parabolic_refine(x, y, i) - 0.5037) < 1e-12
