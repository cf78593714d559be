import cmath
import math

import numpy as np
import pytest

from tunneltimes import (BarrierConfig, collision_phase, interior_field,
                         interior_matching, rho, symmetric_amplitudes,
                         transfer_matrix_amplitudes, transmission_modulus,
                         transmission_phase)

# reference values at (w a, L/a, k a) = (4, 0.5, 1), frozen from a
# 40-digit evaluation of the continuity-matched amplitudes
REF = {
    "mod_T": 0.14116722105885254779,
    "theta": -1.0476219891062515815,
    "phi": 2.4767779718898160618,
    "R_B": -0.98971994140734531324 - 0.022940210965944010265j,
    "T_B": 0.0032711640366376653057 - 0.14112931583241077492j,
}


def barrier(w=4.0, L=0.5):
    return BarrierConfig.from_w(w=w, width=L)


def test_barrier_config_validation():
    with pytest.raises(ValueError):
        BarrierConfig(height=-1.0, width=0.5)
    with pytest.raises(ValueError):
        BarrierConfig(height=1.0, width=-0.5)
    with pytest.raises(ValueError):
        BarrierConfig(height=1.0, width=0.5, mass=0.0)
    b = BarrierConfig(height=2.0, width=0.3, mass=1.5)
    assert b.w**2 == pytest.approx(2.0 * b.mass * b.height, rel=1e-15)


def test_rho_special_points():
    b = barrier(w=2.0, L=1.0)
    assert rho(0.0, b).value == pytest.approx(2.0)
    assert rho(2.0, b).value == pytest.approx(0.0, abs=1e-15)
    r = rho(2.0 / math.sqrt(2.0), b)
    assert r.value.real == pytest.approx(2.0 / math.sqrt(2.0), rel=1e-15)
    assert r.is_evanescent
    above = rho(3.0, b)
    assert not above.is_evanescent
    assert above.q == pytest.approx(math.sqrt(5.0), rel=1e-15)
    with pytest.raises(ValueError):
        rho(-0.1, b)


def test_modulus_sech_special_case():
    # at 2 k^2 = w^2 the bracket reduces to 1 + sinh^2, so |T| = sech(w L / sqrt 2)
    for w, L in [(4.0, 0.5), (2.0, 1.3), (7.0, 0.2)]:
        b = barrier(w, L)
        k = w / math.sqrt(2.0)
        assert transmission_modulus(k, b) == pytest.approx(
            1.0 / math.cosh(w * L / math.sqrt(2.0)), rel=1e-12)


def test_modulus_top_of_barrier_limit():
    b = barrier(4.0, 0.5)
    want = 1.0 / math.sqrt(1.0 + (4.0 * 0.5 / 2.0) ** 2)
    assert transmission_modulus(4.0, b) == pytest.approx(want, rel=1e-12)


def test_modulus_frozen_reference_and_oracle():
    b = barrier()
    assert transmission_modulus(1.0, b) == pytest.approx(REF["mod_T"], rel=1e-13)
    t_or, _ = transfer_matrix_amplitudes(1.0, b)
    assert transmission_modulus(1.0, b) == pytest.approx(abs(t_or), rel=1e-12)


def test_modulus_rejects_k_zero():
    with pytest.raises(ValueError):
        transmission_modulus(0.0, barrier())
    with pytest.raises(ValueError):
        transmission_phase(0.0, barrier())


def _one_sided_limit(f, w, side, eps=1e-4):
    # Richardson-extrapolated limit of f at w approached from one side
    vals = [f(w * (1.0 + side * eps / 2**j)) for j in range(3)]
    r1 = 2.0 * vals[1] - vals[0]
    r2 = 2.0 * vals[2] - vals[1]
    return 2.0 * r2 - r1


def test_continuity_across_top():
    b = barrier(4.0, 0.7)
    for f in (lambda k: transmission_modulus(k, b),
              lambda k: transmission_phase(k, b)):
        below = _one_sided_limit(f, 4.0, -1)
        above = _one_sided_limit(f, 4.0, +1)
        assert abs(below - above) < 1e-8


def test_theta_zero_points():
    b = barrier(4.0, 0.5)
    assert transmission_phase(4.0 / math.sqrt(2.0), b) == pytest.approx(0.0, abs=1e-12)
    b0 = barrier(4.0, 0.0)
    assert transmission_phase(1.3, b0) == 0.0


def test_theta_matches_oracle_phase():
    # Theta = arg(T e^{i k L}) for the independently matched amplitude
    for w, L, k in [(4.0, 0.5, 1.0), (2.0, 1.1, 0.7), (3.0, 0.8, 2.9), (3.0, 0.8, 5.0)]:
        b = barrier(w, L)
        t_or, _ = transfer_matrix_amplitudes(k, b)
        want = cmath.phase(t_or * cmath.exp(1j * k * L))
        got = transmission_phase(k, b)
        assert (got - want) % (2.0 * math.pi) == pytest.approx(0.0, abs=1e-10) \
            or (got - want) % (2.0 * math.pi) == pytest.approx(2.0 * math.pi, abs=1e-10)


def test_theta_frozen_reference():
    assert transmission_phase(1.0, barrier()) == pytest.approx(REF["theta"], rel=1e-13)


def test_amplitudes_frozen_reference():
    amps = symmetric_amplitudes(1.0, barrier())
    assert amps.reflection == pytest.approx(REF["R_B"], abs=1e-13)
    assert amps.transmission == pytest.approx(REF["T_B"], abs=1e-13)
    assert amps.phi == pytest.approx(REF["phi"], rel=1e-13)


def test_amplitudes_zero_width_degenerate():
    amps = symmetric_amplitudes(1.3, barrier(4.0, 0.0))
    assert amps.reflection == 0.0
    assert amps.transmission == pytest.approx(1.0 + 0.0j, abs=1e-15)
    assert amps.phi == 0.0
    # series limit: reflection vanishes linearly as L -> 0
    tiny = symmetric_amplitudes(1.3, barrier(4.0, 1e-12))
    assert abs(tiny.reflection) < 1e-10


def test_unimodularity_grid():
    rng = np.random.default_rng(7)
    for _ in range(300):
        w = rng.uniform(0.5, 20.0)
        k = rng.uniform(1e-3, 1.0 - 1e-3) * w
        L = rng.uniform(0.0, 20.0 / w)
        amps = symmetric_amplitudes(k, BarrierConfig.from_w(w=w, width=L))
        assert abs(abs(amps.combined) - 1.0) < 1e-12


def test_combined_equals_phase_closed_form():
    rng = np.random.default_rng(11)
    for _ in range(200):
        w = rng.uniform(0.5, 10.0)
        k = rng.uniform(1e-2, 1.0 - 1e-2) * w
        L = rng.uniform(0.0, 20.0 / w)
        b = BarrierConfig.from_w(w=w, width=L)
        amps = symmetric_amplitudes(k, b)
        want = cmath.exp(-1j * (k * L + collision_phase(k, b)))
        assert abs(amps.combined - want) < 1e-10


def test_phi_special_point():
    # at 2 k^2 = w^2 the cosh term drops out: phi = arctan(sinh(w L / sqrt 2))
    for w, L in [(4.0, 0.5), (2.0, 1.7)]:
        b = barrier(w, L)
        want = math.atan(math.sinh(w * L / math.sqrt(2.0)))
        assert collision_phase(w / math.sqrt(2.0), b) == pytest.approx(want, rel=1e-12)


def test_phi_identity_with_theta():
    # phi = arctan[w^2 sinh(rho L)/(2 k rho)] - Theta, on the tunneling branch
    rng = np.random.default_rng(3)
    for _ in range(100):
        w = rng.uniform(0.5, 8.0)
        k = rng.uniform(0.05, 0.95) * w
        L = rng.uniform(1e-3, 15.0 / w)
        b = BarrierConfig.from_w(w=w, width=L)
        r = math.sqrt(w * w - k * k)
        eta = math.atan2(w * w * math.sinh(r * L), 2.0 * k * r)
        want = eta - transmission_phase(k, b)
        assert collision_phase(k, b) == pytest.approx(want, rel=1e-11, abs=1e-12)


def test_phi_branch_is_continuous_and_bounded():
    b = barrier(2.0, 3.0)
    ks = np.linspace(1e-3, 2.0 - 1e-9, 2000)
    phis = collision_phase(ks, b)
    assert np.all(phis > 0.0)
    assert np.all(phis < math.pi)
    assert np.abs(np.diff(phis)).max() < 0.05  # no branch jumps


def test_large_width_amplitudes_stay_finite():
    # deep tunneling: rho L up to 800 must neither overflow nor lose unimodularity
    for w, L, k in [(40.0, 1.0, 1.0), (1600.0, 0.5, 1.0), (4.0, 400.0, 2.0)]:
        amps = symmetric_amplitudes(k, BarrierConfig.from_w(w=w, width=L))
        assert math.isfinite(abs(amps.reflection))
        assert math.isfinite(abs(amps.transmission))
        assert abs(abs(amps.combined) - 1.0) < 1e-12
        assert transmission_modulus(k, BarrierConfig.from_w(w=w, width=L)) >= 0.0


def test_oracle_unitarity_and_no_barrier():
    b = barrier(4.0, 0.5)
    rng = np.random.default_rng(5)
    for _ in range(100):
        k = rng.uniform(1e-2, 2.5) * 4.0
        if abs(k - 4.0) < 1e-3:
            continue
        t, r = transfer_matrix_amplitudes(k, b)
        assert abs(abs(t) ** 2 + abs(r) ** 2 - 1.0) < 1e-12
    t0, r0 = transfer_matrix_amplitudes(1.3, barrier(4.0, 0.0))
    assert t0 == pytest.approx(1.0 + 0.0j, abs=1e-14)
    assert abs(r0) < 1e-14


def test_oracle_sech_cross_check():
    # k = w/sqrt2 with w L / sqrt2 = 1: both routes must give sech(1)
    w = 3.0
    L = math.sqrt(2.0) / w
    b = barrier(w, L)
    k = w / math.sqrt(2.0)
    t, _ = transfer_matrix_amplitudes(k, b)
    assert abs(t) == pytest.approx(1.0 / math.cosh(1.0), rel=1e-12)
    assert transmission_modulus(k, b) == pytest.approx(1.0 / math.cosh(1.0), rel=1e-12)


def test_oracle_rejects_top_and_nonpositive():
    with pytest.raises(ValueError):
        transfer_matrix_amplitudes(4.0, barrier())
    with pytest.raises(ValueError):
        transfer_matrix_amplitudes(0.0, barrier())


def _residuals(coeffs, b, k):
    # continuity of value and derivative at both interfaces
    w = b.w
    r = math.sqrt(w * w - k * k)
    h = b.half_width
    if coeffs.incident == "left":
        def outer1(x):
            return cmath.exp(1j * k * x) + coeffs.reflection * cmath.exp(-1j * k * x)

        def outer1p(x):
            return 1j * k * cmath.exp(1j * k * x) - 1j * k * coeffs.reflection * cmath.exp(-1j * k * x)

        def outer3(x):
            return coeffs.transmission * cmath.exp(1j * k * x)

        def outer3p(x):
            return 1j * k * coeffs.transmission * cmath.exp(1j * k * x)

        def inner(x):
            return coeffs.alpha * cmath.exp(-r * x) + coeffs.beta * cmath.exp(r * x)

        def innerp(x):
            return -r * coeffs.alpha * cmath.exp(-r * x) + r * coeffs.beta * cmath.exp(r * x)
    else:
        def outer1(x):
            return cmath.exp(-1j * k * x) + coeffs.reflection * cmath.exp(1j * k * x)

        def outer1p(x):
            return -1j * k * cmath.exp(-1j * k * x) + 1j * k * coeffs.reflection * cmath.exp(1j * k * x)

        def outer3(x):
            return coeffs.transmission * cmath.exp(-1j * k * x)

        def outer3p(x):
            return -1j * k * coeffs.transmission * cmath.exp(-1j * k * x)

        def inner(x):
            return coeffs.alpha * cmath.exp(r * x) + coeffs.beta * cmath.exp(-r * x)

        def innerp(x):
            return r * coeffs.alpha * cmath.exp(r * x) - r * coeffs.beta * cmath.exp(-r * x)
    near = -h if coeffs.incident == "left" else h
    far = h if coeffs.incident == "left" else -h
    return (abs(outer1(near) - inner(near)), abs(outer1p(near) - innerp(near)),
            abs(outer3(far) - inner(far)), abs(outer3p(far) - innerp(far)))


def test_interior_matching_continuity():
    b = barrier()
    coeffs = interior_matching(1.0, b, incident="left")
    assert max(_residuals(coeffs, b, 1.0)) < 1e-12
    # matching reproduces the closed-form amplitudes
    amps = symmetric_amplitudes(1.0, b)
    assert coeffs.reflection == pytest.approx(amps.reflection, abs=1e-12)
    assert coeffs.transmission == pytest.approx(amps.transmission, abs=1e-12)


def test_interior_matching_mirror_symmetry():
    b = barrier(3.0, 0.8)
    left = interior_matching(1.2, b, incident="left")
    right = interior_matching(1.2, b, incident="right")
    assert max(_residuals(right, b, 1.2)) < 1e-12
    # the x -> -x image: same coefficient values in the mirrored basis
    assert right.alpha == pytest.approx(left.alpha, abs=1e-13)
    assert right.beta == pytest.approx(left.beta, abs=1e-13)
    assert right.reflection == pytest.approx(left.reflection, abs=1e-13)
    assert right.transmission == pytest.approx(left.transmission, abs=1e-13)


def test_interior_matching_rejects_degenerate():
    with pytest.raises(ValueError):
        interior_matching(1.0, barrier(4.0, 0.0))
    with pytest.raises(ValueError):
        interior_matching(4.0, barrier(4.0, 0.5))
    with pytest.raises(ValueError):
        interior_matching(5.0, barrier(4.0, 0.5))


def test_interior_field_matches_coefficients():
    b = barrier()
    k = 1.0
    coeffs = interior_matching(k, b)
    xs = np.linspace(-b.half_width, b.half_width, 7)
    want = np.array([coeffs.alpha * cmath.exp(-math.sqrt(15.0) * x)
                     + coeffs.beta * cmath.exp(math.sqrt(15.0) * x) for x in xs])
    got = interior_field(k, b, xs, coeffs.transmission)
    np.testing.assert_allclose(got, want, atol=1e-12)
