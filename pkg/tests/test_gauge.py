import math

import numpy as np
import pytest

from nlsmax import gauge
from nlsmax.gaussian import gaussian_datum
from nlsmax.hermite import SpectralState


def test_params_plumbing():
    p = gauge.SymmetryParams.identity(2)
    assert p.dim == 2
    assert p.rho == 1.0
    v = p.to_vector()
    assert v.shape == (7,)
    back = gauge.SymmetryParams.from_vector(2, v)
    assert back.theta == p.theta and back.t0 == p.t0
    with pytest.raises(ValueError):
        gauge.SymmetryParams(0.0, -1.0, [0.0], [0.0], 0.0)
    with pytest.raises(ValueError):
        gauge.SymmetryParams.from_vector(1, np.zeros(4))


def test_decompose_examples():
    g0 = gaussian_datum(1, 16)
    d = gauge.decompose_datum(g0)
    assert abs(d.alpha - 1.0) < 1e-14
    assert d.phi.mass < 1e-28

    d2 = gauge.decompose_datum(SpectralState(1j * g0.coeffs))
    assert abs(d2.alpha) < 1e-14
    assert abs(d2.phi.mass - 1.0) < 1e-14

    c = g0.coeffs.copy()
    c[3] += 1.0
    d3 = gauge.decompose_datum(SpectralState(c))
    assert abs(d3.alpha - 1.0) < 1e-14
    assert abs(d3.phi.mass - math.sqrt(math.pi)) < 1e-13


def test_residual_at_reference():
    f = gaussian_datum(1, 32)
    res = gauge.phi_residual(0.1, gauge.SymmetryParams.identity(1), f)
    assert res.shape == (5,)
    assert np.max(np.abs(res)) < 1e-8
    f2 = gaussian_datum(2, 24)
    res2 = gauge.phi_residual(0.1, gauge.SymmetryParams.identity(2), f2,
                              steps=256)
    assert res2.shape == (7,)
    assert np.max(np.abs(res2)) < 1e-8


def test_phase_cancellation():
    f = gaussian_datum(1, 32)
    fph = SpectralState(np.exp(0.3j) * f.coeffs)
    p = gauge.SymmetryParams(-0.3, 1.0, [0.0], [0.0], 0.0)
    res = gauge.phi_residual(0.1, p, fph)
    assert np.max(np.abs(res)) < 1e-8


def test_leakage_guard():
    f = gaussian_datum(1, 16)
    wild = gauge.SymmetryParams(0.0, 6.0, [0.0], [0.0], 0.0)
    with pytest.raises(RuntimeError):
        gauge.transformed_residual_state(0.1, wild, f)


def test_mass_invariance_of_action():
    # with theta/rho/xi/x0 inside the admissible ball the transformed term
    # keeps the datum's mass, so mass(U) is controlled by the triangle bound
    f = gaussian_datum(1, 32)
    p = gauge.SymmetryParams(0.1, 1.05, [0.05], [0.08], 0.0)
    U = gauge.transformed_residual_state(0.2, p, f)
    delta = 0.2
    w_mass_sqrt = math.sqrt(U.mass)
    assert w_mass_sqrt <= delta * (2.0 + 1e-9)
    # the transformed solution alone: U - delta G_0 has mass delta^2 (f mass 1)
    diff = U - (delta * gaussian_datum(1, 32))
    assert abs(diff.mass - delta**2) < 1e-9


def test_jacobian_matches_reference_1d():
    J = gauge.jacobian_at_reference(0.1, 1)
    ref = gauge.reference_jacobian(0.1, 1)
    assert np.max(np.abs(J - ref)) < max(1e-3, 0.5 * 0.1**2)
    assert abs(J[0, 0] + 1.0) < 1e-4
    assert abs(J[1, 1] - 0.5) < 1e-4
    # t0 column approaches its delta -> 0 limit at fourth order
    J_small = gauge.jacobian_at_reference(0.05, 1)
    assert np.max(np.abs(J[:, 4] - J_small[:, 4])) < 5e-4


def test_jacobian_matches_reference_2d():
    J = gauge.jacobian_at_reference(0.1, 2, cutoff=24, steps=512)
    ref = gauge.reference_jacobian(0.1, 2)
    assert np.max(np.abs(J - ref)) < max(1e-3, 0.5 * 0.1**2)


def test_newton_trivial():
    f = gaussian_datum(1, 32)
    res = gauge.newton_gauge_fix(0.1, f)
    assert res.iterations <= 1
    assert res.residual_norm < 1e-8


def test_newton_round_trip():
    planted = gauge.SymmetryParams(0.05, 1.05, [0.03], [0.04], 0.0)
    f = gauge.planted_datum(planted, 32)
    res = gauge.newton_gauge_fix(0.1, f)
    assert np.max(np.abs(res.params.to_vector() - planted.to_vector())) < 1e-6


def test_newton_round_trip_2d():
    planted = gauge.SymmetryParams(-0.04, 0.97, [0.02, -0.03], [0.05, 0.01], 0.0)
    f = gauge.planted_datum(planted, 24)
    res = gauge.newton_gauge_fix(0.1, f, steps=512)
    assert np.max(np.abs(res.params.to_vector() - planted.to_vector())) < 1e-6


def test_newton_orthogonal_perturbation():
    # h_4 lies outside the symmetry tangent space, so the fix stays at the
    # identity
    f = gaussian_datum(1, 32)
    c = f.coeffs.copy()
    c[4] += 0.01
    res = gauge.newton_gauge_fix(0.1, SpectralState(c))
    assert res.residual_norm < 1e-8
    assert np.max(np.abs(res.params.to_vector()
                         - gauge.SymmetryParams.identity(1).to_vector())) < 1e-6


def test_planted_datum_guard():
    with pytest.raises(ValueError):
        gauge.planted_datum(gauge.SymmetryParams(0.0, 1.0, [0.0], [0.0], 0.5), 16)
