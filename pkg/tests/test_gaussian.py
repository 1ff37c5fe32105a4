import math

import numpy as np
import pytest

from nlsmax import gaussian
from nlsmax.hermite import SpectralState, gauss_hermite_rule, synthesize


def test_datum_mass():
    assert abs(gaussian.gaussian_datum(1, 8).mass - 1.0) < 1e-14
    assert abs(gaussian.gaussian_datum(2, 8).mass - 1.0) < 1e-14
    with pytest.raises(ValueError):
        gaussian.gaussian_datum(3)


def test_harmonic_propagate_phases():
    state = gaussian.gaussian_datum(1, 4)
    out = gaussian.harmonic_propagate(state, math.pi / 3)
    assert abs(out.coeffs[0] - state.coeffs[0] * np.exp(-1j * math.pi / 6)) < 1e-15


def test_lens_point_map_round_trip():
    for dim in (1, 2):
        y = np.array([0.7]) if dim == 1 else np.array([[0.7, -0.3]])
        t, x, fwd = gaussian.lens_point_map(dim, 0.5, y)
        tau, y2, inv = gaussian.inverse_lens_point_map(dim, t, x)
        assert abs(tau - 0.5) < 1e-14
        assert np.max(np.abs(y2 - y)) < 1e-14
        assert np.max(np.abs(fwd * inv - 1.0)) < 1e-14
    with pytest.raises(ValueError):
        gaussian.lens_point_map(1, math.pi / 2, np.zeros(1))


def test_lens_frame_gaussian_matches_physical():
    rule = gauss_hermite_rule(40)
    y = rule.nodes
    tau = 0.8
    state = gaussian.harmonic_propagate(gaussian.gaussian_datum(1, 8), tau)
    v = synthesize(state, rule)
    t, x, factor = gaussian.lens_point_map(1, tau, y)
    exact = gaussian.physical_gaussian(1, t, x)
    assert np.max(np.abs(factor * exact - v)) < 1e-13


def test_lens_factor_quarter_period():
    _, _, factor = gaussian.lens_point_map(1, math.pi / 4, np.zeros(1))
    assert abs(factor[0] - 2.0**0.25) < 1e-14


def test_half_period_identity():
    # e^{-i(pi+tau)H/2} phi(y) = e^{-iN pi/2} e^{-i tau H/2} phi(-y)
    rng = np.random.default_rng(11)
    tau = 0.37
    for dim, shape in ((1, (12,)), (2, (6, 6))):
        phi = SpectralState(rng.normal(size=shape) + 1j * rng.normal(size=shape))
        lhs = gaussian.harmonic_propagate(phi, math.pi + tau)
        rhs = gaussian.harmonic_propagate(gaussian.reflect(phi), tau)
        rhs = SpectralState(np.exp(-0.5j * dim * math.pi) * rhs.coeffs)
        assert np.max(np.abs(lhs.coeffs - rhs.coeffs)) < 1e-12


def test_source_coefficients_mass():
    # int g(y) h_0 dy against the alpha_0 closed form in 1D
    src = gaussian.nonlinear_source_coefficients(1, 32)
    expect = math.pi ** (-1.25) / math.sqrt(3.0)
    assert abs(src.coeffs[0] - expect) < 1e-13
    assert abs(src.coeffs[1]) < 1e-15


def test_source_cutoff_guard():
    with pytest.raises(ValueError):
        gaussian.nonlinear_source_coefficients(1, 6)


def test_duhamel_routes_agree():
    closed = gaussian.duhamel_remainder(1, 1.1, 32, method="closed")
    quad = gaussian.duhamel_remainder(1, 1.1, 32, method="quadrature")
    assert np.max(np.abs(closed.coeffs - quad.coeffs)) < 1e-12


def test_duhamel_argument_checks():
    with pytest.raises(ValueError):
        gaussian.duhamel_remainder(2, 0.5, 32, method="closed")
    with pytest.raises(ValueError):
        gaussian.duhamel_remainder(1, 2.0, 32)
    with pytest.raises(ValueError):
        gaussian.duhamel_remainder(1, 0.5, 32, method="nope")


def test_duhamel_zero_time():
    state = gaussian.duhamel_remainder(1, 0.0, 16, method="closed")
    assert np.max(np.abs(state.coeffs)) == 0.0
