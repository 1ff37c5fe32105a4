"""The normalized Gaussian, its linear evolution, the lens transform, and the
first-order Duhamel remainder.

Physical frame: G(t,x) = pi^{-N/4} (1+it)^{-N/2} exp(-|x|^2/(2(1+it))).
Harmonic (lens) frame: Gtilde(tau,y) = pi^{-N/4} e^{-iN tau/2} e^{-|y|^2/2},
i.e. the Gaussian sits on the single mode h_0 / h_00 with coefficient
pi^{-N/4} and evolves by a pure phase.
"""

from __future__ import annotations

import math

import numpy as np

from .hermite import (
    QuadratureRule,
    SpectralState,
    alpha_coefficient,
    analyze,
    gauss_hermite_rule,
    default_rule_order,
)


def gaussian_datum(dim: int, cutoff: int = 1) -> SpectralState:
    """G_0 in the eigenbasis: coefficient pi^{-dim/4} on h_0 (resp. h_00)."""
    if dim not in (1, 2):
        raise ValueError(f"dim must be 1 or 2, got {dim}")
    shape = (cutoff,) if dim == 1 else (cutoff, cutoff)
    coeffs = np.zeros(shape, dtype=complex)
    coeffs[(0,) * dim] = math.pi ** (-dim / 4.0)
    return SpectralState(coeffs)


def harmonic_propagate(state: SpectralState, dtau: float) -> SpectralState:
    """Exact propagator e^{-i dtau H / 2}: per-mode phase e^{-i lambda dtau/2}."""
    phases = np.exp(-0.5j * state.eigenvalues() * dtau)
    return SpectralState(state.coeffs * phases)


def reflect(state: SpectralState) -> SpectralState:
    """Spatial reflection y -> -y: flips the sign of odd modes."""
    if state.dim == 1:
        signs = (-1.0) ** np.arange(state.cutoff)
    else:
        j = np.arange(state.coeffs.shape[0])[:, None]
        k = np.arange(state.coeffs.shape[1])[None, :]
        signs = (-1.0) ** (j + k)
    return SpectralState(state.coeffs * signs)


def lens_point_map(dim: int, tau: float, y):
    """Map a harmonic-frame point (tau, y) to (t, x, factor).

    (L u)(tau, y) = factor * u(t, x) with t = tan(tau), x = y / cos(tau) and
    factor = cos(tau)^{-N/2} e^{-i |y|^2 tan(tau) / 2}.
    """
    if not abs(tau) < math.pi / 2:
        raise ValueError(f"|tau| must be < pi/2, got {tau}")
    y = np.asarray(y, dtype=float)
    t = math.tan(tau)
    x = y / math.cos(tau)
    ysq = y**2 if dim == 1 else np.sum(y**2, axis=-1)
    factor = math.cos(tau) ** (-dim / 2.0) * np.exp(-0.5j * ysq * t)
    return t, x, factor


def inverse_lens_point_map(dim: int, t: float, x):
    """Inverse map: (t, x) -> (tau, y, factor) with u(t,x) = factor * (L u)(tau, y)."""
    tau = math.atan(t)
    x = np.asarray(x, dtype=float)
    y = x * math.cos(tau)
    ysq = y**2 if dim == 1 else np.sum(y**2, axis=-1)
    factor = math.cos(tau) ** (dim / 2.0) * np.exp(0.5j * ysq * t)
    return tau, y, factor


def physical_gaussian(dim: int, t: float, x):
    """Evaluate G(t, x) exactly."""
    x = np.asarray(x, dtype=float)
    xsq = x**2 if dim == 1 else np.sum(x**2, axis=-1)
    z = 1.0 + 1j * t
    return math.pi ** (-dim / 4.0) * z ** (-dim / 2.0) * np.exp(-xsq / (2.0 * z))


def nonlinear_source_coefficients(
    dim: int, cutoff: int, rule: QuadratureRule | None = None
) -> SpectralState:
    """Spatial part of |Gtilde|^{4/N} Gtilde decomposed into the eigenbasis.

    The harmonic-frame source is e^{-iN sigma/2} g(y) with
    g(y) = pi^{-N/4 - 1} e^{-(1/2 + 2/N)|y|^2}; this returns g's coefficients.
    """
    if rule is None:
        rule = gauss_hermite_rule(default_rule_order(cutoff))
    y = rule.nodes
    a = 0.5 + 2.0 / dim
    pref = math.pi ** (-dim / 4.0 - 1.0)
    if dim == 1:
        samples = pref * np.exp(-a * y**2)
    else:
        samples = pref * np.exp(-a * (y[:, None] ** 2 + y[None, :] ** 2))
    state = analyze(samples, rule, cutoff)
    # top mode alone can vanish by parity, so look at the last two
    tail = float(np.max(np.abs(state.coeffs[-2:])))
    if tail > 1e-3 * np.max(np.abs(state.coeffs)):
        raise ValueError(
            f"cutoff {cutoff} too small to resolve the Gaussian source "
            f"(relative top-mode magnitude {tail:.2e})"
        )
    return state


def duhamel_remainder(
    dim: int,
    tau: float,
    cutoff: int,
    method: str = "closed",
    panels: int = 64,
    panel_order: int = 4,
) -> SpectralState:
    """The lens-frame remainder rtilde(tau) = i int_0^tau e^{-i(tau-s)H/2} S(s) ds,

    where S is the harmonic-frame cubic/quintic source built on the Gaussian.
    ``method='closed'`` (1D only) uses the alpha-coefficient series; ``'quadrature'``
    integrates the Duhamel integral with composite Gauss-Legendre panels, valid
    in both dimensions.
    """
    if not abs(tau) <= math.pi / 2 + 1e-12:
        raise ValueError(f"|tau| must be <= pi/2, got {tau}")
    if cutoff < 4:
        raise ValueError("cutoff must be >= 4")
    if method == "closed":
        if dim != 1:
            raise ValueError("closed-form remainder is only available in 1D")
        k = np.arange(cutoff)
        alphas = np.zeros(cutoff)
        alphas[0::2] = [alpha_coefficient(j) for j in range((cutoff + 1) // 2)]
        coeffs = np.zeros(cutoff, dtype=complex)
        coeffs[0] = tau * alphas[0]
        kk = k[1:]
        coeffs[1:] = -1j * (alphas[1:] / kk) * (1.0 - np.exp(-1j * kk * tau))
        coeffs *= 1j * math.pi ** (-5.0 / 4.0) * np.exp(-0.5j * tau)
        return SpectralState(coeffs)
    if method != "quadrature":
        raise ValueError(f"unknown method {method!r}")
    source = nonlinear_source_coefficients(dim, cutoff)
    lam = source.eigenvalues()
    # per-mode integrand i * s_a * e^{-i lam (tau - s)/2} e^{-i N s / 2}
    nodes, weights = np.polynomial.legendre.leggauss(panel_order)
    acc = np.zeros_like(source.coeffs)
    edges = np.linspace(0.0, tau, panels + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        for xi, wi in zip(nodes, weights):
            s = mid + half * xi
            phase = np.exp(-0.5j * lam * (tau - s) - 0.5j * dim * s)
            acc = acc + (wi * half) * phase * source.coeffs
    return SpectralState(1j * acc)
