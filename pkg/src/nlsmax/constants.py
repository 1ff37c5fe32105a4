"""The constants of the small-mass expansion: C_S, D_1, D_2.

Each constant has a closed form and at least one independent numerical
route (series, 1D integral in t, or harmonic-frame Duhamel quadrature);
``ConstantReport`` records the cross-check discrepancy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gaussian import nonlinear_source_coefficients
from .hermite import alpha_coefficient, gauss_hermite_rule

LN2 = math.log(2.0)


def strichartz_constant(dim: int) -> float:
    """Best constant C_S of the linear estimate: 1/sqrt(3) in 1D, 1/2 in 2D."""
    if dim == 1:
        return 1.0 / math.sqrt(3.0)
    if dim == 2:
        return 0.5
    raise ValueError(f"dim must be 1 or 2, got {dim}")


def strichartz_crosscheck(dim: int, order: int = 80) -> float:
    """Lens-frame quadrature of the Gaussian's space-time integral.

    The harmonic-frame Gaussian has tau-independent modulus, so the integral
    reduces to pi * int |pi^{-dim/4} e^{-|y|^2/2}|^{2+4/dim} dy, which must
    reproduce C_S since the mass-1 Gaussian is a maximizer.
    """
    rule = gauss_hermite_rule(order)
    p = 2 + 4 / dim
    y = rule.nodes
    vals = np.exp(-0.5 * p * y**2)
    one_d = float(rule.total_weights @ vals)
    return math.pi * math.pi ** (-dim * p / 4.0) * one_d**dim


def d1_series(terms: int) -> float:
    """Partial sum (1/pi) sum_{k=1}^{terms} (2k)!/(k 9^k (k!)^2)."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    return d1_inner_sum(terms) / math.pi


def d1_inner_sum(terms: int) -> float:
    """The bare series sum_{k>=1} (2k)!/(k 9^k (k!)^2), approx 0.2724."""
    total = 0.0
    for k in range(1, terms + 1):
        logterm = (
            math.lgamma(2 * k + 1)
            - 2 * math.lgamma(k + 1)
            - k * math.log(9.0)
            - math.log(k)
        )
        total += math.exp(logterm)
    return total


def d1_spectral(terms: int = 100) -> float:
    """D_1 = (6/pi) sum_{j>=1} alpha_{2j}^2 / (2j); term-by-term equal to the series."""
    total = 0.0
    for j in range(1, terms + 1):
        total += alpha_coefficient(j) ** 2 / (2 * j)
    return 6.0 * total / math.pi


def d2_closed() -> float:
    """D_2 = ln(4/3) / (2 pi)."""
    return math.log(4.0 / 3.0) / (2.0 * math.pi)


def adaptive_simpson(f, a: float, b: float, tol: float, max_doublings: int = 26):
    """Composite Simpson with interval doubling until successive estimates
    differ by less than tol/2.  f must accept numpy arrays."""
    n = 64
    prev = None
    while True:
        x = np.linspace(a, b, n + 1)
        fx = f(x)
        h = (b - a) / n
        est = h / 3.0 * (
            fx[0] + fx[-1] + 4.0 * np.sum(fx[1:-1:2]) + 2.0 * np.sum(fx[2:-1:2])
        )
        if prev is not None and abs(est - prev) < 0.5 * tol:
            return est
        prev = est
        n *= 2
        if n > 2**max_doublings:
            raise RuntimeError(
                f"adaptive Simpson failed to reach tol={tol} on [{a}, {b}]"
            )


def _d2_integrand(t: np.ndarray) -> np.ndarray:
    return (
        -(np.log1p(t**2) + 2.0 * math.log(3.0) - np.log(9.0 + 25.0 * t**2))
        / (16.0 * math.pi**2 * (1.0 + t**2))
    )


def d2_integral(t_max: float = 1000.0, tolerance: float = 1e-9) -> float:
    """D_2 via the physical-frame t-integral of the Appendix-C inner closed form.

    D_2 = 4 int_R Re(int |G|^2 conj(G) r dx) dt with the inner x-integral in
    closed form; adaptive Simpson on [-t_max, t_max] plus a two-term analytic
    tail expansion in 1/t.
    """
    L = math.log(25.0 / 9.0)
    c = 1.0 / (16.0 * math.pi**2)
    # next omitted term is O(1/t_max^5); demand it be comfortably below tolerance
    residual = c * 10.0 / t_max**5
    if residual > 0.1 * tolerance:
        need = (c * 10.0 / (0.1 * tolerance)) ** 0.2
        raise ValueError(
            f"t_max={t_max} too small for tolerance {tolerance}; need >= {need:.1f}"
        )
    body = adaptive_simpson(_d2_integrand, -t_max, t_max, tolerance / 8.0)
    tail = 2.0 * c * (L / t_max - (L + 16.0 / 25.0) / (3.0 * t_max**3))
    return 4.0 * (body + tail)


def classical_log_integral_1(t_max: float = 2000.0, tol: float = 1e-9) -> float:
    """int_R ln(1+t^2)/(1+t^2) dt, expected 2 pi ln 2."""
    f = lambda t: np.log1p(t**2) / (1.0 + t**2)
    body = adaptive_simpson(f, -t_max, t_max, tol)
    T = t_max
    tail = 2.0 * (
        2.0 * (math.log(T) + 1.0) / T
        + 1.0 / (3.0 * T**3)
        - (2.0 * math.log(T) / 3.0 + 2.0 / 9.0) / T**3
    )
    return body + tail


def classical_log_integral_2(t_max: float = 2000.0, tol: float = 1e-9) -> float:
    """int_R ln(9+25 t^2)/(1+t^2) dt, expected 6 pi ln 2."""
    f = lambda t: np.log(9.0 + 25.0 * t**2) / (1.0 + t**2)
    body = adaptive_simpson(f, -t_max, t_max, tol)
    T = t_max
    ln25 = math.log(25.0)
    tail = 2.0 * (
        (ln25 + 2.0 * math.log(T) + 2.0) / T
        + (9.0 / 25.0 - ln25) / (3.0 * T**3)
        - (2.0 * math.log(T) / 3.0 + 2.0 / 9.0) / T**3
    )
    return body + tail


def d_n_duhamel(dim: int, cutoff: int = 48, tau_panels: int = 64) -> float:
    """D_N by harmonic-frame Duhamel quadrature, independent of the closed forms.

    D_N = (2 + 4/N) Re iint conj(S) rtilde dy dtau over (-pi/2, pi/2) x R^N,
    with S the Gaussian-driven source and rtilde its Duhamel integral; the
    per-mode sigma-integrals and the outer tau-integral both use composite
    Gauss-Legendre panels.
    """
    if cutoff < 32 or tau_panels < 32:
        raise ValueError("need cutoff >= 32 and tau_panels >= 32")
    source = nonlinear_source_coefficients(dim, cutoff)
    lam = source.eigenvalues().astype(float).ravel()
    s = source.coeffs.ravel()
    w = source.basis_norm_sq
    nodes, wts = np.polynomial.legendre.leggauss(4)
    half_range = math.pi / 2.0

    def rtilde_coeffs(tau: float) -> np.ndarray:
        acc = np.zeros_like(s)
        edges = np.linspace(0.0, tau, 65)
        for lo, hi in zip(edges[:-1], edges[1:]):
            mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
            for xi, wi in zip(nodes, wts):
                sig = mid + half * xi
                acc = acc + (wi * half) * np.exp(
                    -0.5j * lam * (tau - sig) - 0.5j * dim * sig
                ) * s
        return 1j * acc

    total = 0.0
    edges = np.linspace(-half_range, half_range, tau_panels + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        for xi, wi in zip(nodes, wts):
            tau = mid + half * xi
            r = rtilde_coeffs(tau)
            pairing = w * np.sum(np.conj(s * np.exp(-0.5j * dim * tau)) * r)
            total += wi * half * pairing.real
    return (2.0 + 4.0 / dim) * total


@dataclass(frozen=True)
class ConstantReport:
    """Closed form of a constant next to its independent numerical routes."""

    name: str
    dim: int
    closed_form_value: float
    series_value: float | None = None
    quadrature_value: float | None = None
    tolerance: float = 0.0
    extras: dict = field(default_factory=dict)

    @property
    def discrepancy(self) -> float:
        vals = [v for v in (self.series_value, self.quadrature_value) if v is not None]
        return max(abs(self.closed_form_value - v) for v in vals) if vals else 0.0

    @property
    def passed(self) -> bool:
        return self.discrepancy <= self.tolerance


def strichartz_report(dim: int) -> ConstantReport:
    return ConstantReport(
        name="C_S",
        dim=dim,
        closed_form_value=strichartz_constant(dim),
        quadrature_value=strichartz_crosscheck(dim),
        tolerance=1e-10,
    )


def d_n_report(dim: int, terms: int = 200, duhamel: bool = True) -> ConstantReport:
    if dim == 1:
        closed = d1_series(terms)
        series = d1_spectral(terms)
        extras = {"inner_sum": d1_inner_sum(terms), "terms": terms}
    else:
        closed = d2_closed()
        series = d2_integral()
        extras = {
            "classical_integral_2piln2": classical_log_integral_1(),
            "classical_integral_6piln2": classical_log_integral_2(),
        }
    quad = d_n_duhamel(dim) if duhamel else None
    return ConstantReport(
        name=f"D_{dim}",
        dim=dim,
        closed_form_value=closed,
        series_value=series,
        quadrature_value=quad,
        tolerance=1e-6,
        extras=extras,
    )
