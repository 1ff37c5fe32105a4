"""Gauge fixing: placing a datum into the orthogonality slice at the Gaussian.

The residual map collects the moments of
U = delta G_0 - e^{i theta} rho^{N/2} e^{i x.xi} u(t0, rho x + x0)
against G_0, x G_0 and (|x|^2 - N/2) G_0, where u solves the nonlinear
equation with data delta*f.  A damped Newton iteration on the symmetry
parameters drives all moments to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gaussian import gaussian_datum
from .hermite import SpectralState, gauss_hermite_rule, hermite_matrix, analyze
from .sim import SimConfig, evolve_to


@dataclass(frozen=True)
class SymmetryParams:
    """Phase, scaling, Galilean boost, translation and time shift."""

    theta: float
    rho: float
    xi: np.ndarray
    x0: np.ndarray
    t0: float

    def __post_init__(self):
        object.__setattr__(self, "xi", np.atleast_1d(np.asarray(self.xi, float)))
        object.__setattr__(self, "x0", np.atleast_1d(np.asarray(self.x0, float)))
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.xi.shape != self.x0.shape:
            raise ValueError("xi and x0 must have the same dimension")

    @property
    def dim(self) -> int:
        return self.xi.size

    @classmethod
    def identity(cls, dim: int) -> "SymmetryParams":
        return cls(0.0, 1.0, np.zeros(dim), np.zeros(dim), 0.0)

    def to_vector(self) -> np.ndarray:
        return np.concatenate(
            [[self.theta, self.rho], self.xi, self.x0, [self.t0]]
        )

    @classmethod
    def from_vector(cls, dim: int, vec: np.ndarray) -> "SymmetryParams":
        vec = np.asarray(vec, float)
        if vec.size != 3 + 2 * dim:
            raise ValueError(f"parameter vector must have length {3 + 2 * dim}")
        return cls(vec[0], vec[1], vec[2 : 2 + dim], vec[2 + dim : 2 + 2 * dim],
                   vec[-1])


@dataclass(frozen=True)
class OrthoDecomposition:
    """Split f = alpha G_0 + phi with phi real-orthogonal to G_0."""

    alpha: float
    phi: SpectralState


def decompose_datum(f: SpectralState) -> OrthoDecomposition:
    """alpha = Re int f G_0, phi = f - alpha G_0."""
    g0 = gaussian_datum(f.dim, f.cutoff)
    alpha = float(f.inner(g0).real)
    return OrthoDecomposition(alpha=alpha, phi=f - alpha * g0)


def _moment_weights(dim: int, cutoff: int) -> list[SpectralState]:
    """Exact eigenbasis expansions of G_0, x_j G_0 and (|x|^2 - N/2) G_0."""
    pref = math.pi ** (-dim / 4.0)
    if dim == 1:
        g0 = np.zeros(cutoff, complex)
        g0[0] = pref
        xg = np.zeros(cutoff, complex)
        xg[1] = pref / math.sqrt(2.0)
        quad = np.zeros(cutoff, complex)
        quad[2] = pref / math.sqrt(2.0)
        return [SpectralState(g0), SpectralState(xg), SpectralState(quad)]
    g0 = np.zeros((cutoff, cutoff), complex)
    g0[0, 0] = pref
    x1g = np.zeros((cutoff, cutoff), complex)
    x1g[1, 0] = pref / math.sqrt(2.0)
    x2g = np.zeros((cutoff, cutoff), complex)
    x2g[0, 1] = pref / math.sqrt(2.0)
    quad = np.zeros((cutoff, cutoff), complex)
    quad[2, 0] = pref / math.sqrt(2.0)
    quad[0, 2] = pref / math.sqrt(2.0)
    return [SpectralState(g0), SpectralState(x1g), SpectralState(x2g),
            SpectralState(quad)]


def planted_datum(params: SymmetryParams, cutoff: int) -> SpectralState:
    """Datum f with e^{i theta} rho^{N/2} e^{i x.xi} f(rho x + x0) = G_0.

    Built by sampling the inverse symmetry action on the Gaussian and
    re-projecting; only t0 = 0 plants are representable this way.
    """
    if params.t0 != 0.0:
        raise ValueError("planted data require t0 = 0")
    dim = params.dim
    rule = gauss_hermite_rule(2 * cutoff + 48)
    y = rule.nodes
    pref = math.pi ** (-dim / 4.0) * params.rho ** (-dim / 2.0)
    if dim == 1:
        z = (y - params.x0[0]) / params.rho
        samples = pref * np.exp(
            -1j * params.theta - 1j * z * params.xi[0] - 0.5 * z**2
        )
    else:
        z1 = (y - params.x0[0]) / params.rho
        z2 = (y - params.x0[1]) / params.rho
        zsq = z1[:, None] ** 2 + z2[None, :] ** 2
        phase = z1[:, None] * params.xi[0] + z2[None, :] * params.xi[1]
        samples = pref * np.exp(-1j * params.theta - 1j * phase - 0.5 * zsq)
    return analyze(samples, rule, cutoff)


def transformed_residual_state(
    delta: float,
    params: SymmetryParams,
    f: SpectralState,
    gamma: float = 1.0,
    steps: int = 1024,
    leakage_tol: float = 1e-6,
) -> SpectralState:
    """Build U = delta G_0 - e^{i theta} rho^{N/2} e^{i x.xi} u(t0, rho x + x0).

    u is the nonlinear solution with data delta*f, obtained as a harmonic-frame
    snapshot at tau0 = arctan(t0) mapped back through the lens; the symmetry
    action is applied by affine resampling of each axis, then re-projected.
    Raises if the re-projection loses more than leakage_tol of the mass.
    """
    dim, cutoff = f.dim, f.cutoff
    if params.dim != dim:
        raise ValueError("params dimension does not match the datum")
    config = SimConfig(dim=dim, delta=min(delta, 1.0), gamma=gamma,
                       cutoff=cutoff, steps=steps)
    tau0 = math.atan(params.t0)
    v = evolve_to(config, tau0, initial=delta * f)
    rule = gauss_hermite_rule(2 * cutoff + 48)
    x = rule.nodes
    cos0 = math.cos(tau0)
    axes = []
    for j in range(dim):
        xprime = params.rho * x + params.x0[j]
        yprime = cos0 * xprime
        axes.append((xprime, yprime, hermite_matrix(cutoff, yprime)))
    if dim == 1:
        xp, yp, H = axes[0]
        vgrid = H @ v.coeffs
        factor = cos0**0.5 * np.exp(0.5j * yp**2 * params.t0)
        u_samples = factor * vgrid
        phase = np.exp(1j * (params.theta + x * params.xi[0]))
        w = params.rho**0.5 * phase * u_samples
        g0_samples = math.pi ** (-0.25) * np.exp(-0.5 * x**2)
        U = delta * g0_samples - w
    else:
        (xp1, yp1, H1), (xp2, yp2, H2) = axes
        vgrid = H1 @ v.coeffs @ H2.T
        ysq = yp1[:, None] ** 2 + yp2[None, :] ** 2
        factor = cos0 * np.exp(0.5j * ysq * params.t0)
        u_samples = factor * vgrid
        phase = np.exp(
            1j * (params.theta + x[:, None] * params.xi[0]
                  + x[None, :] * params.xi[1])
        )
        w = params.rho * phase * u_samples
        g0_samples = math.pi ** (-0.5) * np.exp(
            -0.5 * (x[:, None] ** 2 + x[None, :] ** 2)
        )
        U = delta * g0_samples - w
    state = analyze(U, rule, cutoff)
    wts = rule.total_weights
    if dim == 1:
        grid_mass = float(wts @ np.abs(U) ** 2)
    else:
        grid_mass = float(wts @ np.abs(U) ** 2 @ wts)
    scale = max(delta**2 * f.mass, 1e-300)
    if (grid_mass - state.mass) / scale > leakage_tol:
        raise RuntimeError(
            f"resampling leaked {(grid_mass - state.mass) / scale:.2e} "
            "of the mass outside the spectral cutoff"
        )
    return state


def phi_residual(
    delta: float,
    params: SymmetryParams,
    f: SpectralState,
    gamma: float = 1.0,
    steps: int = 1024,
) -> np.ndarray:
    """Moment residuals of U, each divided by delta; length 3 + 2N.

    Ordering matches the reference Jacobian rows: Im<U, G_0>,
    Re<U, (|x|^2 - N/2) G_0>, Im<U, x_j G_0>, Re<U, x_j G_0>,
    Im<U, (|x|^2 - N/2) G_0>.
    """
    dim = f.dim
    U = transformed_residual_state(delta, params, f, gamma=gamma, steps=steps)
    weights = _moment_weights(dim, f.cutoff)
    g0w, xw, quadw = weights[0], weights[1:-1], weights[-1]
    pair = lambda wstate: U.inner(wstate)
    out = [pair(g0w).imag, pair(quadw).real]
    out += [pair(wj).imag for wj in xw]
    out += [pair(wj).real for wj in xw]
    out.append(pair(quadw).imag)
    return np.array(out) / delta


def reference_jacobian(delta: float, dim: int) -> np.ndarray:
    """The closed-form Jacobian at (0, identity, G_0), without the O(delta)
    corrections in the t0 column."""
    n = 3 + 2 * dim
    J = np.zeros((n, n))
    if dim == 1:
        np.fill_diagonal(J, [-1.0, 0.5, -0.5, 0.5, -0.25])
        J[0, 4] = 0.25
    else:
        np.fill_diagonal(J, [-1.0, 1.0, -0.5, -0.5, 0.5, 0.5, -0.5])
        J[0, 6] = 0.5
    return J


def jacobian_at_reference(
    delta: float, dim: int, fd_step: float = 1e-5, gamma: float = 1.0,
    cutoff: int = 32, steps: int = 1024,
) -> np.ndarray:
    """Central finite-difference Jacobian of phi_residual in the parameters,
    evaluated at (0, identity, G_0)."""
    f = gaussian_datum(dim, cutoff)
    n = 3 + 2 * dim
    J = np.zeros((n, n))
    base = SymmetryParams.identity(dim).to_vector()
    for col in range(n):
        vp, vm = base.copy(), base.copy()
        vp[col] += fd_step
        vm[col] -= fd_step
        rp = phi_residual(delta, SymmetryParams.from_vector(dim, vp), f,
                          gamma=gamma, steps=steps)
        rm = phi_residual(delta, SymmetryParams.from_vector(dim, vm), f,
                          gamma=gamma, steps=steps)
        if not (np.all(np.isfinite(rp)) and np.all(np.isfinite(rm))):
            raise RuntimeError(f"finite-difference failure in column {col}")
        J[:, col] = (rp - rm) / (2.0 * fd_step)
    return J


@dataclass(frozen=True)
class GaugeFixResult:
    params: SymmetryParams
    residual: np.ndarray
    iterations: int

    @property
    def residual_norm(self) -> float:
        return float(np.max(np.abs(self.residual)))


def newton_gauge_fix(
    delta: float,
    f: SpectralState,
    tol: float = 1e-8,
    gamma: float = 1.0,
    steps: int = 1024,
    max_iter: int = 25,
) -> GaugeFixResult:
    """Damped Newton solve of phi_residual(delta, params, f) = 0.

    Uses a finite-difference Jacobian refreshed each iteration and step
    halving (up to 8 times) whenever the residual norm fails to decrease.
    """
    dim = f.dim
    n = 3 + 2 * dim
    p = SymmetryParams.identity(dim).to_vector()
    res = phi_residual(delta, SymmetryParams.from_vector(dim, p), f,
                       gamma=gamma, steps=steps)
    for it in range(max_iter):
        if np.max(np.abs(res)) <= tol:
            return GaugeFixResult(
                params=SymmetryParams.from_vector(dim, p),
                residual=res, iterations=it,
            )
        fd = 1e-5
        J = np.zeros((n, n))
        for col in range(n):
            vp = p.copy()
            vp[col] += fd
            rp = phi_residual(delta, SymmetryParams.from_vector(dim, vp), f,
                              gamma=gamma, steps=steps)
            J[:, col] = (rp - res) / fd
        try:
            step = np.linalg.solve(J, -res)
        except np.linalg.LinAlgError as exc:
            raise RuntimeError("singular Jacobian in the Newton solve") from exc
        lam = 1.0
        for _ in range(9):
            trial = p + lam * step
            if trial[1] <= 0:
                lam *= 0.5
                continue
            trial_res = phi_residual(
                delta, SymmetryParams.from_vector(dim, trial), f,
                gamma=gamma, steps=steps,
            )
            if np.max(np.abs(trial_res)) < np.max(np.abs(res)):
                break
            lam *= 0.5
        else:
            raise RuntimeError(
                f"Newton damping failed; residual stuck at "
                f"{np.max(np.abs(res)):.3e}"
            )
        p, res = trial, trial_res
    if np.max(np.abs(res)) <= tol:
        return GaugeFixResult(
            params=SymmetryParams.from_vector(dim, p),
            residual=res, iterations=max_iter,
        )
    raise RuntimeError(
        f"Newton did not converge in {max_iter} iterations; "
        f"last residual {np.max(np.abs(res)):.3e}"
    )
