"""Hermite functions, harmonic-oscillator eigendata, and Gauss-Hermite quadrature.

Normalization convention used throughout the package:

    h_n(y) = H_n(y) / sqrt(2^n n!) * exp(-y^2/2),   ||h_n||_{L2}^2 = sqrt(pi).

The 2D eigenfunctions are tensor products h_{jk}(y) = h_j(y1) h_k(y2) with
||h_{jk}||^2 = pi.  Eigenvalues of H = -Laplacian + |y|^2 are 2n+1 in 1D and
2(j+k)+2 in 2D.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

SQRT_PI = math.sqrt(math.pi)


def eigenvalue(dim: int, index) -> int:
    """Eigenvalue of the harmonic oscillator for a 1D index n or 2D pair (j, k)."""
    if dim == 1:
        return 2 * int(index) + 1
    if dim == 2:
        j, k = index
        return 2 * (int(j) + int(k)) + 2
    raise ValueError(f"dim must be 1 or 2, got {dim}")


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Hermite nodes/weights for integrals of the form int f(y) e^{-y^2} dy."""

    order: int
    nodes: np.ndarray
    log_weights: np.ndarray

    @property
    def weights(self) -> np.ndarray:
        return np.exp(self.log_weights)

    @property
    def total_weights(self) -> np.ndarray:
        """Weights for plain integrals int g(y) dy of Gaussian-decaying g.

        Equal to w_i * exp(y_i^2); assembled in log space because the raw edge
        weights underflow double precision long before the product does.
        """
        return np.exp(self.log_weights + self.nodes**2)


def gauss_hermite_rule(order: int) -> QuadratureRule:
    """Gauss-Hermite rule of the given order via the symmetric Jacobi eigenproblem.

    Exact (to machine precision) for int p(y) e^{-y^2} dy with deg p <= 2*order - 1.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if order == 1:
        return QuadratureRule(1, np.zeros(1), np.array([0.5 * math.log(math.pi)]))
    off = np.sqrt(np.arange(1, order) / 2.0)
    try:
        nodes = scipy.linalg.eigh_tridiagonal(
            np.zeros(order), off, eigvals_only=True
        )
    except scipy.linalg.LinAlgError as exc:  # pragma: no cover
        raise RuntimeError(
            f"Jacobi eigenproblem for Gauss-Hermite order {order} did not converge"
        ) from exc
    # enforce exact symmetry about 0
    nodes = 0.5 * (nodes - nodes[::-1])
    # Christoffel weights: w_i e^{x_i^2} = sqrt(pi) / sum_k h_k(x_i)^2.  All
    # quantities are O(1); the raw w_i are recovered in log space.  (The
    # tridiagonal eigenvectors are useless here: LAPACK returns their first
    # components with absolute, not relative, accuracy.)
    christoffel = np.sum(hermite_matrix(order, nodes) ** 2, axis=-1)
    logw = 0.5 * math.log(math.pi) - np.log(christoffel) - nodes**2
    return QuadratureRule(order, nodes, logw)


def hermite_function(index, y):
    """Evaluate h_n(y) (1D, integer index) or h_{jk}(y1,y2) (2D, pair index).

    Uses the normalized three-term recurrence
    h_{n+1} = y*sqrt(2/(n+1)) h_n - sqrt(n/(n+1)) h_{n-1}; no factorials or
    powers of 2 appear, so values stay finite for n in the hundreds.
    """
    if np.ndim(index) == 0:
        return hermite_matrix(int(index) + 1, np.asarray(y, dtype=float))[..., -1]
    j, k = index
    y1, y2 = y
    hj = hermite_matrix(int(j) + 1, np.asarray(y1, dtype=float))[..., -1]
    hk = hermite_matrix(int(k) + 1, np.asarray(y2, dtype=float))[..., -1]
    return hj * hk


def hermite_matrix(count: int, y: np.ndarray) -> np.ndarray:
    """Matrix h_n(y_i), shape y.shape + (count,), for n = 0..count-1."""
    y = np.asarray(y, dtype=float)
    out = np.empty(y.shape + (count,))
    out[..., 0] = np.exp(-0.5 * y**2)
    if count > 1:
        out[..., 1] = math.sqrt(2.0) * y * out[..., 0]
    for n in range(1, count - 1):
        out[..., n + 1] = y * math.sqrt(2.0 / (n + 1)) * out[..., n] - math.sqrt(
            n / (n + 1)
        ) * out[..., n - 1]
    return out


@dataclass(frozen=True)
class SpectralState:
    """Complex coefficient vector/matrix over the harmonic-oscillator eigenbasis.

    1D: coeffs[n] multiplies h_n.  2D: coeffs[j, k] multiplies h_{jk}.
    L2 mass is sqrt(pi) * sum|c|^2 in 1D and pi * sum|c|^2 in 2D.
    """

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", np.asarray(self.coeffs, dtype=complex))
        if self.coeffs.ndim not in (1, 2):
            raise ValueError("coeffs must be a 1D vector or 2D matrix")

    @property
    def dim(self) -> int:
        return self.coeffs.ndim

    @property
    def cutoff(self) -> int:
        return self.coeffs.shape[0]

    @property
    def basis_norm_sq(self) -> float:
        """||h_alpha||^2 in this dimension: sqrt(pi) (1D) or pi (2D)."""
        return SQRT_PI**self.dim

    @property
    def mass(self) -> float:
        return self.basis_norm_sq * float(np.sum(np.abs(self.coeffs) ** 2))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalue of H for each coefficient slot, same shape as coeffs."""
        if self.dim == 1:
            return 2 * np.arange(self.cutoff) + 1
        j = np.arange(self.coeffs.shape[0])[:, None]
        k = np.arange(self.coeffs.shape[1])[None, :]
        return 2 * (j + k) + 2

    def __add__(self, other: "SpectralState") -> "SpectralState":
        return SpectralState(self.coeffs + other.coeffs)

    def __sub__(self, other: "SpectralState") -> "SpectralState":
        return SpectralState(self.coeffs - other.coeffs)

    def __mul__(self, c) -> "SpectralState":
        return SpectralState(self.coeffs * c)

    __rmul__ = __mul__

    def inner(self, other: "SpectralState") -> complex:
        """Complex L2 pairing int self * conj(other)."""
        return self.basis_norm_sq * complex(
            np.sum(self.coeffs * np.conj(other.coeffs))
        )


def analyze(samples: np.ndarray, rule: QuadratureRule, cutoff: int) -> SpectralState:
    """Project grid samples (taken at rule.nodes) onto the first `cutoff` modes.

    c_n = (1 / ||h_n||^2) int phi(y) h_n(y) dy, evaluated by quadrature with the
    Gaussian weight re-expressed.  Exact for band-limited phi when
    rule.order >= cutoff (the integrand is then a polynomial of degree
    <= 2*cutoff - 2 against e^{-y^2}).
    """
    samples = np.asarray(samples)
    H = hermite_matrix(cutoff, rule.nodes)  # (order, cutoff)
    T = (H * rule.total_weights[:, None]).T  # (cutoff, order)
    if samples.ndim == 1:
        if samples.shape != rule.nodes.shape:
            raise ValueError("1D sample grid does not match the quadrature rule")
        return SpectralState(T @ samples / SQRT_PI)
    if samples.shape != (rule.order, rule.order):
        raise ValueError("2D sample grid does not match the quadrature rule")
    return SpectralState(T @ samples @ T.T / math.pi)


def synthesize(state: SpectralState, rule: QuadratureRule) -> np.ndarray:
    """Evaluate a spectral state on the quadrature grid (inverse of analyze)."""
    H = hermite_matrix(state.cutoff, rule.nodes)
    if state.dim == 1:
        return H @ state.coeffs
    return H @ state.coeffs @ H.T


def wang_diagonal(j: int) -> float:
    """Closed form for int e^{-y^2} h_j(y)^2 dy = (2j)!/(2^{2j} (j!)^2) sqrt(pi/2)."""
    if j < 0:
        raise ValueError("j must be >= 0")
    logval = (
        math.lgamma(2 * j + 1)
        - 2 * math.lgamma(j + 1)
        - 2 * j * math.log(2.0)
        + 0.5 * math.log(math.pi / 2.0)
    )
    return math.exp(logval)


def alpha_coefficient(j: int) -> float:
    """Expansion coefficient alpha_{2j} of e^{-5y^2/2} over the h_n basis.

    alpha_{2j} = (-1)^j sqrt((2j)!) / (3^j sqrt(3) j!); odd coefficients vanish
    by parity.
    """
    if j < 0:
        raise ValueError("j must be >= 0")
    logval = (
        0.5 * math.lgamma(2 * j + 1)
        - math.lgamma(j + 1)
        - (j + 0.5) * math.log(3.0)
    )
    return (-1) ** j * math.exp(logval)


def alpha_coefficient_quadrature(k: int, rule: QuadratureRule) -> float:
    """Quadrature route alpha_k = (1/sqrt(pi)) int e^{-5y^2/2} h_k(y) dy."""
    y = rule.nodes
    vals = np.exp(-2.5 * y**2) * hermite_function(k, y)
    return float(rule.total_weights @ vals) / SQRT_PI


def default_rule_order(cutoff: int) -> int:
    """Quadrature order used by default for a given spectral cutoff."""
    return 2 * cutoff + 8
