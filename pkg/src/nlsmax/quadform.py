"""The second-variation quadratic form Q at the Gaussian maximizer.

Q is assembled entirely in the harmonic frame: time integrals over
(-pi/2, pi/2) are done in closed form (``time_phase_integral``), spatial
integrals by Gauss-Hermite quadrature.  The Gram matrix of Q over the real
basis {h_a} u {i h_a} certifies coercivity on the orthogonal complement of
the symmetry directions; analytic tail bounds extend the certificate past
the truncation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
import scipy.linalg

from . import constants
from .hermite import (
    SQRT_PI,
    SpectralState,
    gauss_hermite_rule,
    hermite_function,
    default_rule_order,
    wang_diagonal,
)


def time_phase_integral(m: int) -> float:
    """int_{-pi/2}^{pi/2} e^{i m tau} d tau for integer m (always real).

    pi for m = 0; exactly 0 for even m != 0; 2*(-1)^((|m|-1)/2)/m for odd m.
    """
    m = int(m)
    if m == 0:
        return math.pi
    if m % 2 == 0:
        return 0.0
    sign = -1.0 if (abs(m) - 1) // 2 % 2 else 1.0
    return 2.0 * sign * math.copysign(1.0, m) / abs(m)


def overlap_integral(a: float, j: int, k: int) -> float:
    """int e^{-a y^2} h_j(y) h_k(y) dy by quadrature; exact 0 for odd j + k.

    The extra Gaussian makes the integrand non-polynomial against the rule's
    weight, so convergence is geometric rather than exact; the order below
    leaves errors near machine precision for moderate indices.
    """
    if (j + k) % 2:
        return 0.0
    rule = gauss_hermite_rule(2 * (j + k) + 64)
    y = rule.nodes
    vals = np.exp(-a * y**2) * hermite_function(j, y) * hermite_function(k, y)
    return float(rule.total_weights @ vals)


@lru_cache(maxsize=None)
def _overlap_matrix(a: float, cutoff: int) -> np.ndarray:
    """Matrix of int e^{-a y^2} h_j h_k, parity zeros exact.

    The extra Gaussian makes the rule inexact (geometric convergence in the
    order margin over the polynomial degree), hence the large margin.
    """
    rule = gauss_hermite_rule(2 * cutoff + 80)
    from .hermite import hermite_matrix

    H = hermite_matrix(cutoff, rule.nodes)
    W = rule.total_weights * np.exp(-a * rule.nodes**2)
    M = (H * W[:, None]).T @ H
    j = np.arange(cutoff)
    M[(j[:, None] + j[None, :]) % 2 == 1] = 0.0
    M = 0.5 * (M + M.T)
    return M


@lru_cache(maxsize=None)
def _assembly(dim: int, cutoff: int):
    """Dense pieces of Q over the flattened complex basis.

    Returns (P, S, g, w, c_q, rho) with
    Q(phi) = c_q*w*sum|c|^2 + rho*(g . Re c)^2 - Re(c^H P c)... assembled as
    real quadratic form downstream; P carries the |e^{-i tau H/2} phi|^2 term,
    S the squared term, g the rank-one Gaussian pairing.
    """
    cs = constants.strichartz_constant(dim)
    n = dim
    c_q = cs * (n + 2) / n
    rho = cs * 4 * (n + 2) / n**2
    coef_p = (n + 2) ** 2 / n**2
    coef_s = 2 * (n + 2) / n**2
    pref = 1.0 / math.pi  # G_0^{4/N} carries pi^{-1} in both dimensions
    if dim == 1:
        w = SQRT_PI
        overlap = _overlap_matrix(2.0, cutoff)
        levels = np.arange(cutoff)
    else:
        w = math.pi
        o1 = _overlap_matrix(1.0, cutoff)
        overlap = np.kron(o1, o1)
        j = np.arange(cutoff)
        levels = (j[:, None] + j[None, :]).ravel()
    # rank-one vector: Re int G_0 phi = g . Re(c), with
    # int G_0 h_0 = pi^{-dim/4} ||h_0||^2 = pi^{dim/4}
    g = np.zeros(cutoff**dim)
    g[0] = math.pi ** (dim / 4.0)
    tvals = np.vectorize(time_phase_integral)
    dlev = levels[None, :] - levels[:, None]
    P = coef_p * pref * overlap * tvals(dlev)
    slev = dim - (levels[:, None] + levels[None, :] + dim)
    S = coef_s * pref * overlap * tvals(slev)
    return P, S, g, w, c_q, rho


def q_eval(state: SpectralState) -> float:
    """Q(phi) for a band-limited state, assembled spectrally."""
    P, S, g, w, c_q, rho = _assembly(state.dim, state.cutoff)
    c = state.coeffs.ravel()
    x, y = c.real, c.imag
    val = c_q * w * float(x @ x + y @ y)
    val += rho * float(g @ x) ** 2
    val -= float(x @ P @ x + y @ P @ y)
    val -= float(x @ S @ x - y @ S @ y)
    return val


def q_diag_1d(j: int) -> float:
    """Closed expression Q(h_j) = sqrt(3) ||h_j||^2 - 9 int e^{-2y^2} h_j^2 (j >= 1)."""
    if j < 1:
        raise ValueError("the h_0 sector carries rank-one terms; use q_eval")
    return math.sqrt(3.0) * SQRT_PI - 9.0 * overlap_integral(2.0, j, j)


def q_diag_2d(j: int, k: int) -> float:
    """Closed form Q(h_jk) = pi (1 - (2j)!(2k)! / (2^{2(j+k)-1} (j!)^2 (k!)^2))."""
    if j + k < 1:
        raise ValueError("the h_00 sector carries rank-one terms; use q_eval")
    ratio = wang_diagonal(j) * wang_diagonal(k) / (math.pi / 2.0)
    return math.pi * (1.0 - 2.0 * ratio)


def q_level2_2d(alpha: complex, beta: complex, gamma: complex) -> float:
    """Q(alpha h_02 + beta h_20 + gamma h_11) = pi (|alpha-beta|^2/4 + |gamma|^2/2)."""
    return math.pi * (0.25 * abs(alpha - beta) ** 2 + 0.5 * abs(gamma) ** 2)


def g_func(j: int, k: int) -> float:
    """Wang overlap ratio G(j,k); zero for odd j + k, log-factorial otherwise."""
    if (j + k) % 2:
        return 0.0
    logval = (
        math.lgamma(j + k + 1)
        - (j + k - 0.5) * math.log(2.0)
        - 0.5 * math.lgamma(j + 1)
        - 0.5 * math.lgamma(k + 1)
        - math.lgamma((j + k) // 2 + 1)
    )
    return math.exp(logval)


def f_func(m: int, j: int, k: int) -> float:
    """F(m,j,k) = G(j,k) G(m-j, m-k)."""
    return g_func(j, k) * g_func(m - j, m - k)


def f_script(m: int, j: int) -> float:
    """Script-F(m,j) = sum over k in [0,m] with j+k even of F(m,j,k)."""
    if not 0 <= j <= m:
        raise ValueError(f"need 0 <= j <= m, got j={j}, m={m}")
    return sum(f_func(m, j, k) for k in range(j % 2, m + 1, 2))


def tail_bound(dim: int, index: int) -> float:
    """Analytic tail estimate for eigenfunction sectors past the truncation.

    1D: lower bound sqrt(3 pi) (1 - 3 sqrt(3) / (sqrt(2) sqrt(3j+1))) on Q(h_j),
    positive for j > 4.  2D: upper bound on script-F(m, .); the level-m block of
    Q/pi is then bounded below by 1 - bound, positive once the bound is < 1
    (m >= 7).
    """
    if dim == 1:
        j = index
        return math.sqrt(3.0 * math.pi) * (
            1.0 - 3.0 * math.sqrt(3.0) / (math.sqrt(2.0) * math.sqrt(3.0 * j + 1.0))
        )
    m = index
    if m < 1:
        raise ValueError("2D tail bound needs m >= 1")
    even_term = 1.0 / math.sqrt(1.5 * m + 1.0) if m % 2 == 0 else 0.0
    inner = (
        (1.0 / math.sqrt(3 * m + 4) + 0.5 / math.sqrt(3 * m + 1))
        / math.sqrt(3 * m + 2)
        * ((2.0 * math.sqrt(3 * m + 1) + 1.0) / 3.0 + even_term)
    )
    return 2.0 * math.sqrt(inner)


def tail_certified(dim: int, index: int) -> bool:
    """Whether the analytic bound alone certifies positivity at this index."""
    if dim == 1:
        return tail_bound(1, index) > 0.0
    return tail_bound(2, index) < 1.0


def kernel_states(dim: int, cutoff: int) -> list[SpectralState]:
    """The F-directions {G_0, x_j G_0, |x|^2 G_0} x {1, i} in the eigenbasis.

    Exact finite expansions: x e^{-y^2/2} = h_1/sqrt(2),
    y^2 e^{-y^2/2} = (h_0 + sqrt(2) h_2)/2.
    """
    if cutoff < 3:
        raise ValueError("cutoff must be >= 3 to hold the kernel directions")
    pref = math.pi ** (-dim / 4.0)
    reals = []
    if dim == 1:
        g0 = np.zeros(cutoff, dtype=complex)
        g0[0] = pref
        xg = np.zeros(cutoff, dtype=complex)
        xg[1] = pref / math.sqrt(2.0)
        x2g = np.zeros(cutoff, dtype=complex)
        x2g[0] = pref / 2.0
        x2g[2] = pref * math.sqrt(2.0) / 2.0
        reals = [g0, xg, x2g]
    else:
        g0 = np.zeros((cutoff, cutoff), dtype=complex)
        g0[0, 0] = pref
        x1g = np.zeros((cutoff, cutoff), dtype=complex)
        x1g[1, 0] = pref / math.sqrt(2.0)
        x2g = np.zeros((cutoff, cutoff), dtype=complex)
        x2g[0, 1] = pref / math.sqrt(2.0)
        r2g = np.zeros((cutoff, cutoff), dtype=complex)
        r2g[0, 0] = pref
        r2g[2, 0] = pref / math.sqrt(2.0)
        r2g[0, 2] = pref / math.sqrt(2.0)
        reals = [g0, x1g, x2g, r2g]
    out = []
    for c in reals:
        out.append(SpectralState(c))
        out.append(SpectralState(1j * c))
    return out


@dataclass(frozen=True)
class QuadFormMatrix:
    """Real symmetric Gram matrix of Q over the basis {h_a} u {i h_a}."""

    dim: int
    cutoff: int
    entries: np.ndarray
    kernel_basis: np.ndarray  # columns = F-directions as real vectors
    basis_norm_sq: float  # ||h_a||^2: mass of a unit coefficient vector


def _state_to_real(state: SpectralState) -> np.ndarray:
    c = state.coeffs.ravel()
    return np.concatenate([c.real, c.imag])


def gram_matrix(dim: int, cutoff: int) -> QuadFormMatrix:
    """Assemble the Gram matrix; self-checked against q_eval on random states."""
    if cutoff < 4:
        raise ValueError("cutoff must be >= 4")
    P, S, g, w, c_q, rho = _assembly(dim, cutoff)
    m = cutoff**dim
    re_block = c_q * w * np.eye(m) + rho * np.outer(g, g) - P - S
    im_block = c_q * w * np.eye(m) - P + S
    entries = np.zeros((2 * m, 2 * m))
    entries[:m, :m] = re_block
    entries[m:, m:] = im_block
    kernel = np.column_stack(
        [_state_to_real(s) for s in kernel_states(dim, cutoff)]
    )
    mat = QuadFormMatrix(dim, cutoff, entries, kernel, w)
    rng = np.random.default_rng(12345)
    for _ in range(3):
        c = rng.normal(size=m) + 1j * rng.normal(size=m)
        state = SpectralState(c.reshape((cutoff,) * dim))
        v = _state_to_real(state)
        direct = q_eval(state)
        viamat = float(v @ entries @ v)
        if abs(direct - viamat) > 1e-9 * max(1.0, abs(direct)):
            raise RuntimeError(
                f"Gram matrix self-consistency failed: {direct} vs {viamat}"
            )
    return mat


@dataclass(frozen=True)
class CoercivityReport:
    """Truncation-level certificate that Q >= c_min ||phi||^2 on F-perp."""

    dim: int
    cutoff: int
    c_min: float
    kernel_residuals: np.ndarray
    tail_index: int
    tail_min: float
    certified_c: float = field(default=0.0)

    @property
    def valid(self) -> bool:
        return (
            self.c_min > 0
            and self.tail_min > 0
            and bool(np.all(self.kernel_residuals <= 1e-8))
        )


def coercivity_certificate(dim: int, cutoff: int) -> CoercivityReport:
    """Smallest mass-normalized eigenvalue of Q on the F-orthogonal complement.

    Deflates the 6 (1D) / 8 (2D) kernel directions from the Gram matrix,
    takes the smallest eigenvalue of the restriction with a dense symmetric
    eigensolver, and pairs it with the analytic tail bound past the cutoff.
    """
    if cutoff < 8:
        raise ValueError("cutoff must be >= 8")
    mat = gram_matrix(dim, cutoff)
    w = mat.basis_norm_sq
    residuals = []
    for state in kernel_states(dim, cutoff):
        v = _state_to_real(state)
        nrm2 = w * float(v @ v)
        residuals.append(abs(float(v @ mat.entries @ v)) / nrm2)
    residuals = np.array(residuals)
    if np.any(residuals > 1e-8):
        raise RuntimeError(
            f"kernel residuals exceed tolerance: max {residuals.max():.3e}"
        )
    kernel_q, _ = np.linalg.qr(mat.kernel_basis)
    complement = scipy.linalg.null_space(kernel_q.T)
    restricted = complement.T @ mat.entries @ complement
    eigs = scipy.linalg.eigh(restricted, eigvals_only=True)
    c_min = float(eigs[0]) / w
    tail_index = cutoff if dim == 1 else cutoff
    if dim == 1:
        tail_min = tail_bound(1, tail_index) / SQRT_PI
    else:
        tail_min = 1.0 - tail_bound(2, tail_index)
    return CoercivityReport(
        dim=dim,
        cutoff=cutoff,
        c_min=c_min,
        kernel_residuals=residuals,
        tail_index=tail_index,
        tail_min=tail_min,
        certified_c=min(c_min, tail_min),
    )


def linear_spacetime_integral(
    state: SpectralState, tau_panels: int = 128, panel_order: int = 8
) -> float:
    """iint |e^{-i tau H/2} phi|^{2+4/N} dy dtau over (-pi/2, pi/2) x R^N.

    Gauss-Hermite in y, composite Gauss-Legendre panels in tau; the linear
    propagator is applied exactly as eigenphases.  The integrand decays
    faster than the rule's weight, so the rule is not exact; the generous
    margin over the polynomial degree keeps the geometric error near
    machine precision.
    """
    dim, cutoff = state.dim, state.cutoff
    p = 2.0 + 4.0 / dim
    rule = gauss_hermite_rule(3 * cutoff + 80)
    from .hermite import hermite_matrix

    H = hermite_matrix(cutoff, rule.nodes)
    w = rule.total_weights
    lam = state.eigenvalues()
    nodes, weights = np.polynomial.legendre.leggauss(panel_order)
    total = 0.0
    edges = np.linspace(-math.pi / 2.0, math.pi / 2.0, tau_panels + 1)
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = 0.5 * (hi + lo), 0.5 * (hi - lo)
        for xi, wi in zip(nodes, weights):
            tau = mid + half * xi
            c = state.coeffs * np.exp(-0.5j * lam * tau)
            if dim == 1:
                spatial = float(w @ np.abs(H @ c) ** p)
            else:
                spatial = float(w @ np.abs(H @ c @ H.T) ** p @ w)
            total += wi * half * spatial
    return total


def random_orthogonal_state(
    dim: int, cutoff: int, rng: np.random.Generator
) -> SpectralState:
    """Random unit-mass state orthogonal (real pairing) to all F-directions."""
    m = cutoff**dim
    v = rng.normal(size=2 * m)
    kernel = np.column_stack(
        [_state_to_real(s) for s in kernel_states(dim, cutoff)]
    )
    qbasis, _ = np.linalg.qr(kernel)
    v = v - qbasis @ (qbasis.T @ v)
    c = (v[:m] + 1j * v[m:]).reshape((cutoff,) * dim)
    state = SpectralState(c)
    return state * (1.0 / math.sqrt(state.mass))


def second_order_check(dim: int, phi: SpectralState, eps_values) -> dict:
    """Verify the second-order expansion of the maximization defect at G_0.

    D(eps) = C_S (int |G_0 + eps phi|^2)^{1+2/N}
             - iint |e^{-i tau H/2}(G_0 + eps phi)|^{2+4/N}
    should satisfy D(eps) = eps^2 Q(phi) + O(eps^3); returns the fitted
    log-log exponent of |D(eps) - eps^2 Q(phi)|.
    """
    from .gaussian import gaussian_datum

    cs = constants.strichartz_constant(dim)
    g0 = gaussian_datum(dim, phi.cutoff)
    qval = q_eval(phi)
    eps_values = tuple(float(e) for e in eps_values)
    residuals = []
    for eps in eps_values:
        state = g0 + eps * phi
        mass = state.mass
        d_eps = cs * mass ** (1.0 + 2.0 / dim) - linear_spacetime_integral(state)
        residuals.append(abs(d_eps - eps**2 * qval))
    exponent = float(
        np.polyfit(np.log(eps_values), np.log(residuals), 1)[0]
    )
    return {
        "dim": dim,
        "eps": eps_values,
        "q_value": qval,
        "residuals": tuple(residuals),
        "exponent": exponent,
    }


def central_binomial_bound_check(m_max: int) -> dict:
    """Exact-integer check of C(2m,m) sqrt(3m+1) <= 4^m for 1 <= m <= m_max.

    Compared in squared form C(2m,m)^2 (3m+1) <= 16^m; no floating point.
    """
    failures, equalities = [], []
    for m in range(1, m_max + 1):
        lhs = math.comb(2 * m, m) ** 2 * (3 * m + 1)
        rhs = 16**m
        if lhs > rhs:
            failures.append(m)
        elif lhs == rhs:
            equalities.append(m)
    return {"m_max": m_max, "passed": not failures, "failures": failures,
            "equality_at": equalities}


def combinatorics_check(m_max: int) -> dict:
    """Exact check of the binomial-sum inequality behind the 2D tail bound.

    For all 1 <= m <= m_max and 0 <= j <= m:
    2 * sum_{k in [0,m], j+k even} C(j+k,j) C(2m-j-k, m-j) <= C(2m+1,m+1) + C(2m,m).
    """
    failures = []
    for m in range(1, m_max + 1):
        rhs = math.comb(2 * m + 1, m + 1) + math.comb(2 * m, m)
        for j in range(m + 1):
            lhs = 2 * sum(
                math.comb(j + k, j) * math.comb(2 * m - (j + k), m - j)
                for k in range(j % 2, m + 1, 2)
            )
            if lhs > rhs:
                failures.append((m, j))
    return {"m_max": m_max, "passed": not failures, "failures": failures}
