"""Diffuse Willmore-type energies, their L2 gradients, and the FD oracle.

Four approximation models are evaluated on a periodic grid:

* classical:   (1/2eps) int (eps Lap u - W'(u)/eps)^2
* Mugnai:      (1/2eps) int |eps Hess u - (W'(u)/eps) nu x nu|^2
* Bellettini:  (1/2)    int K(u)^2 ((eps/2)|grad u|^2 + W(u)/eps),
               K = div(grad u / |grad u|)
* ERR variant: classical + beta * (1/eps^{1+a}) int (eps Hess u : nu x nu - W'(u)/eps)^2

plus the correction terms J1..J4 and the geometric/soft split of the Mugnai
penalty.  Quadrature is the grid mean times the unit volume (exact for
trigonometric polynomials).

Operator policy: Laplacians of the classical/ERR quadratic terms are
spectral (matching the flow solver); every curvature-like quantity built
from the normalized gradient uses centered finite differences, with the
sigma-floor regularization nu = grad u / sqrt(|grad u|^2 + sigma^2).
Passing sigma = 0 requests exact normalization (used by the algebraic
identity checks).

Each analytic gradient here is the exact adjoint-form derivative of the
discrete regularized energy it is paired with: centered differences are
skew-adjoint on the periodic grid, so the integration-by-parts steps of the
continuum derivations hold without discretization error, and the central
finite-difference oracle matches to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .grid import (
    PeriodicGrid,
    fd_divergence,
    fd_gradient,
    fd_hessian,
    fd_laplacian,
    grid_mean,
    hessian_adjoint,
    laplacian,
    spectral_gradient,
)
from .profiles import well

__all__ = [
    "RegParams",
    "EnergyReport",
    "eval_perimeter",
    "eval_discrepancy",
    "eval_classical",
    "eval_mugnai",
    "eval_bellettini",
    "eval_err",
    "JTerms",
    "eval_j_terms",
    "zeta_tilde",
    "energy_report",
    "grad_classical",
    "grad_mugnai_penalty",
    "grad_mugnai",
    "grad_bellettini",
    "grad_err",
    "l2_gradient",
    "check_gradient",
    "ENERGY_KINDS",
]

_TINY = 1e-30  # large enough that s**3 cannot underflow


@dataclass(frozen=True)
class RegParams:
    """Regularization knobs for normalized-gradient quantities.

    sigma: floor in nu = grad u / sqrt(|grad u|^2 + sigma^2); 0 means exact
    normalization.  eta_grad: cutoff below which explicit 1/|grad u|
    integrands are zeroed (Bellettini energy).
    """

    sigma: float = 1e-3
    eta_grad: float = 1e-6

    def __post_init__(self):
        if not 0.0 <= self.sigma < 1.0:
            raise ValueError("sigma must be in [0, 1)")
        if not 0.0 < self.eta_grad < 1.0:
            raise ValueError("eta_grad must be in (0, 1)")


def _normal(g: np.ndarray, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """Regularized unit normal n = g/s and the denominator s."""
    norm2 = np.sum(g * g, axis=0)
    if sigma > 0.0:
        s = np.sqrt(norm2 + sigma * sigma)
    else:
        s = np.maximum(np.sqrt(norm2), _TINY)
    return g / s, s


def _check_eps(eps: float):
    if eps <= 0:
        raise ValueError("eps must be positive")


# ---------------------------------------------------------------------------
# energies
# ---------------------------------------------------------------------------

def eval_perimeter(grid: PeriodicGrid, u: np.ndarray, eps: float) -> float:
    """Diffuse perimeter int (eps/2)|grad u|^2 + W(u)/eps (spectral gradient)."""
    _check_eps(eps)
    g = spectral_gradient(grid, u)
    return grid_mean(0.5 * eps * np.sum(g * g, axis=0) + well(u) / eps)


def eval_discrepancy(grid: PeriodicGrid, u: np.ndarray, eps: float) -> tuple[np.ndarray, float]:
    """Discrepancy density (eps/2)|grad u|^2 - W(u)/eps and its total mass."""
    _check_eps(eps)
    g = spectral_gradient(grid, u)
    xi = 0.5 * eps * np.sum(g * g, axis=0) - well(u) / eps
    return xi, grid_mean(np.abs(xi))


def _lap(grid: PeriodicGrid, u: np.ndarray, kind: str) -> np.ndarray:
    if kind == "spectral":
        return laplacian(grid, u)
    if kind == "fd":
        return fd_laplacian(grid, u)
    raise ValueError(f"unknown laplacian kind {kind!r}")


def eval_classical(grid: PeriodicGrid, u: np.ndarray, eps: float, laplacian_kind: str = "spectral") -> float:
    """Classical model (1/2eps) int (eps Lap u - W'(u)/eps)^2.

    `laplacian_kind="fd"` uses the trace of the FD Hessian instead; the
    algebraic-identity checks need all three energies on one operator set.
    """
    _check_eps(eps)
    zeta = eps * _lap(grid, u, laplacian_kind) - well(u, 1) / eps
    return grid_mean(zeta * zeta) / (2.0 * eps)


def eval_mugnai(grid: PeriodicGrid, u: np.ndarray, eps: float, reg: RegParams = RegParams()) -> float:
    """Mugnai model (1/2eps) int |eps Hess u - (W'(u)/eps) nu x nu|^2."""
    _check_eps(eps)
    T = _mugnai_tensor(grid, u, eps, reg)[0]
    return grid_mean(np.sum(T * T, axis=(0, 1))) / (2.0 * eps)


def _mugnai_tensor(grid, u, eps, reg):
    g = fd_gradient(grid, u)
    n, s = _normal(g, reg.sigma)
    H = fd_hessian(grid, u)
    T = eps * H - (well(u, 1) / eps) * (n[:, None] * n[None, :])
    return T, H, g, n, s


def eval_bellettini(grid: PeriodicGrid, u: np.ndarray, eps: float, reg: RegParams = RegParams()) -> float:
    """Bellettini model (1/2) int K^2 ((eps/2)|grad u|^2 + W/eps).

    K = div(nu) with the sigma-floored normal; the integrand is zeroed where
    |grad u| <= eta_grad.  The gradient entering K and the perimeter density
    is the centered FD one (a single operator set keeps the paired analytic
    gradient exact).
    """
    _check_eps(eps)
    g = fd_gradient(grid, u)
    n, _ = _normal(g, reg.sigma)
    K = fd_divergence(grid, n)
    h_eps = 0.5 * eps * np.sum(g * g, axis=0) + well(u) / eps
    chi = np.sum(g * g, axis=0) > reg.eta_grad**2
    return 0.5 * grid_mean(np.where(chi, K * K * h_eps, 0.0))


def zeta_tilde(grid: PeriodicGrid, u: np.ndarray, eps: float, reg: RegParams = RegParams()) -> np.ndarray:
    """Profile defect eps Hess u : nu x nu - W'(u)/eps (FD Hessian)."""
    g = fd_gradient(grid, u)
    n, _ = _normal(g, reg.sigma)
    H = fd_hessian(grid, u)
    Hnn = np.einsum("ij...,i...,j...->...", H, n, n)
    return eps * Hnn - well(u, 1) / eps


def eval_err(
    grid: PeriodicGrid,
    u: np.ndarray,
    eps: float,
    alpha_exp: float = 0.0,
    beta: float = 1.0,
    reg: RegParams = RegParams(),
) -> float:
    """Esedoglu-Ratz-Roger variant: classical + beta/eps^{1+a} int zeta~^2."""
    _check_eps(eps)
    if beta < 0:
        raise ValueError("beta must be >= 0")
    total = eval_classical(grid, u, eps)
    if beta > 0:
        zt = zeta_tilde(grid, u, eps, reg)
        total += beta * grid_mean(zt * zt) / eps ** (1.0 + alpha_exp)
    return total


class JTerms(NamedTuple):
    J1: float
    J2: float
    J3: float
    J4: float
    split_geo: float
    split_soft: float


def eval_j_terms(
    grid: PeriodicGrid,
    u: np.ndarray,
    eps: float,
    reg: RegParams = RegParams(),
    laplacian_kind: str = "spectral",
) -> JTerms:
    """Correction terms J1..J4 and the two-part split of the Mugnai penalty.

    With a = eps Lap u, b = eps Hess u : nu x nu, c = W'(u)/eps:

        J1 = -(2/eps) int (a - c) c       J3 = -(2/eps) int (a - c) b
        J2 = -(2/eps) int (a - b) c       J4 = -(2/eps) int (a - b) b

    split_geo  = (eps/2) int |Hess u|^2 - |Hess u nu|^2
    split_soft = (eps/2) int |Hess u nu|^2 - (Hess u : nu x nu)^2  (>= 0)

    split_geo is the algebraic form of (1/2) int |grad(nu)|^2 eps |grad u|^2
    (they coincide under exact normalization).
    """
    _check_eps(eps)
    g = fd_gradient(grid, u)
    n, _ = _normal(g, reg.sigma)
    H = fd_hessian(grid, u)
    Hn = np.einsum("ij...,j...->i...", H, n)
    a = eps * _lap(grid, u, laplacian_kind)
    b = eps * np.einsum("i...,i...->...", Hn, n)
    c = well(u, 1) / eps

    scale = -2.0 / eps
    J1 = scale * grid_mean((a - c) * c)
    J2 = scale * grid_mean((a - b) * c)
    J3 = scale * grid_mean((a - c) * b)
    J4 = scale * grid_mean((a - b) * b)

    H2 = np.sum(H * H, axis=(0, 1))
    Hn2 = np.sum(Hn * Hn, axis=0)
    split_geo = 0.5 * eps * grid_mean(H2 - Hn2)
    split_soft = 0.5 * eps * grid_mean(Hn2 - (b / eps) ** 2)
    return JTerms(J1, J2, J3, J4, split_geo, split_soft)


@dataclass(frozen=True)
class EnergyReport:
    """One row of energy observables for a field; None = not requested."""

    perimeter_Peps: float | None = None
    classical_Weps: float | None = None
    mugnai_Weps: float | None = None
    bellettini_Weps: float | None = None
    err_Weps: float | None = None
    discrepancy_mass: float | None = None

    CSV_HEADER = "P_eps,W_classical,W_mugnai,W_bellettini,W_err,discrepancy_mass"

    def csv_row(self) -> str:
        vals = (
            self.perimeter_Peps,
            self.classical_Weps,
            self.mugnai_Weps,
            self.bellettini_Weps,
            self.err_Weps,
            self.discrepancy_mass,
        )
        return ",".join("" if v is None else format(v, ".17g") for v in vals)


ALL_ENERGIES = ("perimeter", "classical", "mugnai", "bellettini", "err", "discrepancy")


def energy_report(
    grid: PeriodicGrid,
    u: np.ndarray,
    eps: float,
    reg: RegParams = RegParams(),
    alpha_exp: float = 0.0,
    beta: float = 1.0,
    which: tuple[str, ...] = ALL_ENERGIES,
) -> EnergyReport:
    vals: dict[str, float] = {}
    if "perimeter" in which:
        vals["perimeter_Peps"] = eval_perimeter(grid, u, eps)
    if "classical" in which:
        vals["classical_Weps"] = eval_classical(grid, u, eps)
    if "mugnai" in which:
        vals["mugnai_Weps"] = eval_mugnai(grid, u, eps, reg)
    if "bellettini" in which:
        vals["bellettini_Weps"] = eval_bellettini(grid, u, eps, reg)
    if "err" in which:
        vals["err_Weps"] = eval_err(grid, u, eps, alpha_exp, beta, reg)
    if "discrepancy" in which:
        vals["discrepancy_mass"] = eval_discrepancy(grid, u, eps)[1]
    return EnergyReport(**vals)


# ---------------------------------------------------------------------------
# gradients
# ---------------------------------------------------------------------------

def grad_classical(grid: PeriodicGrid, u: np.ndarray, eps: float) -> tuple[np.ndarray, np.ndarray]:
    """Chemical potential mu = W'(u) - eps^2 Lap u and rhs = Lap mu - W''(u) mu / eps^2.

    The classical flow is eps^2 du/dt = rhs; the L2 gradient of the
    classical energy is -rhs/eps, so the energy decreases along the flow.
    """
    _check_eps(eps)
    mu = well(u, 1) - eps * eps * laplacian(grid, u)
    rhs = laplacian(grid, mu) - well(u, 2) * mu / (eps * eps)
    return mu, rhs


def grad_mugnai_penalty(grid: PeriodicGrid, u: np.ndarray, eps: float, reg: RegParams = RegParams()) -> np.ndarray:
    """Regularized Mugnai penalty W'(u) B_sigma(u) with

        B_sigma(u) = div( (div v) v ) - div( (grad v) v ),
        v = grad u / sqrt(|grad u|^2 + sigma^2),

    all derivatives centered FD.  On profile data B_sigma ~ H^2 - |A|^2 (so
    it vanishes identically in 1D and 2D at leading order and equals 2/R^2
    on a 3D sphere).  The curl-based rewriting sometimes quoted for this
    operator evaluates to -B_sigma on unit irrotational fields and is not
    used here; the definition above is the one consistent with the flow
    derivation and the matched asymptotics.
    """
    if reg.sigma <= 0:
        raise ValueError("the flow penalty requires sigma > 0")
    dx = grid.spacing
    g = fd_gradient(grid, u)
    v, _ = _normal(g, reg.sigma)

    jac = np.empty((grid.dims, grid.dims) + grid.shape)
    for i in range(grid.dims):
        for j in range(grid.dims):
            jac[i, j] = (np.roll(v[i], -1, axis=j) - np.roll(v[i], 1, axis=j)) / (2.0 * dx)
    div_v = np.trace(jac, axis1=0, axis2=1)
    jac_v = np.einsum("ij...,j...->i...", jac, v)
    b_sigma = fd_divergence(grid, div_v * v) - fd_divergence(grid, jac_v)
    return well(u, 1) * b_sigma


def grad_mugnai(grid: PeriodicGrid, u: np.ndarray, eps: float, reg: RegParams = RegParams()) -> np.ndarray:
    """Exact L2 gradient of the (regularized, discrete) Mugnai energy.

    Adjoint form of the first variation: with T = eps Hess u - (W'/eps) n x n,

        grad E = Hess* T - W''(u) (T:nn)/eps^2
                 + div( (2/eps^2) W'(u) [ Tn/s - ((Tn).g) g / s^3 ] )

    which is the divergence form of the Mugnai flow derivation before the
    pointwise chain-rule expansion into B(u); kept in this form so the
    discrete adjoint is exact.
    """
    _check_eps(eps)
    T, H, g, n, s = _mugnai_tensor(grid, u, eps, reg)
    wp = well(u, 1)
    Tn = np.einsum("ij...,j...->i...", T, n)
    Tnn = np.einsum("i...,i...->...", Tn, n)
    vec = (2.0 / eps**2) * wp * (Tn / s - np.einsum("i...,i...->...", Tn, g) * g / s**3)
    return hessian_adjoint(grid, T) - well(u, 2) * Tnn / eps**2 + fd_divergence(grid, vec)


def grad_bellettini(grid: PeriodicGrid, u: np.ndarray, eps: float, reg: RegParams = RegParams()) -> np.ndarray:
    """Right-hand side of the Bellettini flow, -grad E / eps.

    grad E = div( A/s - (A.g) g/s^3 ) - (eps/2) div(chi K^2 grad u)
             + chi K^2 W'(u) / (2 eps),   A = grad(chi K h_eps),

    the divergence form of (K^2/2)(Lap u - W'/eps^2) + (1/2) grad[K^2].grad u
    - (1/eps) div(P^u grad[K h_eps]/|grad u|); chi cuts |grad u| <= eta_grad.
    """
    _check_eps(eps)
    g = fd_gradient(grid, u)
    n, s = _normal(g, reg.sigma)
    K = fd_divergence(grid, n)
    h_eps = 0.5 * eps * np.sum(g * g, axis=0) + well(u) / eps
    chi = (np.sum(g * g, axis=0) > reg.eta_grad**2).astype(float)

    A = fd_gradient(grid, chi * K * h_eps)
    Ag = np.einsum("i...,i...->...", A, g)
    # with sigma > 0 the 1/s factors are the smooth derivative of nu_sigma;
    # at sigma = 0 they are the explicit 1/|grad u| and take the eta cutoff
    inv_s = 1.0 / s if reg.sigma > 0 else chi / s
    grad_E = (
        fd_divergence(grid, A * inv_s - Ag * g * inv_s**3)
        - 0.5 * eps * fd_divergence(grid, chi * K * K * g)
        + chi * K * K * well(u, 1) / (2.0 * eps)
    )
    return -grad_E / eps


def _grad_err_penalty(grid, u, eps, alpha_exp, reg):
    """L2 gradient of (1/eps^{1+a}) int zeta~^2 (exact discrete adjoint)."""
    g = fd_gradient(grid, u)
    n, s = _normal(g, reg.sigma)
    H = fd_hessian(grid, u)
    Hg = np.einsum("ij...,j...->i...", H, g)
    Q = np.einsum("i...,i...->...", Hg, g) / (s * s)
    zt = eps * Q - well(u, 1) / eps

    ea = eps**alpha_exp
    mat = (2.0 / ea) * zt * (n[:, None] * n[None, :])
    vec = (4.0 / ea) * zt * (Hg - Q * g) / (s * s)
    return (
        hessian_adjoint(grid, mat)
        - (2.0 / (eps**2 * ea)) * well(u, 2) * zt
        - fd_divergence(grid, vec)
    )


def grad_err(
    grid: PeriodicGrid,
    u: np.ndarray,
    eps: float,
    alpha_exp: float = 0.0,
    beta: float = 1.0,
    reg: RegParams = RegParams(),
) -> np.ndarray:
    """rhs of the ERR flow (eps^2 du/dt = rhs); beta = 0 is exactly the classical rhs."""
    _check_eps(eps)
    rhs = grad_classical(grid, u, eps)[1]
    if beta > 0:
        rhs = rhs - beta * eps * _grad_err_penalty(grid, u, eps, alpha_exp, reg)
    return rhs


# ---------------------------------------------------------------------------
# finite-difference oracle
# ---------------------------------------------------------------------------

ENERGY_KINDS = ("classical", "mugnai", "bellettini", "err")


def _energy_and_gradient(
    kind: str,
    grid: PeriodicGrid,
    eps: float,
    reg: RegParams,
    alpha_exp: float,
    beta: float,
) -> tuple[Callable[[np.ndarray], float], Callable[[np.ndarray], np.ndarray]]:
    if kind == "classical":
        return (
            lambda u: eval_classical(grid, u, eps),
            lambda u: -grad_classical(grid, u, eps)[1] / eps,
        )
    if kind == "mugnai":
        return (
            lambda u: eval_mugnai(grid, u, eps, reg),
            lambda u: grad_mugnai(grid, u, eps, reg),
        )
    if kind == "bellettini":
        return (
            lambda u: eval_bellettini(grid, u, eps, reg),
            lambda u: -eps * grad_bellettini(grid, u, eps, reg),
        )
    if kind == "err":
        return (
            lambda u: eval_err(grid, u, eps, alpha_exp, beta, reg),
            lambda u: -grad_err(grid, u, eps, alpha_exp, beta, reg) / eps,
        )
    raise ValueError(f"unknown energy kind {kind!r}; known: {', '.join(ENERGY_KINDS)}")


def l2_gradient(
    kind: str,
    grid: PeriodicGrid,
    u: np.ndarray,
    eps: float,
    reg: RegParams = RegParams(),
    alpha_exp: float = 0.0,
    beta: float = 1.0,
) -> np.ndarray:
    """L2 gradient field of the requested energy (one consistent convention)."""
    return _energy_and_gradient(kind, grid, eps, reg, alpha_exp, beta)[1](u)


def check_gradient(
    kind: str,
    grid: PeriodicGrid,
    u: np.ndarray,
    eps: float,
    direction: np.ndarray,
    h: float = 1e-5,
    reg: RegParams = RegParams(),
    alpha_exp: float = 0.0,
    beta: float = 1.0,
) -> float:
    """Relative error between <grad E, w> and the central FD of E along w."""
    if not 1e-6 <= h <= 1e-3:
        raise ValueError("h must be in [1e-6, 1e-3]")
    energy, gradient = _energy_and_gradient(kind, grid, eps, reg, alpha_exp, beta)
    analytic = grid_mean(gradient(u) * direction)
    fd = (energy(u + h * direction) - energy(u - h * direction)) / (2.0 * h)
    denom = max(abs(fd), abs(analytic), 1e-30)
    return abs(analytic - fd) / denom
