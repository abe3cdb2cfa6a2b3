"""Double-well potential, optimal 1D transition profile, and matched-asymptotics helpers.

The well is fixed to W(s) = s^2 (1-s)^2 / 2, whose decreasing heteroclinic
between the two minima (normalized to q(0) = 1/2) is

    q(t) = (1 - tanh(t/2)) / 2 = 1 / (1 + e^t).

This normalization satisfies q'' = W'(q) and q' = -sqrt(2 W(q)) exactly
(equipartition along the profile), which every quadrature identity below
requires.  The surface-tension constant c0 = int_0^1 sqrt(2W) and the
profile action S = int q'^2 both equal 1/6.

The correctors of the inner asymptotic expansions solve

    eta1'' - W''(q) eta1 = z q'(z),   eta1(+-inf) = 0   (computed by BVP)
    eta2'' - W''(q) eta2 = q''(z),    eta2(+-inf) = 0   (closed form z q'/2)

and feed the velocity-law constants through int z q'' q' = -S/2 and
int W'''(q) eta1 (q')^2 = -S/2.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad
from scipy.linalg import solve_banded
from scipy.special import expit

__all__ = [
    "well",
    "profile_q",
    "eta2",
    "SampledProfile",
    "solve_eta1",
    "ProfileIntegrals",
    "profile_integrals",
]


def well(s, order: int = 0):
    """W(s) = s^2(1-s)^2/2 and derivatives up to order 4 (exact polynomials)."""
    s = np.asarray(s, dtype=float)
    if order == 0:
        return 0.5 * s * s * (1.0 - s) ** 2
    if order == 1:
        return s - 3.0 * s * s + 2.0 * s**3
    if order == 2:
        return 1.0 - 6.0 * s + 6.0 * s * s
    if order == 3:
        return -6.0 + 12.0 * s
    if order == 4:
        return np.full_like(s, 12.0)
    raise ValueError(f"order must be in 0..4, got {order}")


def profile_q(t, order: int = 0):
    """Optimal profile q(t) = 1/(1+e^t) and its first two derivatives.

    q' = -q(1-q) and q'' = W'(q); evaluated through expit for stability at
    large |t|.
    """
    t = np.asarray(t, dtype=float)
    q = expit(-t)
    if order == 0:
        return q
    if order == 1:
        return -q * (1.0 - q)
    if order == 2:
        return well(q, 1)
    raise ValueError(f"order must be in 0..2, got {order}")


def eta2(z):
    """Second corrector eta2(z) = z q'(z) / 2 (closed-form ODE solution)."""
    z = np.asarray(z, dtype=float)
    return 0.5 * z * profile_q(z, 1)


@dataclass(frozen=True)
class SampledProfile:
    """A profile sampled on uniform nodes of [-L, L]."""

    z: np.ndarray
    values: np.ndarray

    @property
    def spacing(self) -> float:
        return float(self.z[1] - self.z[0])

    def __call__(self, t):
        return np.interp(t, self.z, self.values)


def solve_eta1(L: float = 30.0, nodes: int = 8001) -> SampledProfile:
    """Solve eta1'' - W''(q) eta1 = z q'(z) with zero Dirichlet data at +-L.

    Standard 3-point FD two-point boundary value problem; the operator is
    coercive near the ends since W''(q(+-inf)) = 1 > 0.  The right-hand side
    decays exponentially, so the domain truncation error is negligible for
    L >= 20.
    """
    if L < 20:
        raise ValueError(f"L must be >= 20, got {L}")
    if nodes < 2000:
        raise ValueError(f"nodes must be >= 2000, got {nodes}")
    z = np.linspace(-L, L, nodes)
    h = z[1] - z[0]
    zi = z[1:-1]
    rhs = zi * profile_q(zi, 1)
    diag = -2.0 / h**2 - well(profile_q(zi), 2)
    off = np.full(zi.size - 1, 1.0 / h**2)

    ab = np.zeros((3, zi.size))
    ab[0, 1:] = off
    ab[1, :] = diag
    ab[2, :-1] = off
    try:
        inner = solve_banded((1, 1), ab, rhs)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - coercive operator
        raise RuntimeError("eta1 boundary value problem is singular") from exc

    values = np.zeros(nodes)
    values[1:-1] = inner
    return SampledProfile(z=z, values=values)


class ProfileIntegrals(NamedTuple):
    c0: float
    S: float
    zqq: float
    w3: float


def profile_integrals(L: float = 30.0, eta1: SampledProfile | None = None) -> ProfileIntegrals:
    """Quadrature values of the constants used by the asymptotic velocity laws.

    c0  = int_0^1 sqrt(2 W(s)) ds                       (= 1/6)
    S   = int q'(z)^2 dz                                (= 1/6)
    zqq = int z q''(z) q'(z) dz                         (= -S/2 = -1/12)
    w3  = int W'''(q(z)) eta1(z) q'(z)^2 dz             (= -S/2 = -1/12)
    """
    c0, c0_err = quad(lambda s: np.sqrt(2.0 * well(s)), 0.0, 1.0)
    S, S_err = quad(lambda z: profile_q(z, 1) ** 2, -L, L, points=[0.0])
    zqq, zqq_err = quad(lambda z: z * profile_q(z, 2) * profile_q(z, 1), -L, L, points=[0.0])
    for name, err in (("c0", c0_err), ("S", S_err), ("zqq", zqq_err)):
        if err > 2e-9:
            raise RuntimeError(f"quadrature for {name} did not converge (err={err:.2e})")

    if eta1 is None:
        eta1 = solve_eta1()
    zi = eta1.z
    integrand = well(profile_q(zi), 3) * eta1.values * profile_q(zi, 1) ** 2
    w3 = float(np.trapezoid(integrand, zi))
    return ProfileIntegrals(c0=float(c0), S=float(S), zqq=float(zqq), w3=w3)
