"""Interaction energies and potentials of radial profiles via kernel matrices."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .density import RadialGrid, RadialProfile
from .errors import GridMismatch, RegimeError
from .geometry import sphere_area
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .radial_kernel import KernelMatrix, KernelParams, ball_potential, kernel_matrix

__all__ = [
    "EnergyBreakdown",
    "KernelMatrix",
    "interaction",
    "total_energy",
    "potential_of_density",
    "repulsive_psd_check",
    "ball_interaction",
    "matrices_for",
]


@dataclass(frozen=True)
class EnergyBreakdown:
    attract: float
    repel: float

    @property
    def total(self) -> float:
        return self.attract + self.repel

    def as_dict(self) -> dict:
        return {"attract": self.attract, "repel": self.repel, "total": self.total}


def _values(x, K: KernelMatrix) -> np.ndarray:
    if isinstance(x, RadialProfile):
        if x.grid != K.grid:
            raise GridMismatch("profile and kernel matrix live on different grids")
        return x.values
    v = np.asarray(x, dtype=float)
    if v.shape != (K.grid.M,):
        raise GridMismatch(f"expected {K.grid.M} cell values, got shape {v.shape}")
    return v


def interaction(rho, sigma, K: KernelMatrix) -> float:
    """``I_mu[rho, sigma] = 1/2 iint rho(x) sigma(y) |x - y|^mu``.

    Accepts profiles or raw (possibly signed) per-cell values.
    """
    a = _values(rho, K)
    b = _values(sigma, K)
    return 0.5 * float(a @ (K.weighted @ b))


def total_energy(rho: RadialProfile, params: KernelParams, K_a: KernelMatrix, K_r: KernelMatrix) -> EnergyBreakdown:
    if K_a.mu != params.alpha or K_r.mu != -params.lam:
        raise RegimeError(
            f"kernel matrices have mu=({K_a.mu}, {K_r.mu}), expected ({params.alpha}, {-params.lam})"
        )
    if K_a.N != params.N or K_r.N != params.N:
        raise GridMismatch("kernel matrices built for a different dimension")
    return EnergyBreakdown(interaction(rho, rho, K_a), interaction(rho, rho, K_r))


def potential_of_density(rho, K: KernelMatrix) -> np.ndarray:
    """Cell averages of ``|x|^mu * rho``."""
    v = _values(rho, K)
    return (K.weighted @ v) / K.grid.volumes


def repulsive_psd_check(eta, K_r: KernelMatrix) -> float:
    """Quadratic form ``1/2 eta^T K eta`` of a signed cell function."""
    if K_r.mu >= 0:
        raise RegimeError("positive-definiteness check needs a repulsive kernel (mu < 0)")
    v = _values(eta, K_r)
    return 0.5 * float(v @ (K_r.weighted @ v))


def ball_interaction(mu: float, N: int, R: float = 1.0, quad: QuadratureSpec = DEFAULT_QUAD) -> float:
    """``I_mu[1_{B_R}] = R^{2N+mu} / 2 int_{B_1} phi_mu``, by radial quadrature of ``phi_mu``."""
    from .quadrature import gauss_legendre, graded_rule, levels_for_exponent

    # phi_mu is smooth inside the ball apart from its behaviour at r = 1
    L = levels_for_exponent(min(mu + N, 1.0), quad.rel_tol * 1e-2)
    x, w = graded_rule(0.0, 1.0, L, max(quad.nodes_per_cell, 8), "right")
    vals = ball_potential(mu, x, N, quad)
    unit = 0.5 * sphere_area(N) * float(np.sum(w * x ** (N - 1) * vals))
    return R ** (2 * N + mu) * unit


def matrices_for(params: KernelParams, grid: RadialGrid, quad: QuadratureSpec = DEFAULT_QUAD, backend=None):
    """Attractive and repulsive kernel matrices for ``params`` on ``grid``."""
    K_a = kernel_matrix(grid, params.alpha, params.N, quad, backend=backend)
    K_r = kernel_matrix(grid, -params.lam, params.N, quad, backend=backend)
    return K_a, K_r
