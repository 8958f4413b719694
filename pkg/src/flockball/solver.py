"""Mass-constrained minimization of the attractive-repulsive energy.

The primary scheme is a damped bathtub iteration

    rho <- (1 - tau) rho + tau * bathtub(psi(rho), m),

which is Frank-Wolfe with the bathtub filling as linear minimization oracle
(``psi`` is the energy gradient).  Its fixed points are exactly the discrete
Euler-Lagrange points.  A projected-gradient scheme is kept as a fallback.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy.optimize import brentq

from .density import RadialGrid, RadialProfile, bathtub_fill, make_profile
from .energy import EnergyBreakdown, matrices_for, potential_of_density, total_energy
from .errors import DomainError, InfeasibleMass, RegimeError, ZeroMassError
from .geometry import ball_radius, ball_volume
from .quadrature import DEFAULT_QUAD, QuadratureSpec
from .radial_kernel import KernelMatrix, KernelParams

INITS = ("ball", "annulus", "uniform_slab", "custom")


@dataclass(frozen=True)
class SolverOptions:
    tau: float = 0.5
    max_iters: int = 500
    el_tol: float = 1e-6
    energy_backtrack: bool = True
    init: str = "annulus"
    init_params: dict = field(default_factory=dict)
    method: str = "bathtub"
    tau_floor: float = 2.0**-10
    polish: bool = False

    def __post_init__(self):
        if not 0 < self.tau <= 1:
            raise DomainError("tau must lie in (0, 1]")
        if not self.el_tol > 0:
            raise DomainError("el_tol must be positive")
        if self.init not in INITS:
            raise DomainError(f"init must be one of {INITS}")
        if self.method not in ("bathtub", "projected_gradient"):
            raise DomainError("method must be 'bathtub' or 'projected_gradient'")
        if self.max_iters < 0:
            raise DomainError("max_iters must be >= 0")


@dataclass
class SolverReport:
    profile: RadialProfile
    energies: list = field(default_factory=list)
    residuals: list = field(default_factory=list)
    multipliers: list = field(default_factory=list)
    taus: list = field(default_factory=list)
    converged: bool = False
    iterations: int = 0
    message: str = ""
    method: str = "bathtub"
    breakdown: EnergyBreakdown | None = None

    def energy_monotone(self, slack: float = 1e-12) -> bool:
        e = np.asarray(self.energies)
        return bool(np.all(np.diff(e) <= slack * np.maximum(1.0, np.abs(e[:-1]))))

    def summary(self) -> dict[str, Any]:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "method": self.method,
            "message": self.message,
            "final_energy": self.energies[-1] if self.energies else None,
            "final_residual": self.residuals[-1] if self.residuals else None,
            "final_multiplier": self.multipliers[-1] if self.multipliers else None,
            "mass": self.profile.mass,
        }


def _potential(values, K_a: KernelMatrix, K_r: KernelMatrix) -> np.ndarray:
    return potential_of_density(values, K_a) + potential_of_density(values, K_r)


def _energy(values, K_a, K_r) -> float:
    v = np.asarray(values)
    return 0.5 * float(v @ (K_a.weighted @ v) + v @ (K_r.weighted @ v))


def el_residual_from_potential(values, psi, volumes) -> tuple[float, float]:
    """Residual and multiplier given the potential ``psi`` per cell.

    The residual is ``min_mu sum vol * [rho (psi - mu)_+ + (1 - rho)(mu - psi)_+]``
    divided by ``m |mu|``; it vanishes exactly at discrete EL points.  When the
    minimizing ``mu`` is an interval, its midpoint is returned.
    """
    rho = np.asarray(values, dtype=float)
    psi = np.asarray(psi, dtype=float)
    vol = np.asarray(volumes, dtype=float)
    m = float(rho @ vol)
    if not m > 0:
        raise ZeroMassError("EL residual needs positive mass")
    order = np.argsort(psi, kind="stable")
    p, r, v = psi[order], rho[order], vol[order]
    hole = (1.0 - r) * v
    full = r * v
    A = np.concatenate([[0.0], np.cumsum(hole)[:-1]])
    B = np.concatenate([[0.0], np.cumsum(hole * p)[:-1]])
    C = np.concatenate([np.cumsum(full[::-1])[::-1][1:], [0.0]])
    D = np.concatenate([np.cumsum((full * p)[::-1])[::-1][1:], [0.0]])
    res = p * A - B + D - p * C
    res = np.maximum(res, 0.0)
    best = float(res.min())
    tol = 1e-13 * (abs(best) + float(np.abs(p).max() * m))
    ties = np.flatnonzero(res <= best + tol)
    mu = 0.5 * (p[ties[0]] + p[ties[-1]])
    scale = m * max(abs(mu), 1e-300)
    return best / scale, float(mu)


def el_residual(rho: RadialProfile, params: KernelParams, K_a: KernelMatrix, K_r: KernelMatrix) -> tuple[float, float]:
    """Discrete Euler-Lagrange residual of ``rho`` and its multiplier ``mu``."""
    if not rho.mass > 0:
        raise ZeroMassError("EL residual needs positive mass")
    psi = _potential(rho.values, K_a, K_r)
    return el_residual_from_potential(rho.values, psi, rho.grid.volumes)


def initial_profile(options: SolverOptions, m: float, grid: RadialGrid) -> RadialProfile:
    N = grid.N
    R = ball_radius(m, N)
    p = dict(options.init_params)
    if options.init == "ball":
        return make_profile("ball", grid, R=R)
    if options.init == "annulus":
        a = float(p.get("a", 0.8 * R))
        b = (a**N + R**N) ** (1.0 / N)
        return make_profile("annulus", grid, a=a, b=b)
    if options.init == "uniform_slab":
        r_s = float(p.get("radius", min(2.0 * R, grid.r_max)))
        c = m / ball_volume(r_s, N)
        if c > 1:
            raise DomainError("slab too thin for the requested mass")
        base = make_profile("ball", grid, R=r_s)
        return RadialProfile(grid, c * base.values)
    values = np.asarray(p["values"], dtype=float)
    rho = RadialProfile(grid, values)
    if abs(rho.mass - m) > 1e-10 * m:
        raise DomainError(f"custom initial profile has mass {rho.mass}, expected {m}")
    return rho


def _project(z, vol, m):
    """Volume-weighted projection onto ``{0 <= x <= 1, sum vol x = m}``."""

    def excess(nu):
        return float(np.clip(z - nu, 0.0, 1.0) @ vol) - m

    lo, hi = float(z.min()) - 1.0, float(z.max())
    nu = brentq(excess, lo, hi, xtol=1e-15 * max(1.0, abs(hi)), maxiter=500)
    x = np.clip(z - nu, 0.0, 1.0)
    # remove the residual mass error on a free cell
    free = np.flatnonzero((x > 0) & (x < 1))
    if free.size:
        i = free[np.argmax(vol[free])]
        x[i] = min(1.0, max(0.0, x[i] + (m - float(x @ vol)) / vol[i]))
    return x


def minimize(
    params: KernelParams,
    m: float,
    grid: RadialGrid,
    options: SolverOptions = SolverOptions(),
    quad: QuadratureSpec = DEFAULT_QUAD,
    matrices: tuple[KernelMatrix, KernelMatrix] | None = None,
) -> SolverReport:
    """Minimize the energy over ``0 <= rho <= 1`` with mass ``m`` on ``grid``."""
    if not params.energy_regime:
        raise RegimeError(f"minimization needs lambda < N-1 (lambda={params.lam}, N={params.N})")
    if not m > 0:
        raise ZeroMassError("mass must be positive")
    if m > grid.capacity:
        raise InfeasibleMass(f"mass {m} exceeds grid capacity {grid.capacity}")
    K_a, K_r = matrices if matrices is not None else matrices_for(params, grid, quad)
    vol = grid.volumes
    rho = initial_profile(options, m, grid).values.copy()
    report = SolverReport(profile=RadialProfile(grid, rho), method=options.method)

    E = _energy(rho, K_a, K_r)
    it = 0
    while True:
        psi = _potential(rho, K_a, K_r)
        res, mu = el_residual_from_potential(rho, psi, vol)
        report.energies.append(E)
        report.residuals.append(res)
        report.multipliers.append(mu)
        if res <= options.el_tol:
            report.converged = True
            report.message = "EL residual below tolerance"
            break
        if it >= options.max_iters:
            report.message = "maximum iterations reached"
            break
        if options.method == "bathtub":
            target, _ = bathtub_fill(psi, m, grid)
            target = target.values
            if options.polish:
                # accept the pure bathtub profile outright when it is already an EL point
                E_t = _energy(target, K_a, K_r)
                if E_t <= E:
                    res_t, _ = el_residual_from_potential(target, _potential(target, K_a, K_r), vol)
                    if res_t <= options.el_tol:
                        rho, E = target.copy(), E_t
                        report.taus.append(1.0)
                        it += 1
                        continue
            direction = target - rho
        else:
            span = float(psi.max() - psi.min()) or 1.0
            direction = None
        tau = options.tau
        accepted = False
        while tau >= options.tau_floor:
            if direction is not None:
                cand = rho + tau * direction
            else:
                cand = _project(rho - tau * psi / span, vol, m)
            cand = np.clip(cand, 0.0, 1.0)
            E_c = _energy(cand, K_a, K_r)
            if not options.energy_backtrack or E_c <= E + 1e-14 * abs(E):
                accepted = True
                break
            tau *= 0.5
        if not accepted:
            report.message = "step size fell below the damping floor"
            break
        rho, E = cand, E_c
        report.taus.append(tau)
        it += 1
    report.iterations = it
    report.profile = RadialProfile(grid, rho)
    report.breakdown = total_energy(report.profile, params, K_a, K_r)
    return report
