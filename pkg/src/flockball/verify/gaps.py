"""Quadratic stability checks for the Riesz-type energies and shell potentials."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.optimize import minimize_scalar

from ..density import (
    RadialGrid,
    RadialProfile,
    asymmetry,
    make_profile,
    shell_pattern_function,
)
from ..energy import interaction, potential_of_density, ball_interaction
from ..errors import RegimeError, ShellViolation, ZeroMassError
from ..geometry import ball_radius, ball_volume, sphere_area
from ..radial_kernel import KernelMatrix, KernelParams, ball_potential, kernel_matrix
from .family import family_grid, profile_family
from .records import ENERGY_BUDGET, PASS, FAIL, VerifyRecord, combine, decide, resolution_budget


@lru_cache(maxsize=64)
def _unit_ball_interaction(mu: float, N: int) -> float:
    return ball_interaction(mu, N)


def ball_reference(mu: float, N: int, mass: float) -> float:
    """Exact ``I_mu[1_{E*}]`` for the ball of volume ``mass``."""
    R = ball_radius(mass, N)
    return R ** (2 * N + mu) * _unit_ball_interaction(float(mu), int(N))


@dataclass(frozen=True)
class GapResult:
    ratio: float
    gap: float
    normalized_gap: float
    asymmetry: float
    shift: float
    mass: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def _gap(rho: RadialProfile, K: KernelMatrix, sign: float, asym=None) -> GapResult:
    m = rho.mass
    if not m > 0:
        raise ZeroMassError("gap checks need positive mass")
    mu, N = K.mu, K.N
    gap = sign * (interaction(rho, rho, K) - ball_reference(mu, N, m))
    A, shift = asym if asym is not None else asymmetry(rho)
    scale = m ** (2.0 + mu / N)
    ratio = gap / (scale * A * A) if A > 0 else math.inf
    return GapResult(ratio, gap, gap / scale, A, shift, m)


def check_attractive_gap(rho: RadialProfile, params: KernelParams, K_a: KernelMatrix, asym=None) -> GapResult:
    """``(I_alpha[rho] - I_alpha[1_{E*}]) / (m^{2+alpha/N} A^2)``; ``inf`` when ``A = 0``."""
    if K_a.mu != params.alpha:
        raise RegimeError("K_a must be the attractive matrix")
    return _gap(rho, K_a, 1.0, asym)


def check_repulsive_gap(rho: RadialProfile, params: KernelParams, K_r: KernelMatrix, asym=None) -> GapResult:
    """``(I_{-lambda}[1_{E*}] - I_{-lambda}[rho]) / (m^{2-lambda/N} A^2)``."""
    if K_r.mu != -params.lam:
        raise RegimeError("K_r must be the repulsive matrix")
    return _gap(rho, K_r, -1.0, asym)


def gap_suite(kind: str, params: KernelParams, seed: int, cells: int = 1024, statement: str | None = None) -> VerifyRecord:
    """Gap sign and ratio range over the seeded 200-profile family."""
    grid = family_grid(params.N, cells)
    mu = params.alpha if kind == "attractive" else -params.lam
    K = kernel_matrix(grid, mu, params.N)
    check = check_attractive_gap if kind == "attractive" else check_repulsive_gap
    fam = profile_family(seed, grid)
    results = []
    for name, rho in fam:
        results.append((name, check(rho, params, K)))
    h, R = grid.max_width, 1.0
    budget = resolution_budget(h, R, ENERGY_BUDGET)
    norm = np.array([r.normalized_gap for _, r in results])
    A = np.array([r.asymmetry for _, r in results])
    resolved = A >= h / R
    ratios = np.array([r.ratio for _, r in results])[resolved]
    worst = int(np.argmin(norm))
    v_sign = decide(float(norm.min()), budget)
    v_pos = PASS if ratios.size and ratios.min() > 0 and np.isfinite(ratios.max()) else FAIL
    return VerifyRecord(
        statement=statement or f"{kind}-gap",
        inputs={"params": params.as_dict(), "seed": seed, "cells": cells, "family_size": len(fam)},
        measured={
            "min_normalized_gap": float(norm.min()),
            "worst_profile": fam[worst][0],
            "negative_beyond_budget": int(np.sum(norm < -budget)),
            "resolved_profiles": int(resolved.sum()),
            "min_ratio": float(ratios.min()) if ratios.size else math.nan,
            "max_ratio": float(ratios.max()) if ratios.size else math.nan,
        },
        fit={"c_hat": float(ratios.min()) if ratios.size else math.nan},
        budget=budget,
        verdict=combine([v_sign, v_pos]),
    )


# ---------------------------------------------------------------------------
# shell deficit


@dataclass(frozen=True)
class ShellDeficitResult:
    theta: float
    pattern: str
    deficit: float
    ratio: float
    asymmetry: float
    repulsive_ratio: float


def shell_grid(R: float, thetas, patterns, N: int, cells: int = 1024, r_max_factor: float = 2.5) -> RadialGrid:
    """Uniform grid with every pattern breakpoint inserted as an edge."""
    extra = [R]
    for th in thetas:
        extra += [(1 - th) * R, (1 + th) * R]
        for pat in patterns:
            extra += shell_pattern_function(pat, R, float(th), N)[1]
    return RadialGrid.uniform(r_max_factor * R, cells, N).with_edges(extra)


def _assert_in_shell(rho: RadialProfile, R: float, theta: float):
    g = rho.grid
    inner = g.edges[1:] <= (1 - theta) * R
    outer = g.edges[:-1] >= (1 + theta) * R
    if np.any(rho.values[inner] < 1 - 1e-12) or np.any(rho.values[outer] > 0):
        raise ShellViolation(f"profile leaves the theta={theta} shell around radius {R}")


def check_shell_deficit(
    theta: float,
    params: KernelParams,
    m: float,
    pattern: str = "outer_shift",
    grid: RadialGrid | None = None,
    cells: int = 1024,
    with_asymmetry: bool = True,
) -> ShellDeficitResult:
    """``(I_{-lambda}[1_{E*}] - I_{-lambda}[rho]) / (m^{2-lambda/N} theta^2)`` for a shell pattern."""
    if not params.energy_regime:
        raise RegimeError("shell deficit bound needs lambda < N-1")
    N = params.N
    R = ball_radius(m, N)
    if grid is None:
        grid = shell_grid(R, [theta], [pattern], N, cells)
    rho = make_profile("shell_perturbed_ball", grid, R=R, theta=theta, pattern=pattern)
    _assert_in_shell(rho, R, theta)
    K_r = kernel_matrix(grid, -params.lam, N)
    deficit = ball_reference(-params.lam, N, rho.mass) - interaction(rho, rho, K_r)
    scale = m ** (2.0 - params.lam / N)
    ratio = deficit / (scale * theta * theta) if theta > 0 else math.inf
    if with_asymmetry and theta > 0:
        A, _ = asymmetry(rho)
        rep = deficit / (scale * A * A) if A > 0 else math.inf
    else:
        A, rep = 0.0, math.inf
    return ShellDeficitResult(theta, pattern, deficit, ratio, A, rep)


SHELL_THETAS = (0.02, 0.03, 0.05, 0.08, 0.12, 0.2, 0.3, 0.5)
SLOPE_RANGE = (0.02, 0.3)


def fit_loglog(x, y) -> float:
    return float(np.polyfit(np.log(np.asarray(x)), np.log(np.asarray(y)), 1)[0])


def shell_deficit_suite(params: KernelParams, m: float = None, cells: int = 1024, thetas=SHELL_THETAS,
                        patterns=("outer_shift", "half_fill", "ramp", "sliver_swap"),
                        statement: str = "shell-deficit") -> VerifyRecord:
    N = params.N
    m = ball_volume(1.0, N) if m is None else m
    R = ball_radius(m, N)
    grid = shell_grid(R, thetas, patterns, N, cells)
    res = [check_shell_deficit(th, params, m, pat, grid=grid) for pat in patterns for th in thetas]
    ratios = np.array([r.ratio for r in res])
    deficits = np.array([r.deficit for r in res])
    scale = m ** (2.0 - params.lam / N)
    budget = resolution_budget(grid.max_width, R, ENERGY_BUDGET)
    lo, hi = SLOPE_RANGE
    sel = [r for r in res if r.pattern == "outer_shift" and lo <= r.theta <= hi]
    slope = fit_loglog([r.theta for r in sel], [r.deficit for r in sel]) if len(sel) >= 2 else math.nan
    sandwich = [r.repulsive_ratio for r in res if math.isfinite(r.repulsive_ratio)]
    v_sign = decide(float(deficits.min() / scale), budget)
    v_bounded = PASS if np.all(np.isfinite(ratios)) else FAIL
    v_slope = decide(0.1 - abs(slope - 2.0), 0.0) if math.isfinite(slope) else FAIL
    return VerifyRecord(
        statement=statement,
        inputs={"params": params.as_dict(), "mass": m, "thetas": list(thetas), "patterns": list(patterns), "cells": cells},
        measured={
            "max_ratio": float(ratios.max()),
            "min_ratio": float(ratios.min()),
            "min_normalized_deficit": float(deficits.min() / scale),
            "outer_shift_ratios": [r.ratio for r in res if r.pattern == "outer_shift"],
            "min_sandwich_ratio": float(min(sandwich)) if sandwich else math.nan,
        },
        fit={"C_hat": float(ratios.max()), "slope_outer_shift": slope, "slope_range": list(SLOPE_RANGE)},
        budget=budget,
        verdict=combine([v_sign, v_bounded, v_slope]),
        notes="slope verdict requires |slope - 2| <= 0.1",
    )


# ---------------------------------------------------------------------------
# shell potential bound


def shell_radius_for_mass(m: float, theta: float, N: int) -> float:
    """``R`` such that the shell ``(1-theta) R < r < (1+theta) R`` has volume ``m``."""
    return (N * m / (sphere_area(N) * ((1 + theta) ** N - (1 - theta) ** N))) ** (1.0 / N)


def exact_shell_potential(r, lam: float, N: int, r_in: float, r_out: float):
    """``|x|^{-lambda} * 1_{r_in < |x| < r_out}`` from two ball potentials."""
    r = np.asarray(r, dtype=float)
    val = r_out ** (N - lam) * ball_potential(-lam, r / r_out, N)
    if r_in > 0:
        val = val - r_in ** (N - lam) * ball_potential(-lam, r / r_in, N)
    return val


def exact_shell_sup(lam: float, N: int, r_in: float, r_out: float) -> float:
    rs = np.linspace(r_in, r_out, 201) if r_in > 0 else np.linspace(0.0, r_out, 201)
    vals = exact_shell_potential(rs, lam, N, r_in, r_out)
    k = int(np.argmax(vals))
    lo, hi = rs[max(k - 1, 0)], rs[min(k + 1, rs.size - 1)]
    best = float(vals[k])
    if hi > lo:
        res = minimize_scalar(lambda t: -float(exact_shell_potential(t, lam, N, r_in, r_out)),
                              bounds=(lo, hi), method="bounded", options={"xatol": 1e-10 * r_out})
        best = max(best, -float(res.fun))
    return best


@dataclass(frozen=True)
class ShellPotentialResult:
    thetas: tuple
    sup_grid: tuple
    sup_exact: tuple
    ratios: tuple
    band: float
    exponent: float


SHELL_POTENTIAL_THETAS = (0.4, 0.2, 0.1, 0.05, 0.025)


def check_shell_potential_bound(theta_ladder, lam: float, N: int, fixed_mass: float, cells: int = 1024) -> ShellPotentialResult:
    """Sup of the ``-lambda`` potential of fixed-mass shells against ``(theta R)^{lambda/(N-1)} m^{1-lambda/(N-1)}``."""
    if not lam < N - 1:
        raise RegimeError("shell potential bound needs lambda < N-1")
    sups, exact, ratios, refs = [], [], [], []
    for th in theta_ladder:
        R = shell_radius_for_mass(fixed_mass, th, N)
        r_in, r_out = (1 - th) * R, (1 + th) * R
        grid = RadialGrid.uniform(2.5 * r_out, cells, N).with_edges([r_in, r_out])
        rho = make_profile("annulus", grid, a=r_in, b=r_out) if r_in > 0 else make_profile("ball", grid, R=r_out)
        K = kernel_matrix(grid, -lam, N)
        s = float(potential_of_density(rho, K).max())
        ref = (th * R) ** (lam / (N - 1)) * fixed_mass ** (1 - lam / (N - 1))
        sups.append(s)
        exact.append(exact_shell_sup(lam, N, r_in, r_out))
        refs.append(ref)
        ratios.append(s / ref)
    band = max(ratios) / min(ratios)
    expo = fit_loglog(refs, sups) if len(refs) >= 2 else math.nan
    return ShellPotentialResult(tuple(theta_ladder), tuple(sups), tuple(exact), tuple(ratios), band, expo)


def shell_potential_suite(lam: float, N: int, fixed_mass: float = None, cells: int = 1024,
                          thetas=SHELL_POTENTIAL_THETAS, statement: str = "shell-potential") -> VerifyRecord:
    fixed_mass = ball_volume(1.0, N) if fixed_mass is None else fixed_mass
    res = check_shell_potential_bound(thetas, lam, N, fixed_mass, cells)
    rel = [abs(a / b - 1) for a, b in zip(res.sup_grid, res.sup_exact)]
    budget = max(resolution_budget(2.5 * (1 + th) / cells, 1.0) for th in thetas)
    return VerifyRecord(
        statement=statement,
        inputs={"lambda": lam, "N": N, "mass": fixed_mass, "thetas": list(thetas), "cells": cells},
        measured={"sup_grid": list(res.sup_grid), "sup_exact": list(res.sup_exact), "ratios": list(res.ratios),
                  "max_rel_grid_vs_exact": max(rel)},
        fit={"band": res.band, "C_hat_max": max(res.ratios), "exponent": res.exponent},
        budget=budget,
        verdict=decide(2.0 - res.band, budget),
        notes="band = max/min of the normalized sup ratio; pass requires band <= 2",
    )


# ---------------------------------------------------------------------------
# standard sup-potential bound


def coulomb_standard_suite(lam: float, N: int, seed: int, count: int = 50, cells: int = 1024,
                           statement: str = "coulomb-standard") -> VerifyRecord:
    """``sup (|x|^{-lambda} * rho) <= C m^{1-lambda/N}`` with ``C`` from balls."""
    from .family import random_profiles

    grid = family_grid(N, cells)
    K = kernel_matrix(grid, -lam, N)
    C_ball = ball_potential(-lam, 0.0, N) * ball_volume(1.0, N) ** (-(1 - lam / N))
    rng = np.random.default_rng(seed)
    ratios = []
    for _, rho in random_profiles(grid, count, rng):
        sup = float(potential_of_density(rho, K).max())
        ratios.append(sup / (rho.mass ** (1 - lam / N)))
    worst = max(ratios) / C_ball
    budget = resolution_budget(grid.max_width, 1.0, ENERGY_BUDGET)
    return VerifyRecord(
        statement=statement,
        inputs={"lambda": lam, "N": N, "seed": seed, "count": count, "cells": cells},
        measured={"max_ratio": max(ratios), "min_ratio": min(ratios)},
        fit={"C_ball": C_ball, "max_ratio_over_C": worst},
        budget=budget,
        verdict=decide(1.0 - worst, budget),
    )
