"""Minimizer scaling along a mass ladder: asymmetry, support and shell width."""
from __future__ import annotations

import numpy as np

from ..density import RadialGrid, RadialProfile, asymmetry
from ..errors import RegimeError
from ..geometry import ball_radius, ball_volume
from ..quadrature import DEFAULT_QUAD, QuadratureSpec
from ..radial_kernel import KernelParams
from ..solver import SolverOptions, minimize
from .records import FAIL, PASS, SCALING_BUDGET, VerifyRecord, combine

R_LADDER = (2.0, 4.0, 8.0, 16.0, 32.0)
SUPPORT_FACTOR = 1.2
# cell values within this distance of 0 or 1 count as empty or full
LEVEL_TOL = 1e-3


def shell_width(rho: RadialProfile, R: float, level_tol: float = LEVEL_TOL) -> float:
    """Smallest ``theta`` with ``1_{(1-theta)B} <= rho <= 1_{(1+theta)B}`` for the centered ball ``B``."""
    g, v = rho.grid, rho.values
    not_full = np.flatnonzero(v < 1.0 - level_tol)
    inner = float(g.edges[not_full[0]]) if not_full.size else g.r_max
    occupied = np.flatnonzero(v > level_tol)
    outer = float(g.edges[occupied[-1] + 1]) if occupied.size else 0.0
    return max(0.0, 1.0 - inner / R, outer / R - 1.0)


def grid_for(R: float, N: int, cells: int, r_max_factor: float) -> RadialGrid:
    return RadialGrid.uniform(r_max_factor * R, cells, N)


def scaling_study(
    params: KernelParams,
    R_ladder=R_LADDER,
    cells: int = 1024,
    r_max_factor: float = 2.5,
    options: SolverOptions = SolverOptions(),
    quad: QuadratureSpec = DEFAULT_QUAD,
    statement: str = "scaling",
) -> VerifyRecord:
    """Solve along the ladder and test the asymmetry decay, support bound and shell width.

    The asymmetry bound is ``A <= C_hat m^{-(alpha+lambda)/N} + 2 h / R``: the
    additive term is the discretization floor of ``A`` on a grid of width ``h``.
    """
    if not params.energy_regime:
        raise RegimeError("scaling study needs lambda < N-1")
    N = params.N
    expo = (params.alpha + params.lam) / N
    rows = []
    for R in sorted(float(x) for x in R_ladder):
        m = ball_volume(R, N)
        grid = grid_for(R, N, cells, r_max_factor)
        rep = minimize(params, m, grid, options, quad)
        A, shift = asymmetry(rep.profile)
        R_m = ball_radius(m, N)
        rows.append(
            {
                "R": R,
                "m": m,
                "h": grid.max_width,
                "floor": SCALING_BUDGET * grid.max_width / R_m,
                "converged": rep.converged,
                "iterations": rep.iterations,
                "energy_monotone": rep.energy_monotone(),
                "el_residual": rep.residuals[-1],
                "A": A,
                "shift": shift,
                "support_radius": rep.profile.support_radius(),
                "support_ratio": rep.profile.support_radius() / R_m,
                "shell_width": shell_width(rep.profile, R_m),
            }
        )
    A = np.array([r["A"] for r in rows])
    m = np.array([r["m"] for r in rows])
    floor = np.array([r["floor"] for r in rows])
    C_hat = float(A[0] * m[0] ** expo)
    bound = C_hat * m ** (-expo) + floor
    for r, b in zip(rows, bound):
        r["A_bound"] = float(b)
    # non-increasing up to roundoff in the measured asymmetry
    monotone = bool(np.all(np.diff(A) <= 1e-9 * np.maximum(A[:-1], 1e-300) + 1e-14))
    within = bool(np.all(A <= bound))
    support_ok = all(r["support_ratio"] <= SUPPORT_FACTOR for r in rows)
    solved = all(r["converged"] and r["energy_monotone"] for r in rows)
    top = rows[-1]
    floor_ok = top["A"] < top["floor"] and top["shell_width"] < top["floor"]
    # threshold mass: beyond it every ladder point sits at the grid floor
    m_floor = float("nan")
    for r in reversed(rows):
        if not (r["A"] < r["floor"] and r["shell_width"] < r["floor"]):
            break
        m_floor = r["m"]
    checks = {
        "solver_converged": solved,
        "A_non_increasing": monotone,
        "A_bound": within,
        "support_radius": support_ok,
        "grid_floor_at_largest_mass": floor_ok,
    }
    verdict = combine(PASS if ok else FAIL for ok in checks.values())
    return VerifyRecord(
        statement=statement,
        inputs={
            "params": params.as_dict(),
            "R_ladder": [r["R"] for r in rows],
            "cells": cells,
            "r_max_factor": r_max_factor,
            "init": options.init,
        },
        measured={"per_R": rows, "checks": checks},
        fit={"C_hat": C_hat, "exponent": -expo, "m_floor": m_floor},
        budget=float(floor.max()),
        verdict=verdict,
    )
