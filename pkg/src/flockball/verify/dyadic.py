"""Dyadic competitor sequence and its energy accounting."""
from __future__ import annotations

import math

import numpy as np
from scipy.optimize import brentq

from ..density import BallSpec, RadialProfile, asymmetry, competitor, make_profile
from ..energy import interaction, matrices_for
from ..errors import ZeroMassError
from ..quadrature import DEFAULT_QUAD, QuadratureSpec
from ..radial_kernel import KernelParams
from .el import sign_pattern
from .records import FAIL, PASS, VerifyRecord, combine

SPLIT_TOL = 1e-9
FROZEN_TOL = 1e-12


def default_levels(rho: RadialProfile, R: float) -> int:
    """Largest ``n`` with ``2^-n R`` still at least one cell width."""
    return max(0, int(math.floor(math.log2(R / rho.grid.max_width))))


def _pair_energy(f, g, K_a, K_r) -> float:
    return interaction(f, g, K_a) + interaction(f, g, K_r)


def dyadic_accounting(
    rho: RadialProfile,
    params: KernelParams,
    n_max: int | None = None,
    quad: QuadratureSpec = DEFAULT_QUAD,
    c_hat: float | None = None,
    statement: str = "dyadic",
) -> VerifyRecord:
    """Build ``rho_n = competitor(rho_{n-1}, 2^-n)`` and account for every energy change.

    The ball ``E*`` is the centered ball of the same mass.  Per level the record
    holds the direct energy difference, the main and remainder terms of its
    split around ``1_{E*}``, ``eps_n`` and whether the level was frozen.
    """
    m = rho.mass
    if not m > 0:
        raise ZeroMassError("dyadic accounting needs positive mass")
    N = params.N
    ball = BallSpec.from_mass(m, N)
    R = ball.R
    A, shift = asymmetry(rho)
    if n_max is None:
        n_max = default_levels(rho, R)
    radii = [R] + [R * (1 + s * 2.0**-n) for n in range(n_max + 1) for s in (-1, 1)]
    grid = rho.grid.with_edges(radii)
    cur = rho.refine(grid)
    K_a, K_r = matrices_for(params, grid, quad)
    ind = make_profile("ball", grid, R=R).values
    if c_hat is None:
        c_hat = sign_pattern(params, R, samples=2000)["c_hat"] if params.energy_regime else math.nan

    def energy(v):
        return _pair_energy(v, v, K_a, K_r)

    rows = []
    E_prev = energy(cur.values)
    for n in range(n_max + 1):
        theta = 2.0**-n
        prev = cur.values
        eps = 2.0**n * R**-N * cur.l1_to_ball(R)
        res = competitor(cur, theta, ball, detail=True)
        cur = res.profile
        eta = cur.values - prev
        E_new = energy(cur.values)
        direct = E_new - E_prev
        split_total = _pair_energy(eta, cur.values + prev, K_a, K_r)
        main = 2.0 * _pair_energy(eta, ind, K_a, K_r)
        remainder = _pair_energy(eta, cur.values + prev - 2.0 * ind, K_a, K_r)
        move = float(np.abs(eta) @ grid.volumes)
        # the direct difference carries roundoff of order eps * |E|
        roundoff = 64 * np.finfo(float).eps * (abs(E_new) + abs(E_prev))
        scale = max(abs(direct), abs(main), abs(remainder), 1e-300)
        gap = abs(main + remainder - direct)
        norm = 2.0**-n * R ** (N + params.alpha) * move
        rows.append(
            {
                "n": n,
                "theta": theta,
                "case": res.case,
                "m_i": res.m_i,
                "m_o": res.m_o,
                "eps": eps,
                "moved_mass": move,
                "frozen": move <= FROZEN_TOL * m,
                "energy_diff": direct,
                "split_total": split_total,
                "main": main,
                "remainder": remainder,
                "split_error": gap / scale,
                "split_ok": gap <= SPLIT_TOL * scale + roundoff,
                "main_normalized": -main / norm if move > 0 else math.nan,
                "remainder_normalized": remainder / norm if move > 0 else math.nan,
            }
        )
        E_prev = E_new

    split_err = max((r["split_error"] for r in rows if not r["frozen"]), default=0.0)
    split_ok = all(r["split_ok"] for r in rows)
    active = [r for r in rows if not r["frozen"]]
    p = 1.0 - params.lam / (N - 1) if params.energy_regime else 1.0

    def g(e):
        return e + e**p

    # remainder constant fitted over active levels; threshold from 1/2 c_hat = C g(eps)
    C_rem = max((max(r["remainder_normalized"], 0.0) / g(r["eps"]) for r in active if r["eps"] > 0), default=0.0)
    if C_rem > 0 and c_hat > 0:
        eps_hat = float(brentq(lambda e: C_rem * g(e) - 0.5 * c_hat, 0.0, 1e6))
    elif c_hat > 0:
        eps_hat = math.inf
    else:
        eps_hat = 0.0
    small = [r for r in rows if r["eps"] < eps_hat]
    mechanism = all(r["energy_diff"] <= 1e-12 * max(abs(E_prev), 1.0) for r in small)
    resolved = [r for r in rows if 2.0 ** -r["n"] * R >= rho.grid.max_width]
    checks = {
        "split_identity": split_ok,
        "no_increase_below_threshold": mechanism,
    }
    return VerifyRecord(
        statement=statement,
        inputs={"params": params.as_dict(), "mass": m, "R": R, "n_max": n_max, "cells": rho.grid.M},
        measured={
            "levels": rows,
            "checks": checks,
            "asymmetry": A,
            "asymmetry_shift": shift,
            "all_frozen": all(r["frozen"] for r in resolved),
        },
        fit={"c_hat": c_hat, "C_remainder": C_rem, "eps_threshold": eps_hat, "max_split_error": split_err},
        budget=SPLIT_TOL,
        verdict=combine(PASS if ok else FAIL for ok in checks.values()),
    )
