"""Randomized checks of the bathtub filling and the shell competitor."""
from __future__ import annotations

import numpy as np

from ..density import BallSpec, bathtub_fill, competitor, competitor_properties
from .family import family_grid, random_perturbations, random_profiles
from .records import FAIL, PASS, VerifyRecord, combine

MASS_TOL = 1e-10
BATHTUB_TOL = 1e-12
QUAD_SLACK = 1e-9


def bathtub_trials(seed: int, count: int = 100, cells: int = 1024, N: int = 3) -> list[dict]:
    """Bathtub filling of random potentials at random target masses."""
    rng = np.random.default_rng(seed)
    grid = family_grid(N, cells)
    out = []
    for _ in range(count):
        kind = int(rng.integers(3))
        if kind == 0:
            psi = rng.normal(size=grid.M)
        elif kind == 1:
            psi = np.cumsum(rng.uniform(0.0, 1.0, grid.M))
        else:
            # plateaus create ties
            psi = np.round(rng.uniform(0.0, 4.0, grid.M))
        m = float(rng.uniform(0.01, 0.99)) * grid.capacity
        prof, _ = bathtub_fill(psi, m, grid)
        v = prof.values
        out.append(
            {
                "mass_error": abs(prof.mass - m) / m,
                "fractional_cells": int(np.sum((v > 0) & (v < 1))),
            }
        )
    return out


def competitor_trials(seed: int, count: int = 100, cells: int = 1024, N: int = 3) -> list[dict]:
    """Competitor properties on random perturbations and random bounded profiles."""
    rng = np.random.default_rng(seed)
    grid = family_grid(N, cells)
    half = count // 2
    fam = random_perturbations(grid, half, rng) + random_profiles(grid, count - half, rng)
    out = []
    for name, rho in fam:
        theta = float(rng.uniform(0.02, 1.0))
        ball = BallSpec.from_mass(rho.mass, N)
        res = competitor(rho, theta, ball, detail=True)
        props = competitor_properties(rho, res, theta, ball.R)
        out.append({"profile": name, "theta": theta, "case": res.case, **props})
    return out


def competitor_suite(seed: int, count: int = 100, cells: int = 1024, N: int = 3,
                     statement: str = "competitor") -> VerifyRecord:
    bath = bathtub_trials(seed, count, cells, N)
    comp = competitor_trials(seed, count, cells, N)
    worst = {k: min(r[k] for r in comp) for k in
             ("mass", "shell_lower", "shell_upper", "inside_gain", "outside_loss", "distance", "far_change")}
    checks = {
        "bathtub_mass": max(r["mass_error"] for r in bath) <= BATHTUB_TOL,
        "bathtub_fractional": max(r["fractional_cells"] for r in bath) <= 1,
        "mass": worst["mass"] >= -MASS_TOL,
        "shell": worst["shell_lower"] >= 0.0 and worst["shell_upper"] >= 0.0,
        "inside_outside": worst["inside_gain"] >= 0.0 and worst["outside_loss"] >= 0.0,
        "distance": worst["distance"] >= -QUAD_SLACK,
        "far_change": worst["far_change"] >= -QUAD_SLACK,
    }
    return VerifyRecord(
        statement=statement,
        inputs={"seed": seed, "count": count, "cells": cells, "N": N},
        measured={
            "bathtub_max_mass_error": max(r["mass_error"] for r in bath),
            "bathtub_max_fractional": max(r["fractional_cells"] for r in bath),
            "worst_slack": worst,
            "cases": {c: sum(r["case"] == c for r in comp) for c in ("inner", "outer")},
            "checks": checks,
        },
        budget=QUAD_SLACK,
        verdict=combine(PASS if ok else FAIL for ok in checks.values()),
    )
