"""Seeded test family of radial profiles around the unit ball."""
from __future__ import annotations

import numpy as np

from ..density import SHELL_PATTERNS, RadialGrid, RadialProfile, make_profile

FAMILY_SIZE = 200


def family_grid(N: int = 3, cells: int = 1024, r_max: float = 2.5) -> RadialGrid:
    return RadialGrid.uniform(r_max, cells, N)


def annulus_ladder(grid: RadialGrid, count: int = 40, lo: float = 0.05, hi: float = 0.95):
    """Annuli ``a < r < b`` with ``b^N - a^N = 1`` (unit-ball volume)."""
    N = grid.N
    out = []
    for a in np.linspace(lo, hi, count):
        b = (1.0 + a**N) ** (1.0 / N)
        out.append((f"annulus(a={a:.4f})", make_profile("annulus", grid, a=float(a), b=float(b))))
    return out


def shell_family(grid: RadialGrid, thetas=None):
    if thetas is None:
        thetas = np.geomspace(0.02, 0.5, 10)
    out = []
    for pattern in SHELL_PATTERNS:
        for th in thetas:
            prof = make_profile("shell_perturbed_ball", grid, R=1.0, theta=float(th), pattern=pattern)
            out.append((f"{pattern}(theta={th:.4f})", prof))
    return out


def random_perturbations(grid: RadialGrid, count: int, rng: np.random.Generator):
    """Ball with a random bounded perturbation inside a random shell."""
    out = []
    c = grid.centers
    for k in range(count):
        w_in = rng.uniform(0.02, 0.5)
        w_out = rng.uniform(0.02, 0.5)
        vals = (c < 1.0 - w_in).astype(float)
        shell = (c >= 1.0 - w_in) & (c < 1.0 + w_out)
        n_knots = int(rng.integers(2, 12))
        knots = np.linspace(1.0 - w_in, 1.0 + w_out, n_knots)
        # decreasing-on-average random profile through the shell
        base = np.linspace(1.0, 0.0, n_knots)
        noise = rng.uniform(-0.5, 0.5, n_knots)
        vals[shell] = np.clip(np.interp(c[shell], knots, base + noise), 0.0, 1.0)
        out.append((f"perturbed#{k}", RadialProfile(grid, vals)))
    return out


def random_profiles(grid: RadialGrid, count: int, rng: np.random.Generator, r_cap: float = 1.5):
    """Generic bounded profiles with random piecewise-linear values on ``[0, r_cap]``."""
    out = []
    c = grid.centers
    for k in range(count):
        n_knots = int(rng.integers(3, 16))
        knots = np.sort(rng.uniform(0.0, r_cap, n_knots))
        y = rng.uniform(0.0, 1.0, n_knots)
        vals = np.where(c < knots[-1], np.interp(c, knots, y), 0.0)
        if vals.max() <= 0:
            vals[0] = 1.0
        out.append((f"random#{k}", RadialProfile(grid, np.clip(vals, 0.0, 1.0))))
    return out


def profile_family(seed: int, grid: RadialGrid | None = None, size: int = FAMILY_SIZE):
    """The fixed 200-member family: annuli ladder, shell patterns, perturbations, random."""
    grid = grid or family_grid()
    rng = np.random.default_rng(seed)
    fam = annulus_ladder(grid) + shell_family(grid)
    n_rand = 20
    fam += random_perturbations(grid, max(size - len(fam) - n_rand, 0), rng)
    fam += random_profiles(grid, n_rand, rng)
    return fam[:size]
