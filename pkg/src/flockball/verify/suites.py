"""Statement registry: map a statement id to the suite that checks it."""
from __future__ import annotations

from typing import Callable

from ..density import RadialGrid, make_profile
from ..errors import ConfigError
from ..geometry import ball_volume
from ..radial_kernel import KernelParams
from ..solver import SolverOptions, minimize
from .bounds import potential_bounds_suite
from .competitor import competitor_suite
from .dyadic import dyadic_accounting
from .el import check_el_ball
from .gaps import coulomb_standard_suite, gap_suite, shell_deficit_suite, shell_potential_suite
from .records import VerifyRecord
from .scaling import R_LADDER, scaling_study

DEFAULT_PARAMS = KernelParams(3, 2.0, 1.0)
EL_LADDER = (1.0, 2.0, 4.0, 10.0)
FAILURE_LADDER = (1.0, 10.0, 100.0)
FAILURE_LAMBDA = 2.5
DYADIC_R = 16.0

ALIASES = {
    "christcor2": "attractive-gap",
    "christcor1": "repulsive-gap",
    "christcor1rev": "shell-deficit",
    "coulombimproved": "shell-potential",
    "coulombstandard": "coulomb-standard",
    "phialphalambda": "el-ball",
    "failure": "el-failure",
    "step1": "scaling",
    "diameter": "scaling",
    "main": "scaling",
    "step2": "dyadic",
    "phi": "potential-bounds",
    "phirem": "potential-bounds",
}


def _attractive(params, seed, cells, extra):
    return [gap_suite("attractive", params, seed, cells)]


def _repulsive(params, seed, cells, extra):
    return [gap_suite("repulsive", params, seed, cells)]


def _shell_deficit(params, seed, cells, extra):
    return [shell_deficit_suite(params, cells=cells)]


def _shell_potential(params, seed, cells, extra):
    return [shell_potential_suite(params.lam, params.N, cells=cells)]


def _coulomb_standard(params, seed, cells, extra):
    return [coulomb_standard_suite(params.lam, params.N, seed, cells=cells)]


def _el_ball(params, seed, cells, extra):
    ladder = extra.get("R_ladder", EL_LADDER if params.energy_regime else FAILURE_LADDER)
    return [check_el_ball(params, ladder)]


def _el_failure(params, seed, cells, extra):
    lam = float(extra.get("failure_lambda", FAILURE_LAMBDA))
    p = KernelParams(params.N, params.alpha, lam)
    return [check_el_ball(p, extra.get("R_ladder", FAILURE_LADDER), statement="el-failure")]


def _scaling(params, seed, cells, extra):
    options = extra.get("options", SolverOptions())
    return [scaling_study(params, extra.get("R_ladder", R_LADDER), cells, options=options)]


def _competitor(params, seed, cells, extra):
    return [competitor_suite(seed, cells=cells, N=params.N)]


def _dyadic(params, seed, cells, extra):
    R = float(extra.get("R", DYADIC_R))
    grid = RadialGrid.uniform(2.5 * R, cells, params.N)
    rep = minimize(params, ball_volume(R, params.N), grid, SolverOptions(polish=True))
    minimizer = dyadic_accounting(rep.profile, params, statement="dyadic-minimizer")
    minimizer.measured["solver"] = rep.summary()
    unit = RadialGrid.uniform(2.5, cells, params.N)
    b = (0.5**params.N + 1.0) ** (1.0 / params.N)
    annulus = dyadic_accounting(make_profile("annulus", unit, a=0.5, b=b), params, statement="dyadic-annulus")
    return [minimizer, annulus]


def _bounds(params, seed, cells, extra):
    return [potential_bounds_suite(params.N)]


STATEMENTS: dict[str, Callable] = {
    "attractive-gap": _attractive,
    "repulsive-gap": _repulsive,
    "shell-deficit": _shell_deficit,
    "shell-potential": _shell_potential,
    "coulomb-standard": _coulomb_standard,
    "el-ball": _el_ball,
    "el-failure": _el_failure,
    "scaling": _scaling,
    "competitor": _competitor,
    "dyadic": _dyadic,
    "potential-bounds": _bounds,
}


def resolve_statement(statement: str) -> str:
    key = statement.strip().lower()
    key = ALIASES.get(key, key)
    if key not in STATEMENTS:
        known = sorted(set(STATEMENTS) | set(ALIASES))
        raise ConfigError(f"unknown statement {statement!r}; known: {', '.join(known)}", field="statement")
    return key


def run_statement(statement: str, params: KernelParams = DEFAULT_PARAMS, seed: int = 1, cells: int = 1024,
                  **extra) -> list[VerifyRecord]:
    """Run the suite for ``statement`` (an id or alias) and return its records."""
    key = resolve_statement(statement)
    return STATEMENTS[key](params, seed, cells, extra)
