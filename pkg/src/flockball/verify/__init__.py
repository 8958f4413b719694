"""Empirical checks of the gap, potential and minimizer estimates."""
from .bounds import potential_bounds_suite
from .competitor import competitor_suite
from .dyadic import dyadic_accounting
from .el import check_el_ball
from .gaps import (
    check_attractive_gap,
    check_repulsive_gap,
    check_shell_deficit,
    check_shell_potential_bound,
    coulomb_standard_suite,
    gap_suite,
    shell_deficit_suite,
    shell_potential_suite,
)
from .records import FAIL, INCONCLUSIVE, PASS, VerifyRecord, combine, decide, exit_code
from .scaling import scaling_study
from .suites import ALIASES, STATEMENTS, resolve_statement, run_statement

__all__ = [
    "ALIASES",
    "FAIL",
    "INCONCLUSIVE",
    "PASS",
    "STATEMENTS",
    "VerifyRecord",
    "check_attractive_gap",
    "check_el_ball",
    "check_repulsive_gap",
    "check_shell_deficit",
    "check_shell_potential_bound",
    "combine",
    "competitor_suite",
    "coulomb_standard_suite",
    "decide",
    "dyadic_accounting",
    "exit_code",
    "gap_suite",
    "potential_bounds_suite",
    "resolve_statement",
    "run_statement",
    "scaling_study",
    "shell_deficit_suite",
    "shell_potential_suite",
]
