"""Command-line front end.

Subcommands: potential, minimize, scaling, verify, el-check, competitor.
Every run writes CSV tables and one JSON report into ``--out``; both carry
the SHA-256 of the effective configuration, so identical inputs give
byte-identical files.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import json
import math
import sys
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from . import __version__
from .density import RadialGrid, competitor, make_profile, save_profile
from .errors import ConfigError, FlockballError, SurfaceDivergence
from .geometry import ball_volume
from .quadrature import QuadratureSpec
from .radial_kernel import (
    KernelParams,
    ball_potential,
    ball_potential_derivative,
    combined_ball_potential,
    combined_ball_potential_derivative,
)
from .solver import SolverOptions, minimize
from .verify import (
    check_el_ball,
    dyadic_accounting,
    exit_code,
    resolve_statement,
    run_statement,
    scaling_study,
)
from .verify.records import EXIT_CODES, PASS, _clean, combine

SCHEMA = 1
COMMANDS = ("potential", "minimize", "scaling", "verify", "el-check", "competitor")
RANDOMIZED = {"attractive-gap", "repulsive-gap", "coulomb-standard", "competitor"}

DEFAULTS: dict[str, Any] = {
    "params": {"N": 3, "alpha": 2.0, "lambda": 1.0},
    "grid": {"cells": 1024, "r_max_factor": 2.5},
    "R": 1.0,
    "solver": {
        "tau": 0.5,
        "max_iters": 500,
        "el_tol": 1e-6,
        "energy_backtrack": True,
        "init": "annulus",
        "init_params": {},
        "method": "bathtub",
        "polish": False,
    },
    "quadrature": {
        "nodes_per_cell": 6,
        "diagonal_refinement_levels": 24,
        "abs_tol": 1e-13,
        "rel_tol": 1e-10,
        "angular_nodes": 8,
        "angular_margin": 6,
    },
    "potential": {"r_min": 0.0, "r_max": 3.0, "points": 301},
    "ladder": [2.0, 4.0, 8.0, 16.0, 32.0],
    "el": {"R_ladder": [1.0, 2.0, 4.0, 10.0], "failure_lambda": 2.5, "failure_R_ladder": [1.0, 10.0, 100.0]},
    "competitor": {"profile": {"kind": "annulus", "a": 0.5}, "thetas": [1.0, 0.5, 0.25, 0.125]},
    "statement": None,
    "seed": None,
}


# ---------------------------------------------------------------------------
# configuration


def _merge(base: dict, override: dict, prefix: str = "") -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        name = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(f"unknown configuration key {name!r}", field=name)
        if isinstance(base[key], dict) and key not in ("init_params", "profile"):
            if not isinstance(val, dict):
                raise ConfigError(f"{name} must be a mapping", field=name)
            out[key] = _merge(base[key], val, prefix=f"{name}.")
        else:
            out[key] = copy.deepcopy(val)
    return out


def _number(cfg: dict, path: str, kind=float, positive: bool = False):
    cur: Any = cfg
    for part in path.split("."):
        cur = cur[part]
    if isinstance(cur, bool) or not isinstance(cur, (int, float)):
        raise ConfigError(f"{path} must be a number, got {cur!r}", field=path)
    if kind is int and int(cur) != cur:
        raise ConfigError(f"{path} must be an integer, got {cur!r}", field=path)
    val = kind(cur)
    if positive and not val > 0:
        raise ConfigError(f"{path} must be positive, got {cur!r}", field=path)
    return val


def _number_list(cfg: dict, path: str) -> list[float]:
    cur: Any = cfg
    for part in path.split("."):
        cur = cur[part]
    if not isinstance(cur, list) or not cur:
        raise ConfigError(f"{path} must be a non-empty list", field=path)
    for x in cur:
        if isinstance(x, bool) or not isinstance(x, (int, float)) or not x > 0:
            raise ConfigError(f"{path} entries must be positive numbers, got {x!r}", field=path)
    return [float(x) for x in cur]


def load_config(path: str | None, args: argparse.Namespace | None = None) -> dict:
    """Defaults, then the YAML file, then command-line overrides."""
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}", field="config") from exc
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"config is not valid YAML: {exc}", field="config") from exc
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError("config must be a mapping at top level", field="config")
        cfg = _merge(cfg, data)
    if args is not None:
        if args.seed is not None:
            cfg["seed"] = args.seed
        if args.cells is not None:
            cfg["grid"]["cells"] = args.cells
        if args.statement is not None:
            cfg["statement"] = args.statement
    validate(cfg)
    return cfg


def validate(cfg: dict) -> None:
    p = cfg["params"]
    if "lam" in p:
        raise ConfigError("use 'lambda', not 'lam'", field="params.lam")
    N = _number(cfg, "params.N", int, positive=True)
    _number(cfg, "params.alpha", positive=True)
    lam = _number(cfg, "params.lambda", positive=True)
    if not lam < N:
        raise ConfigError(f"params.lambda must lie in (0, N) = (0, {N}), got {lam!r}", field="params.lambda")
    try:
        KernelParams.from_mapping(p)
    except FlockballError as exc:
        raise ConfigError(str(exc), field="params") from exc
    _number(cfg, "grid.cells", int, positive=True)
    _number(cfg, "grid.r_max_factor", positive=True)
    _number(cfg, "R", positive=True)
    _number(cfg, "potential.r_max", positive=True)
    _number(cfg, "potential.points", int, positive=True)
    if _number(cfg, "potential.r_min") < 0:
        raise ConfigError("potential.r_min must be >= 0", field="potential.r_min")
    _number_list(cfg, "ladder")
    _number_list(cfg, "el.R_ladder")
    _number_list(cfg, "el.failure_R_ladder")
    _number_list(cfg, "competitor.thetas")
    if cfg["seed"] is not None:
        seed = cfg["seed"]
        if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}", field="seed")
    if cfg["statement"] is not None:
        resolve_statement(str(cfg["statement"]))
    try:
        solver_options(cfg)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), field="solver") from exc
    try:
        quadrature(cfg)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), field="quadrature") from exc


def params_of(cfg: dict) -> KernelParams:
    return KernelParams.from_mapping(cfg["params"])


def solver_options(cfg: dict) -> SolverOptions:
    s = cfg["solver"]
    for key in ("tau", "el_tol"):
        _number(cfg, f"solver.{key}", positive=True)
    _number(cfg, "solver.max_iters", int)
    if not isinstance(s["init_params"], dict):
        raise ConfigError("solver.init_params must be a mapping", field="solver.init_params")
    try:
        return SolverOptions(
            tau=float(s["tau"]),
            max_iters=int(s["max_iters"]),
            el_tol=float(s["el_tol"]),
            energy_backtrack=bool(s["energy_backtrack"]),
            init=str(s["init"]),
            init_params=dict(s["init_params"]),
            method=str(s["method"]),
            polish=bool(s["polish"]),
        )
    except FlockballError as exc:
        raise ConfigError(str(exc), field="solver") from exc


def quadrature(cfg: dict) -> QuadratureSpec:
    q = cfg["quadrature"]
    return QuadratureSpec(
        nodes_per_cell=int(q["nodes_per_cell"]),
        diagonal_refinement_levels=int(q["diagonal_refinement_levels"]),
        abs_tol=float(q["abs_tol"]),
        rel_tol=float(q["rel_tol"]),
        angular_nodes=int(q["angular_nodes"]),
        angular_margin=int(q["angular_margin"]),
    )


def config_hash(cfg: dict) -> str:
    canon = json.dumps(_clean(cfg), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()


# ---------------------------------------------------------------------------
# output


def _fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return "%.12g" % x
    return str(x)


class Output:
    """Writes the CSV tables and JSON report of one run."""

    def __init__(self, out_dir: str, command: str, cfg: dict):
        self.dir = Path(out_dir)
        self.dir.mkdir(parents=True, exist_ok=True)
        self.command = command
        self.cfg = cfg
        self.hash = config_hash(cfg)
        self.files: list[str] = []

    def header(self, grid: str, budget) -> list[str]:
        p = self.cfg["params"]
        return [
            f"flockball {__version__} {self.command}",
            f"config_sha256: {self.hash}",
            f"params: N={p['N']} alpha={_fmt(float(p['alpha']))} lambda={_fmt(float(p['lambda']))}",
            f"grid: {grid}",
            f"budget: {_fmt(budget) if budget is not None else 'none'}",
        ]

    def table(self, name: str, columns: list[str], rows, grid: str = "none", budget=None) -> Path:
        path = self.dir / name
        with open(path, "w", newline="") as fh:
            for line in self.header(grid, budget):
                fh.write(f"# {line}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for row in rows:
                w.writerow([_fmt(x) for x in row])
        self.files.append(name)
        return path

    def report(self, name: str, body: dict) -> Path:
        path = self.dir / name
        doc = {
            "schema": SCHEMA,
            "command": self.command,
            "version": __version__,
            "config_sha256": self.hash,
            "config": self.cfg,
            "files": sorted(self.files),
            **body,
        }
        with open(path, "w") as fh:
            json.dump(_clean(doc), fh, sort_keys=True, indent=2)
            fh.write("\n")
        return path


def _grid_label(cells: int, r_max: float) -> str:
    return f"cells={cells} r_max={_fmt(r_max)} h={_fmt(r_max / cells)}"


# ---------------------------------------------------------------------------
# subcommands


def _safe_derivative(mu, r, N, quad):
    try:
        return np.asarray(ball_potential_derivative(mu, r, N, quad), dtype=float)
    except SurfaceDivergence:
        out = np.empty(np.size(r))
        for i, x in enumerate(np.ravel(r)):
            try:
                out[i] = ball_potential_derivative(mu, float(x), N, quad)
            except SurfaceDivergence as exc:
                out[i] = exc.sign * math.inf
        return out


def cmd_potential(cfg: dict, out: Output) -> int:
    params, quad = params_of(cfg), quadrature(cfg)
    N, a, lam = params.N, params.alpha, params.lam
    R = float(cfg["R"])
    pc = cfg["potential"]
    r = np.linspace(float(pc["r_min"]), float(pc["r_max"]), int(pc["points"]))
    phi_a = ball_potential(a, r, N, quad)
    phi_l = ball_potential(-lam, r, N, quad)
    Phi = combined_ball_potential(params, R, r, quad)
    d_a = _safe_derivative(a, r, N, quad)
    d_l = _safe_derivative(-lam, r, N, quad)
    x = r / R
    d_la = _safe_derivative(-lam, x, N, quad)
    dPhi = R ** (N + a - 1) * _safe_derivative(a, x, N, quad) + R ** (N - lam - 1) * d_la
    cols = ["r", "phi_alpha", "phi_lambda", "Phi", "dphi_alpha", "dphi_lambda", "dPhi"]
    rows = zip(r, phi_a, phi_l, Phi, d_a, d_l, dPhi)
    out.table("potential.csv", cols, rows, grid=f"points={len(r)} r_min={_fmt(r[0])} r_max={_fmt(r[-1])}")
    center = float(ball_potential(-lam, 0.0, N, quad))
    out.report(
        "potential.json",
        {"R": R, "phi_lambda_at_0": center, "phi_alpha_at_0": float(ball_potential(a, 0.0, N, quad)), "exit_code": 0},
    )
    return 0


def cmd_minimize(cfg: dict, out: Output) -> int:
    params, quad, options = params_of(cfg), quadrature(cfg), solver_options(cfg)
    R = float(cfg["R"])
    cells = int(cfg["grid"]["cells"])
    r_max = float(cfg["grid"]["r_max_factor"]) * R
    grid = RadialGrid.uniform(r_max, cells, params.N)
    m = ball_volume(R, params.N)
    rep = minimize(params, m, grid, options, quad)
    from .density import asymmetry

    A, shift = asymmetry(rep.profile)
    budget = 2.0 * grid.max_width / R
    label = _grid_label(cells, r_max)
    taus = [math.nan] + list(rep.taus)
    trace = [
        (k, e, res, mu, taus[k] if k < len(taus) else math.nan)
        for k, (e, res, mu) in enumerate(zip(rep.energies, rep.residuals, rep.multipliers))
    ]
    out.table("trace.csv", ["iteration", "energy", "el_residual", "multiplier", "tau"], trace, label, budget)
    prof = rep.profile
    out.table(
        "profile.csv",
        ["r_left", "r_right", "r_center", "rho"],
        zip(grid.edges[:-1], grid.edges[1:], grid.centers, prof.values),
        label,
        budget,
    )
    save_profile(out.dir / "profile.txt", prof, params.alpha, params.lam)
    out.files.append("profile.txt")
    code = EXIT_CODES[PASS] if rep.converged else 2
    out.report(
        "minimize.json",
        {
            "report": rep.summary(),
            "energy_monotone": rep.energy_monotone(),
            "breakdown": rep.breakdown.as_dict() if rep.breakdown else None,
            "asymmetry": A,
            "asymmetry_shift": shift,
            "asymmetry_budget": budget,
            "support_radius": prof.support_radius(),
            "exit_code": code,
        },
    )
    return code


def _record_table(out: Output, name: str, records, grid: str) -> None:
    rows = []
    for rec in records:
        r = rec.row()
        rows.append([r["statement"], r["verdict"], r["budget"], r["fit"], r["inputs"]])
    budget = max((rec.budget for rec in records), default=None)
    out.table(name, ["statement", "verdict", "budget", "fit", "inputs"], rows, grid, budget)


def _records_report(out: Output, name: str, records) -> int:
    code = exit_code(rec.verdict for rec in records)
    out.report(
        name,
        {
            "records": [rec.as_dict() for rec in records],
            "verdict": combine(rec.verdict for rec in records),
            "exit_code": code,
        },
    )
    return code


def cmd_scaling(cfg: dict, out: Output) -> int:
    params, quad, options = params_of(cfg), quadrature(cfg), solver_options(cfg)
    cells = int(cfg["grid"]["cells"])
    factor = float(cfg["grid"]["r_max_factor"])
    rec = scaling_study(params, cfg["ladder"], cells, factor, options, quad)
    cols = ["R", "m", "h", "converged", "iterations", "el_residual", "A", "A_bound", "support_ratio", "shell_width", "floor"]
    rows = [[row[c] for c in cols] for row in rec.measured["per_R"]]
    out.table("scaling.csv", cols, rows, f"cells={cells} r_max={_fmt(factor)}*R", rec.budget)
    return _records_report(out, "scaling.json", [rec])


def cmd_verify(cfg: dict, out: Output) -> int:
    if cfg["statement"] is None:
        raise ConfigError("verify needs a statement id (--statement or 'statement:')", field="statement")
    key = resolve_statement(str(cfg["statement"]))
    if key in RANDOMIZED and cfg["seed"] is None:
        raise ConfigError(f"statement {key!r} is randomized and needs a seed", field="seed")
    seed = int(cfg["seed"]) if cfg["seed"] is not None else 0
    cells = int(cfg["grid"]["cells"])
    records = run_statement(key, params_of(cfg), seed, cells)
    _record_table(out, f"verify_{key}.csv", records, f"cells={cells}")
    return _records_report(out, f"verify_{key}.json", records)


def cmd_el_check(cfg: dict, out: Output) -> int:
    params = params_of(cfg)
    el = cfg["el"]
    records = []
    if params.energy_regime:
        records.append(check_el_ball(params, el["R_ladder"]))
    fail_params = KernelParams(params.N, params.alpha, float(el["failure_lambda"]))
    records.append(check_el_ball(fail_params, el["failure_R_ladder"], statement="el-failure"))
    rows = []
    for rec in records:
        lam = rec.inputs["params"]["lambda"]
        for row in rec.measured["per_R"]:
            rows.append(
                [
                    rec.statement,
                    lam,
                    row["R"],
                    row.get("holds", ""),
                    row.get("c_hat", math.nan),
                    row.get("detected", ""),
                    row.get("delta", math.nan),
                ]
            )
    cols = ["statement", "lambda", "R", "sign_pattern_holds", "c_hat", "violation_detected", "delta"]
    out.table("el_check.csv", cols, rows, "r-samples per record inputs", 0.0)
    return _records_report(out, "el_check.json", records)


def cmd_competitor(cfg: dict, out: Output) -> int:
    params, quad = params_of(cfg), quadrature(cfg)
    N = params.N
    cells = int(cfg["grid"]["cells"])
    r_max = float(cfg["grid"]["r_max_factor"])
    grid = RadialGrid.uniform(r_max, cells, N)
    spec = dict(cfg["competitor"]["profile"])
    kind = spec.pop("kind", "annulus")
    if kind == "annulus":
        a = float(spec.get("a", 0.5))
        spec.setdefault("b", (a**N + 1.0) ** (1.0 / N))
        spec["a"] = a
    try:
        rho = make_profile(kind, grid, **spec)
    except (FlockballError, TypeError, KeyError) as exc:
        raise ConfigError(f"cannot build competitor profile: {exc}", field="competitor.profile") from exc
    thetas = [float(t) for t in cfg["competitor"]["thetas"]]
    cols = ["r_center", "rho"] + [f"rho_theta_{_fmt(t)}" for t in thetas]
    outs = []
    summary = []
    for th in thetas:
        res = competitor(rho, th, detail=True)
        outs.append(res.profile.values)
        summary.append({"theta": th, "case": res.case, "m_i": res.m_i, "m_o": res.m_o, "cut_radius": res.cut_radius})
    rows = zip(grid.centers, rho.values, *outs)
    label = _grid_label(cells, r_max)
    out.table("competitor.csv", cols, rows, label)
    rec = dyadic_accounting(rho, params, quad=quad)
    lcols = ["n", "theta", "case", "eps", "moved_mass", "frozen", "energy_diff", "main", "remainder", "split_error"]
    out.table("dyadic.csv", lcols, [[lv[c] for c in lcols] for lv in rec.measured["levels"]], label, rec.budget)
    code = exit_code([rec.verdict])
    out.report(
        "competitor.json",
        {"competitor": summary, "records": [rec.as_dict()], "verdict": rec.verdict, "exit_code": code},
    )
    return code


HANDLERS = {
    "potential": cmd_potential,
    "minimize": cmd_minimize,
    "scaling": cmd_scaling,
    "verify": cmd_verify,
    "el-check": cmd_el_check,
    "competitor": cmd_competitor,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="flockball", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "potential": "tabulate ball potentials and derivatives",
        "minimize": "run one constrained minimization",
        "scaling": "minimizers along a mass ladder",
        "verify": "run the suite for one statement id",
        "el-check": "Euler-Lagrange sign pattern of ball potentials",
        "competitor": "shell competitor and dyadic accounting",
    }
    for name in COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--config", help="YAML configuration file")
        p.add_argument("--seed", type=int, help="RNG seed (required by randomized suites)")
        p.add_argument("--out", default=".", help="output directory (default: current)")
        p.add_argument("--statement", help="statement id for verify")
        p.add_argument("--cells", type=int, help="number of radial cells")
    return parser


def run(command: str, cfg: dict, out_dir: str) -> int:
    out = Output(out_dir, command, cfg)
    return HANDLERS[command](cfg, out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, args)
        return run(args.command, cfg, args.out)
    except ConfigError as exc:
        field = f" [{exc.field}]" if exc.field else ""
        print(f"flockball: config error{field}: {exc}", file=sys.stderr)
        return 1
    except FlockballError as exc:
        stmt = f" (statement {args.statement})" if getattr(args, "statement", None) else ""
        print(f"flockball {args.command}{stmt}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
