"""Command-line entry point: solve, certify, sweep, emit-plot.

Runs are driven by a declarative JSON config; a few flags override the
config for quick parameter studies. All angles in the config are in
units of pi (so "0.25" means pi/4). Result, sweep and plot files carry
versioned schema tags (arcfit/result-v1, arcfit/sweep-v1,
arcfit/plot-v1).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from datetime import datetime, timezone

import numpy as np

from .arcs import ArcSystem, ConstraintGrid, FrequencyMap, build_constraint_grid
from .certify import certify
from .dual import SolveOptions, maximize_dual, monomial_matrix
from .ingest import SyntheticCase, generate_synthetic, load_measurements
from .moments import (
    gram_closed_form,
    gram_from_samples,
    moments_from_samples,
)
from .sweep import ProblemSetup, sweep_m, sweep_n

RESULT_SCHEMA = "arcfit/result-v1"
PLOT_SCHEMA = "arcfit/plot-v1"


class InputError(Exception):
    """Config or data problem; maps to exit code 1."""


def _require(config: dict, key: str):
    if key not in config:
        raise InputError(f"config missing required key {key!r}")
    return config[key]


def _complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1])
    return complex(v)


def load_config(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc


def arcs_from_config(config: dict) -> ArcSystem:
    pairs = _require(config, "arcs_i_pi")
    try:
        return ArcSystem(tuple((a * np.pi, b * np.pi) for a, b in pairs))
    except (TypeError, ValueError) as exc:
        raise InputError(f"bad arcs_i_pi: {exc}") from exc


def data_from_config(config: dict, arcs: ArcSystem):
    spec = _require(config, "data")
    kind = _require(spec, "kind")
    if kind == "synthetic":
        params = dict(spec.get("params", {}))
        if "value" in params:
            params["value"] = _complex(params["value"])
        if "coefficients" in params:
            params["coefficients"] = [_complex(c) for c in params["coefficients"]]
        if "zeros" in params:
            params["zeros"] = [_complex(z) for z in params["zeros"]]
        case = SyntheticCase(kind=_require(spec, "case"), params=params)
        return generate_synthetic(case, arcs, float(spec.get("density", 50.0)))
    if kind == "file":
        fm = _require(spec, "freq_map")
        fmap = FrequencyMap(
            f_lo=float(_require(fm, "f_lo")),
            f_hi=float(_require(fm, "f_hi")),
            theta_lo=float(_require(fm, "theta_lo_pi")) * np.pi,
            theta_hi=float(_require(fm, "theta_hi_pi")) * np.pi,
        )
        return load_measurements(_require(spec, "path"), fmap)
    raise InputError(f"unknown data kind {kind!r}")


def expand_bound(bound, grid: ConstraintGrid):
    """Scalar bound, or one bound per J component expanded to grid points."""
    if np.isscalar(bound):
        return float(bound)
    bound = list(bound)
    if len(bound) != len(grid.components):
        raise InputError(
            f"bound list length {len(bound)} != number of J components "
            f"{len(grid.components)}"
        )
    return np.concatenate(
        [np.full(size, float(r)) for r, size in zip(bound, grid.sizes)]
    )


def _solve_from_config(config: dict):
    arcs = arcs_from_config(config)
    data = data_from_config(config, arcs)
    n = int(_require(config, "degree"))
    m = int(_require(config, "grid"))
    problem_tol = float(config.get("tol", 1e-8))
    max_iter = int(config.get("max_iter", 500))
    if data.has_unit_weights:
        G = gram_closed_form(arcs, n)
    else:
        G = gram_from_samples(data, arcs, n)
    mom = moments_from_samples(data, arcs, n)
    grid = build_constraint_grid(arcs, m)
    rho = expand_bound(config.get("bound", 1.0), grid)
    result = maximize_dual(
        G, mom, grid, rho, SolveOptions(tol=problem_tol, max_iter=max_iter)
    )
    cert = certify(result.coefficients, result.multipliers, G, mom, grid, rho)
    return arcs, data, G, mom, grid, rho, result, cert


def _result_document(config, grid, rho, result, cert, runtime: float) -> dict:
    return {
        "schema": RESULT_SCHEMA,
        "parameters": {
            "arcs_i_pi": config["arcs_i_pi"],
            "degree": int(config["degree"]),
            "grid": int(config["grid"]),
            "bound": config.get("bound", 1.0),
            "tol": float(config.get("tol", 1e-8)),
            "max_iter": int(config.get("max_iter", 500)),
            "data": config["data"],
        },
        "coefficients": [[c.real, c.imag] for c in result.coefficients],
        "multipliers": list(map(float, result.multipliers)),
        "grid_points": list(map(float, grid.points)),
        "misfit": result.misfit,
        "dual_value": result.dual_value,
        "duality_gap": result.duality_gap,
        "iterations": result.iterations,
        "status": result.status,
        "norm_f_sq": result.norm_f_sq,
        "certificate": cert.to_dict(),
        "timing": {
            "runtime_seconds": runtime,
            "timestamp": datetime.now(timezone.utc).isoformat(),
        },
    }


def _write_json(path, document) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(document, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_solve(config: dict, out_path) -> int:
    start = time.perf_counter()
    _, _, _, _, grid, rho, result, cert = _solve_from_config(config)
    doc = _result_document(config, grid, rho, result, cert, time.perf_counter() - start)
    _write_json(out_path, doc)
    print(
        f"status={result.status} verdict={cert.verdict} misfit={result.misfit:.6e} "
        f"iterations={result.iterations} -> {out_path}"
    )
    return 0 if cert.verdict in ("certified", "grid_feasible_only") else 2


def _load_result(path) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read result {path}: {exc}") from exc
    if doc.get("schema") != RESULT_SCHEMA:
        raise InputError(
            f"result schema mismatch: expected {RESULT_SCHEMA}, got {doc.get('schema')!r}"
        )
    for key in ("coefficients", "multipliers", "parameters"):
        if key not in doc:
            raise InputError(f"result file missing {key!r}")
    return doc


def cmd_certify(result_path, config: dict | None = None) -> int:
    doc = _load_result(result_path)
    params = dict(doc["parameters"])
    if config is not None:
        params["data"] = config.get("data", params.get("data"))
    arcs = arcs_from_config(params)
    data = data_from_config(params, arcs)
    n = int(params["degree"])
    if data.has_unit_weights:
        G = gram_closed_form(arcs, n)
    else:
        G = gram_from_samples(data, arcs, n)
    mom = moments_from_samples(data, arcs, n)
    grid = build_constraint_grid(arcs, int(params["grid"]))
    rho = expand_bound(params.get("bound", 1.0), grid)
    c = np.array([complex(re, im) for re, im in doc["coefficients"]])
    lam = np.asarray(doc["multipliers"], dtype=float)
    if c.size != n + 1 or lam.size != len(grid):
        raise InputError("stored coefficients/multipliers do not match parameters")
    cert = certify(c, lam, G, mom, grid, rho)
    print(json.dumps(cert.to_dict(), indent=2, sort_keys=True))
    return 0 if cert.verdict != "failed" else 2


def cmd_sweep(config: dict, out_base, jobs: int) -> int:
    spec = _require(config, "sweep")
    arcs = arcs_from_config(config)
    data = data_from_config(config, arcs)
    rho = config.get("bound", 1.0)
    if not np.isscalar(rho):
        raise InputError("sweeps support scalar bounds only")
    problem = ProblemSetup(arcs=arcs, data=data, rho=float(rho))
    opts = SolveOptions(
        tol=float(config.get("tol", 1e-8)), max_iter=int(config.get("max_iter", 500))
    )
    mode = _require(spec, "mode")
    if mode == "m":
        report = sweep_m(problem, int(_require(spec, "n")), _require(spec, "values"),
                         opts=opts, jobs=jobs)
    elif mode == "n":
        coupling = float(spec.get("coupling", 2.0))
        report = sweep_n(problem, _require(spec, "values"),
                         m_rule=lambda n: int(round(coupling * n)), opts=opts, jobs=jobs)
    else:
        raise InputError(f"unknown sweep mode {mode!r}")
    report.write_json(f"{out_base}.json")
    report.write_csv(f"{out_base}.csv")
    print(f"sweep mode={mode} cells={len(report.cells)} -> {out_base}.json, {out_base}.csv")
    return 0


def cmd_emit_plot(result_path, config: dict, out_path, samples: int = 2048) -> int:
    doc = _load_result(result_path)
    params = dict(doc["parameters"])
    arcs = arcs_from_config(params)
    data = data_from_config(params if config is None else config, arcs)
    c = np.array([complex(re, im) for re, im in doc["coefficients"]])
    theta = np.linspace(0.0, 2.0 * np.pi, samples, endpoint=False)
    modulus = np.abs(monomial_matrix(theta, c.size - 1) @ c)
    plot_doc = {
        "schema": PLOT_SCHEMA,
        "theta": list(map(float, theta)),
        "modulus": list(map(float, modulus)),
        "overlay_theta": list(map(float, data.angles)),
        "overlay_modulus": list(map(float, np.abs(data.values))),
        "arcs_i": [list(a) for a in arcs.arcs_i],
        "rho": params.get("bound", 1.0),
    }
    _write_json(out_path, plot_doc)
    print(f"plot data -> {out_path}")
    return 0


def _apply_overrides(config: dict, args) -> dict:
    config = dict(config)
    if args.degree is not None:
        config["degree"] = args.degree
    if args.grid is not None:
        config["grid"] = args.grid
    if args.bound is not None:
        config["bound"] = args.bound
    if args.tol is not None:
        config["tol"] = args.tol
    return config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arcfit",
        description="Constrained polynomial approximation on circle arcs",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", required=True, help="JSON config file")
        p.add_argument("--degree", type=int, help="override polynomial degree n")
        p.add_argument("--grid", type=int, help="override constraint grid resolution m")
        p.add_argument("--bound", type=float, help="override constraint bound rho")
        p.add_argument("--tol", type=float, help="override KKT tolerance")
        p.add_argument("--out", help="output path (overrides config 'out')")

    p_solve = sub.add_parser("solve", help="solve one instance and certify it")
    add_common(p_solve)

    p_cert = sub.add_parser("certify", help="re-certify a stored result")
    p_cert.add_argument("result", help="result JSON from 'solve'")
    p_cert.add_argument("--config", help="optional config overriding the data source")

    p_sweep = sub.add_parser("sweep", help="run an n- or m-convergence sweep")
    add_common(p_sweep)
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel sweep cells")

    p_plot = sub.add_parser("emit-plot", help="emit plot-data JSON for a stored result")
    p_plot.add_argument("result", help="result JSON from 'solve'")
    add_common(p_plot)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "solve":
            config = _apply_overrides(load_config(args.config), args)
            out = args.out or config.get("out", "result.json")
            return cmd_solve(config, out)
        if args.command == "certify":
            config = load_config(args.config) if args.config else None
            return cmd_certify(args.result, config)
        if args.command == "sweep":
            config = _apply_overrides(load_config(args.config), args)
            out = args.out or config.get("out", "sweep_report")
            return cmd_sweep(config, out, jobs=args.jobs)
        if args.command == "emit-plot":
            config = _apply_overrides(load_config(args.config), args)
            out = args.out or config.get("out", "plot.json")
            return cmd_emit_plot(args.result, config, out)
        raise AssertionError(args.command)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
