"""Command-line front end: ``pcap {classify,capacity,solve,compare,sweep}``.

Exit status: 0 success, 2 invalid input, 3 numerical failure, 4 an
indeterminate result under ``--strict``.
"""

import argparse
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import aoperator, criteria, radial
from .capacity import (
    annulus_capacity_closed_form,
    cutoff_upper_bound,
    global_capacity,
    numerical_capacity,
)
from .config import (
    ConfigError,
    config_call,
    build_function,
    build_mesh,
    build_operator,
    build_sequence,
    build_space,
    load_config,
    sweep_spaces,
)
from .errors import EvaluationFailure, IndeterminateError, NumericalError, ValidationError
from .serialize import format_float, validate_report, write_csv, write_json

COMMANDS = ("classify", "capacity", "solve", "compare", "sweep")
EXIT_OK, EXIT_INVALID, EXIT_NUMERICAL, EXIT_INDETERMINATE = 0, 2, 3, 4
DEFAULT_CHECK = {"samples": 2000, "dimension": None}


class Outcome:
    """Result of one command: report body, CSV tables, indeterminacy flag."""

    def __init__(self, result, tables=None, indeterminate=False, headline=""):
        self.result = result
        self.tables = tables or {}
        self.indeterminate = indeterminate
        self.headline = headline


def _envelope(command, seed, result):
    return {"version": 1, "command": command, "seed": int(seed), "result": result}


def operator_check(A, space, spec, seed):
    check = dict(DEFAULT_CHECK, **((spec or {}).get("check") or {}))
    dim = check["dimension"] or space.n
    cond = aoperator.validate_conditions(A, strict=False)
    struct = aoperator.structure_inequalities_check(A, n=dim, samples=check["samples"], seed=seed)
    return {
        "conditions_passed": cond["passed"],
        "empirical": cond["empirical"],
        "c1": struct["c1"],
        "c2": struct["c2"],
        "samples": int(check["samples"]),
        "dimension": int(dim),
        "seed": int(seed),
    }


def run_classify(cfg, seed):
    space = build_space(cfg["space"])
    block = cfg.get("classify") or {"pggb_strategy": "dyadic"}
    seq = None
    if "sequence" in block:
        seq = build_sequence(block["sequence"], "$.classify.sequence")
    elif block["pggb_strategy"] == "user":
        raise ConfigError("$.classify.sequence", "strategy 'user' needs a sequence")
    verdict = config_call("$.classify", criteria.classify, space, block["pggb_strategy"], seq)
    return Outcome(
        verdict.as_dict(),
        indeterminate=verdict.aggregate == criteria.INDETERMINATE,
        headline=f"{verdict.aggregate} consistent={str(verdict.consistent).lower()}",
    )


def run_capacity(cfg, seed):
    space = build_space(cfg["space"])
    block = cfg.get("capacity")
    if block is None:
        raise ConfigError("$.capacity", "capacity command needs a capacity block")
    R1 = float(block["R1"])
    mesh = build_mesh(block.get("mesh"))
    numerical = block.get("numerical", True)
    rows, csv_rows, tables = [], [], {}
    for i, R2 in enumerate(block["R2"]):
        path = f"$.capacity.R2[{i}]"
        cf = config_call(path, annulus_capacity_closed_form, space, R1, float(R2))
        bound = config_call(path, cutoff_upper_bound, space, R1, float(R2))
        row = {
            "R2": float(R2),
            "closed_form": cf.value,
            "closed_form_error": cf.error_estimate,
            "numerical": None,
            "numerical_error": None,
        }
        if numerical:
            est = numerical_capacity(space, R1, float(R2), mesh)
            row["numerical"] = est.value
            row["numerical_error"] = est.error_estimate
            row["numerical_info"] = {k: v for k, v in est.info.items() if k != "backend"}
            if block.get("export_minimizers", False):
                m = est.minimizer
                tables[f"minimizer_{i:03d}.csv"] = (
                    ["r", "v", "dv"], list(zip(m.grid.tolist(), m.values.tolist(), m.derivs.tolist()))
                )
        row["bound"] = bound.value
        rows.append(row)
        csv_rows.append([row["R2"], row["closed_form"], row["numerical"], row["bound"]])
    tables["capacity.csv"] = (["R2", "closed_form", "numerical", "bound"], csv_rows)
    try:
        g = global_capacity(space, R1)
        glob = {"classification": g.classification, "value": g.value, "error_estimate": g.error_estimate}
    except IndeterminateError:
        glob = {"classification": "indeterminate", "value": None}
    result = {"space": space.as_dict(), "R1": R1, "rows": rows, "global_capacity": glob}
    return Outcome(
        result, tables, indeterminate=glob["classification"] == "indeterminate",
        headline=f"closed_form[0]={format_float(rows[0]['closed_form'])}",
    )


def run_solve(cfg, seed):
    space = build_space(cfg["space"])
    A = build_operator(cfg.get("operator"), space)
    block = cfg.get("solve")
    if block is None:
        raise ConfigError("$.solve", "solve command needs a solve block")
    a, C = float(block["a"]), float(block["C"])
    u = config_call("$.solve", radial.radial_a_harmonic, space, A, a, C, float(block["r_max"]), int(block["N"]))
    res = radial.flux_residual(space, A, u, C)
    bounded = radial.solution_is_bounded(space, A, a, C)
    result = {
        "space": space.as_dict(),
        "operator": A.as_dict(),
        "a": a,
        "C": C,
        "r_max": float(block["r_max"]),
        "N": int(block["N"]),
        "tail_bound": u.meta["tail_bound"],
        "max_flux_residual": float(res.max()),
        "bounded": bounded,
        "operator_check": operator_check(A, space, cfg.get("operator"), seed),
    }
    rows = list(zip(u.grid.tolist(), u.values.tolist(), u.derivs.tolist(), res.tolist()))
    return Outcome(
        result, {"solution.csv": (["r", "u", "du", "flux_residual"], rows)},
        indeterminate=bounded is None, headline=f"u(r_max)={format_float(u.values[-1])}",
    )


def run_compare(cfg, seed):
    space = build_space(cfg["space"])
    A = build_operator(cfg.get("operator"), space)
    block = cfg.get("compare")
    if block is None:
        raise ConfigError("$.compare", "compare command needs a compare block")
    a = float(block["a"])
    u = build_function(block["u"], space, A, a, "$.compare.u")
    v = build_function(block["v"], space, A, a, "$.compare.v")
    seqs = None
    if "sequences" in block:
        seqs = [build_sequence(s, f"$.compare.sequences[{i}]") for i, s in enumerate(block["sequences"])]
    report = config_call("$.compare", radial.comparison_experiment, space, A, a, u, v, float(block["tol"]), seqs)
    result = {
        "space": space.as_dict(),
        "operator": A.as_dict(),
        "u": block["u"],
        "v": block["v"],
        "comparison": report.as_dict(),
        "operator_check": operator_check(A, space, cfg.get("operator"), seed),
    }
    return Outcome(result, headline=f"{report.outcome} margin={format_float(report.margin)}")


RUNNERS = {"classify": run_classify, "capacity": run_capacity, "solve": run_solve, "compare": run_compare}
REPORT_NAMES = {"classify": "verdict.json", "capacity": "capacity.json", "solve": "solution.json",
                "compare": "comparison.json"}


def _write_outcome(out_dir, command, seed, outcome, report_name=None):
    report = _envelope(command, seed, outcome.result)
    validate_report(report)
    os.makedirs(out_dir, exist_ok=True)
    name = report_name or REPORT_NAMES[command]
    write_json(os.path.join(out_dir, name), report)
    for fname, (header, rows) in outcome.tables.items():
        write_csv(os.path.join(out_dir, fname), header, rows)
    return name


def exit_code_for(exc):
    if isinstance(exc, ValidationError):
        return EXIT_INVALID
    if isinstance(exc, (NumericalError, EvaluationFailure)):
        return EXIT_NUMERICAL
    raise exc


def _cell_config(cfg, space_spec):
    cell = dict(cfg, space=space_spec)
    if "operator" in cfg:
        cell["operator"] = dict(cfg["operator"], p=space_spec["p"])
    return cell


def run_cell(args):
    """One sweep cell; returns ``(summary, outcome or None)``. Picklable for worker processes."""
    index, cfg, space_spec, command, seed = args
    label = f"{space_spec['profile']['kind']} n={space_spec['n']} p={format_float(space_spec['p'])}"
    summary = {"index": index, "space": label, "command": command}
    try:
        outcome = RUNNERS[command](_cell_config(cfg, space_spec), seed)
    except (ValidationError, NumericalError, EvaluationFailure) as exc:
        code = exit_code_for(exc)
        status = "validation_error" if code == EXIT_INVALID else "numerical_error"
        summary.update(status=status, exit_code=code, headline=str(exc))
        return summary, None
    status = "indeterminate" if outcome.indeterminate else "ok"
    summary.update(status=status, exit_code=EXIT_INDETERMINATE if outcome.indeterminate else EXIT_OK,
                   headline=outcome.headline)
    return summary, outcome


def run_sweep(cfg, seed, out_dir, jobs, strict):
    block = cfg.get("sweep")
    if block is None:
        raise ConfigError("$.sweep", "sweep command needs a sweep block")
    specs = sweep_spaces(block)
    for i, spec in enumerate(specs):
        build_space(spec, f"$.sweep.spaces[{i}]")
    tasks = [(len(block["commands"]) * i + j, cfg, spec, cmd, seed)
             for i, spec in enumerate(specs) for j, cmd in enumerate(block["commands"])]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(run_cell, tasks))
    else:
        results = [run_cell(t) for t in tasks]

    cells_dir = os.path.join(out_dir, "cells")
    cells = []
    for summary, outcome in results:
        name = None
        if outcome is not None:
            stem = f"cell_{summary['index']:03d}_{summary['command']}"
            sub = os.path.join(cells_dir, stem)
            name = os.path.join("cells", stem, _write_outcome(sub, summary["command"], seed, outcome))
        summary["report"] = name
        cells.append(summary)
    report = _envelope("sweep", seed, {"cells": cells})
    validate_report(report)
    os.makedirs(out_dir, exist_ok=True)
    write_json(os.path.join(out_dir, "summary.json"), report)
    write_csv(
        os.path.join(out_dir, "summary.csv"),
        ["index", "space", "command", "status", "exit_code", "headline", "report"],
        [[c["index"], c["space"], c["command"], c["status"], c["exit_code"], c["headline"], c["report"]]
         for c in cells],
    )
    codes = [c["exit_code"] for c in cells if c["exit_code"] != EXIT_INDETERMINATE or strict]
    return max(codes, default=EXIT_OK)


def build_parser():
    parser = argparse.ArgumentParser(prog="pcap", description="p-capacity and p-parabolicity experiments")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, metavar="PATH", help="experiment config (JSON)")
    parser.add_argument("--out", default=".", metavar="DIR", help="output directory")
    parser.add_argument("--jobs", type=int, default=1, metavar="N", help="worker processes for sweep")
    parser.add_argument("--strict", action="store_true", help="exit 4 on indeterminate results")
    parser.add_argument("--seed", type=int, default=None, metavar="N", help="seed (overrides the config)")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("pcap: error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        cfg = load_config(args.config)
        seed = args.seed if args.seed is not None else cfg.get("seed", 0)
        if args.command == "sweep":
            return run_sweep(cfg, seed, args.out, args.jobs, args.strict)
        outcome = RUNNERS[args.command](cfg, seed)
        _write_outcome(args.out, args.command, seed, outcome)
    except (ValidationError, NumericalError, EvaluationFailure) as exc:
        print(f"pcap: error: {args.config}: {exc}", file=sys.stderr)
        return exit_code_for(exc)
    if args.strict and outcome.indeterminate:
        print(f"pcap: indeterminate result ({outcome.headline})", file=sys.stderr)
        return EXIT_INDETERMINATE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
