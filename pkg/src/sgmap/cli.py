"""Command line entry point: ``sgmap <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path

from .estimator import PenaltyConfig, estimate
from .lasso import GridSpec, oracle_tune
from .model import ObservationSet, SimScenario
from .rates import rate_sweep, sweep_csv
from .simulation import (
    EstimatorSpec,
    reproduce_table2,
    reproduce_table3,
    run_mse,
    table2_csv,
    table3_csv,
)

log = logging.getLogger("sgmap")


def _read_json(path_or_text: str):
    p = Path(path_or_text)
    if p.exists():
        return json.loads(p.read_text())
    return json.loads(path_or_text)


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_data(path: str) -> ObservationSet:
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        return ObservationSet.from_json(text)
    return ObservationSet.from_csv(text)


def _load_config(obj: dict, data: ObservationSet) -> PenaltyConfig:
    """Full ``PenaltyConfig`` dict, or a preset ``{"preset": "binomial"|"geometric", "gamma": ...}``."""
    if "between_prior" in obj:
        return PenaltyConfig.from_dict({"sigma": data.sigma, **obj})
    preset = obj.get("preset")
    gamma = float(obj["gamma"])
    sigma = float(obj.get("sigma", data.sigma))
    if preset == "binomial":
        return PenaltyConfig.binomial(data.m, data.n, gamma, sigma, xi0=obj.get("xi0"), xi=obj.get("xi"))
    if preset == "geometric":
        return PenaltyConfig.geometric(data.m, data.n, gamma, sigma, q0=obj.get("q0", 0.3), q=obj.get("q", 0.3))
    raise ValueError("config needs 'between_prior'/'within_priors' or a 'preset' of binomial|geometric")


def _load_estimator(text: str) -> EstimatorSpec:
    try:
        return EstimatorSpec.from_dict(_read_json(text))
    except (json.JSONDecodeError, TypeError):
        return EstimatorSpec.parse(text)


def _report_dict(r) -> dict:
    return {
        "gamma": r.gamma,
        "estimator": r.estimator.label,
        "mse": r.mse,
        "se": r.standard_error,
        "reps": r.replications,
        "seed": r.seed,
    }


def cmd_estimate(args):
    data = _load_data(args.data)
    config = _load_config(_read_json(args.config), data)
    _emit(estimate(data, config).to_json(), args.out)


def cmd_tune(args):
    scenario = SimScenario.from_dict(_read_json(args.scenario))
    scenario = scenario.with_(**{k: v for k, v in (("replications", args.reps), ("seed", args.seed)) if v is not None})
    grid = GridSpec.parse(args.grid) if args.grid else None
    result = oracle_tune(scenario, args.mode, grid)
    _emit(json.dumps(result.to_dict(), indent=2), args.out)
    surface = args.surface or (str(Path(args.out).with_suffix(".grid.csv")) if args.out else None)
    if surface:
        Path(surface).write_text(result.grid_csv())
        log.info("grid surface written to %s", surface)


def cmd_simulate(args):
    scenario = SimScenario.from_dict(_read_json(args.scenario))
    scenario = scenario.with_(**{k: v for k, v in (("replications", args.reps), ("seed", args.seed)) if v is not None})
    grid = GridSpec.parse(args.grid) if args.grid else None
    report = run_mse(scenario, _load_estimator(args.estimator), args.gamma, args.threads, grid)
    if args.format == "json":
        _emit(json.dumps(_report_dict(report), indent=2), args.out)
    else:
        _emit(table3_csv([report]), args.out)


def cmd_table3(args):
    grid = GridSpec.parse(args.grid) if args.grid else None
    reports = reproduce_table3(args.reps or 1000, args.seed or 0, args.threads, grid, args.tune_reps)
    if args.format == "json":
        _emit(json.dumps([_report_dict(r) for r in reports], indent=2), args.out)
    else:
        _emit(table3_csv(reports), args.out)


def cmd_table2(args):
    grid = GridSpec.parse(args.grid) if args.grid else None
    results = reproduce_table2(grid, args.reps or 1000, args.seed or 0)
    if args.format == "json":
        _emit(json.dumps([{"gamma": g, **r.to_dict()} for g, r in results], indent=2), args.out)
    else:
        _emit(table2_csv(results), args.out)


def cmd_rate_sweep(args):
    ns = [int(x) for x in args.n.split(",")]
    ms = [int(x) for x in args.m.split(",")]
    configs = []
    for n in ns:
        for m in ms:
            for m0 in sorted({1, max(1, m // 8), max(1, m // 2)}):
                configs.append((m, n, m0, n ** (-args.eta_power)))
    est = _load_estimator(args.estimator) if args.estimator else None
    rows = rate_sweep(configs, est, args.reps or 50, args.seed or 0, args.amplitude)
    if args.format == "json":
        _emit(json.dumps([{**asdict(r), "ratio": r.ratio} for r in rows], indent=2), args.out)
    else:
        _emit(sweep_csv(rows), args.out)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--reps", type=int, default=None)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output path (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--threads", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="sgmap", description="Sparse group MAP estimation and simulation harness.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", parents=[common], help="fit the MAP estimator to a data file")
    p.add_argument("--data", required=True, help="CSV or JSON observation file")
    p.add_argument("--config", required=True, help="JSON penalty config (file or inline)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("tune", parents=[common], help="oracle-tune the sparse group lasso")
    p.add_argument("--scenario", required=True)
    p.add_argument("--mode", choices=("semi", "full"), default="full")
    p.add_argument("--grid", default=None, help='e.g. "l1=0:20:0.1,l2=0:8:0.1"')
    p.add_argument("--surface", default=None, help="path for the grid CSV")
    p.set_defaults(func=cmd_tune)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo MSE of one estimator")
    p.add_argument("--scenario", required=True)
    p.add_argument("--estimator", required=True, help="JSON spec or label such as map-binomial")
    p.add_argument("--gamma", type=float, default=None)
    p.add_argument("--grid", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("table3", parents=[common], help="MSE table for the four estimators")
    p.add_argument("--grid", default=None)
    p.add_argument("--tune-reps", type=int, default=None)
    p.set_defaults(func=cmd_table3)

    p = sub.add_parser("table2", parents=[common], help="fully oracle lasso parameters")
    p.add_argument("--grid", default=None)
    p.set_defaults(func=cmd_table2)

    p = sub.add_parser("rate-sweep", parents=[common], help="empirical risk versus minimax rate")
    p.add_argument("--n", default="64,128,256,512")
    p.add_argument("--m", default="16,64")
    p.add_argument("--eta-power", type=float, default=0.5, help="radius eta = n^(-power)")
    p.add_argument("--amplitude", type=float, default=5.0)
    p.add_argument("--estimator", default=None)
    p.set_defaults(func=cmd_rate_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if args.threads < 1:
        raise SystemExit("--threads must be >= 1")
    args.func(args)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
