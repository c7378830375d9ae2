"""Command-line harness: heuristic runs, starter sweeps, oracle statistics, model dumps.

Exit codes: 0 success, 1 invalid config/scenario, 2 unknown algorithm,
3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .assembly import simultaneous_closure, simultaneous_oracle, state_snapshot
from .config import ConfigError, ScenarioConfig, load_config
from .heuristics import (
    POLICY_NAMES,
    RunResult,
    Scenario,
    UnknownPolicyError,
    best_starter,
    run_heuristic,
    sweep_starters,
)
from .solver import NumericalError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_UNKNOWN_ALGO = 2
EXIT_NUMERICAL = 3


def _fmt(value: float) -> str:
    """17 significant digits: enough for exact float round-trips."""
    return format(float(value), ".17g")


def _stats_row(stats, loss_value: float) -> list[str]:
    return [
        _fmt(stats.gap_mean),
        _fmt(stats.gap_var),
        _fmt(stats.gap_std),
        _fmt(stats.force_mean),
        _fmt(stats.force_var),
        _fmt(loss_value),
    ]


def write_trace_csv(path: Path, result: RunResult) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "step",
                "action_kind",
                "hole",
                "gap_mean",
                "gap_var",
                "gap_std",
                "force_mean",
                "force_var",
                "loss",
            ]
        )
        for t in result.trace:
            kind = t.action.kind if t.action else ""
            hole = str(t.action.hole) if t.action else ""
            writer.writerow([str(t.step), kind, hole] + _stats_row(t.stats, t.loss))


def write_wide_csv(path: Path, result: RunResult) -> None:
    n = len(result.trace[0].gaps)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["step"]
            + [f"gap_{i:02d}" for i in range(n)]
            + [f"force_{i:02d}" for i in range(n)]
        )
        for t in result.trace:
            writer.writerow(
                [str(t.step)] + [_fmt(g) for g in t.gaps] + [_fmt(f) for f in t.forces]
            )


def _stats_dict(stats) -> dict:
    return {
        "gap_mean": stats.gap_mean,
        "gap_var": stats.gap_var,
        "gap_std": stats.gap_std,
        "force_mean": stats.force_mean,
        "force_var": stats.force_var,
    }


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def write_summary_json(path: Path, algo: str, scenario: Scenario, result: RunResult, oracle) -> None:
    _write_json(
        path,
        {
            "schema_version": 1,
            "algo": algo,
            "scenario": {
                "holes": list(scenario.holes),
                "start": scenario.start,
                "max_actions": scenario.max_actions,
            },
            "sequence": [{"kind": a.kind, "hole": a.hole} for a in result.sequence],
            "actions_used": result.actions_used,
            "converged": result.converged,
            "final": {**_stats_dict(result.trace[-1].stats), "loss": result.final_loss},
            "oracle": _stats_dict(oracle),
        },
    )


def _resolve_out_dir(args, config: ScenarioConfig) -> Path:
    out = args.out if args.out is not None else config.out_dir
    if out is None:
        raise ConfigError("no output directory: pass --out or set 'out_dir' in the config")
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def cmd_run(args) -> int:
    config = load_config(args.config)
    if args.algo not in POLICY_NAMES:
        raise UnknownPolicyError(
            f"unknown algorithm {args.algo!r}; expected one of {', '.join(POLICY_NAMES)}"
        )
    try:
        scenario = config.scenario(start=args.start, max_actions=args.max_actions)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    out_dir = _resolve_out_dir(args, config)

    model = config.build_model()
    result = run_heuristic(model, scenario, args.algo, config.k_f)
    oracle = simultaneous_oracle(model, scenario.holes)

    write_trace_csv(out_dir / "trace.csv", result)
    write_wide_csv(out_dir / "wide.csv", result)
    write_summary_json(out_dir / "summary.json", args.algo, scenario, result, oracle)
    _write_json(out_dir / "final_state.json", state_snapshot(result.final_state))
    if not args.no_plots:
        from . import plots

        plots.render_run_figures(result.trace, out_dir)
    return EXIT_OK


def cmd_sweep_starters(args) -> int:
    config = load_config(args.config)
    scenario = config.scenario()
    out_dir = _resolve_out_dir(args, config)

    model = config.build_model()
    rows = sweep_starters(model, scenario, config.k_f)
    winner, winner_result = best_starter(model, scenario, config.k_f)

    with open(out_dir / "starters.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["starter", "gap_mean", "gap_var", "loss"])
        for hole, result in rows:
            final = result.trace[-1].stats
            writer.writerow(
                [str(hole), _fmt(final.gap_mean), _fmt(final.gap_var), _fmt(result.final_loss)]
            )
    _write_json(
        out_dir / "best_starter.json",
        {
            "schema_version": 1,
            "starter": winner,
            "final_loss": winner_result.final_loss,
            "actions_used": winner_result.actions_used,
            "converged": winner_result.converged,
            "sequence": [{"kind": a.kind, "hole": a.hole} for a in winner_result.sequence],
        },
    )
    if not args.no_plots:
        from . import plots

        plots.render_starter_figure(rows, out_dir)
    return EXIT_OK


def cmd_oracle(args) -> int:
    config = load_config(args.config)
    scenario = config.scenario()
    out_dir = _resolve_out_dir(args, config)

    model = config.build_model()
    stats = simultaneous_oracle(model, scenario.holes)
    _write_json(
        out_dir / "oracle.json",
        {
            "schema_version": 1,
            "holes": list(scenario.sorted_holes),
            **_stats_dict(stats),
        },
    )
    if not args.no_plots:
        from . import plots

        gaps = model.initial_gaps - simultaneous_closure(model, scenario.holes)
        plots.render_oracle_figure(model.layout, gaps, scenario.sorted_holes, out_dir)
    return EXIT_OK


def cmd_model_dump(args) -> int:
    config = load_config(args.config)
    config.scenario()  # a model dump still requires a coherent config
    out_dir = _resolve_out_dir(args, config)

    model = config.build_model()
    with open(out_dir / "Kc.csv", "w", newline="", encoding="utf-8") as fh:
        for row in model.stiffness:
            fh.write(",".join(_fmt(v) for v in row) + "\n")
    with open(out_dir / "layout.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["index", "x", "y", "block"])
        for hole in model.layout.holes:
            writer.writerow([str(hole.index), _fmt(hole.x), _fmt(hole.y), str(hole.block)])
    if not args.no_plots:
        from . import plots

        plots.render_layout_figure(model.layout, out_dir)
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("config", help="scenario config file (JSON)")
    parser.add_argument("--out", default=None, help="output directory (default: config out_dir)")
    parser.add_argument("--no-plots", action="store_true", help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="clampseq",
        description="Simulate fastener installation sequencing on a two-plate joint.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one sequencing algorithm and write its trace")
    _add_common(p_run)
    p_run.add_argument("--algo", required=True, help=f"one of: {', '.join(POLICY_NAMES)}")
    p_run.add_argument("--start", type=int, default=None, help="override the starter hole")
    p_run.add_argument(
        "--max-actions", type=int, default=None, dest="max_actions", help="override the action cap"
    )
    p_run.set_defaults(handler=cmd_run)

    p_sweep = sub.add_parser("sweep-starters", help="gap-gradient run per candidate starter hole")
    _add_common(p_sweep)
    p_sweep.set_defaults(handler=cmd_sweep_starters)

    p_oracle = sub.add_parser("oracle", help="simultaneous-installation reference statistics")
    _add_common(p_oracle)
    p_oracle.set_defaults(handler=cmd_oracle)

    p_dump = sub.add_parser("model-dump", help="dump the reduced stiffness matrix and layout")
    _add_common(p_dump)
    p_dump.set_defaults(handler=cmd_model_dump)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except UnknownPolicyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_ALGO
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
