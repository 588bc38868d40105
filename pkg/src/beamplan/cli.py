"""Command-line entry point.

Subcommands: run (single seeded run), batch (seed sweep with artifact
files), report (accuracy table + figures from a batch directory), serve
(live operator bridge). Exit codes: 0 success, 2 scenario/validation
error, 3 at least one run failed to converge.

Set BEAMPLAN_LOG=debug|info|warning to adjust verbosity.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import harness
from .scenario import ScenarioError, load_scenario
from .sim import run as run_sim

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NONCONVERGED = 3

log = logging.getLogger("beamplan")


def _configure_logging():
    level = os.environ.get("BEAMPLAN_LOG", "warning").upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(levelname)s %(name)s: %(message)s")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beamplan",
        description="decentralised gradient-based assembly planning toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one seeded simulation")
    p_run.add_argument("--scenario", required=True,
                       help="path or bundled name (ramp8, arrow4, handover, disassembly)")
    p_run.add_argument("--seed", type=int, required=True)
    p_run.add_argument("--max-steps", type=int, default=None)
    p_run.add_argument("--ts", type=float, default=None, help="step size t_s")
    p_run.add_argument("--out", type=Path, default=None,
                       help="directory for trace/events/final files")

    p_batch = sub.add_parser("batch", help="seeded convergence study")
    p_batch.add_argument("--scenario", required=True)
    p_batch.add_argument("--runs", type=int, default=50)
    p_batch.add_argument("--base-seed", type=int, default=0)
    p_batch.add_argument("--out", type=Path, required=True)

    p_report = sub.add_parser(
        "report", help="accuracy table and figures from a batch directory")
    p_report.add_argument("--in", dest="in_dir", type=Path, required=True)
    p_report.add_argument("--out", dest="out_dir", type=Path, default=None,
                          help="defaults to the input directory")

    p_serve = sub.add_parser("serve", help="live operator bridge (WebSocket)")
    p_serve.add_argument("--scenario", required=True)
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.add_argument("--port", type=int, required=True)
    p_serve.add_argument("--tick", type=float, default=30.0,
                         help="steps per second; 0 = as fast as possible")
    return parser


def _overridden_config(scenario, args):
    overrides = {}
    if getattr(args, "max_steps", None) is not None:
        overrides["max_steps"] = args.max_steps
    if getattr(args, "ts", None) is not None:
        overrides["t_s"] = args.ts
    return scenario.planner_config(**overrides) if overrides else None


def cmd_run(args) -> int:
    scenario = load_scenario(args.scenario)
    cfg = _overridden_config(scenario, args)
    result = run_sim(scenario, args.seed, cfg)
    final_loss = result.trace.normalized_total[-1]
    converged = final_loss < harness.CONVERGENCE_THRESHOLD
    print(f"{scenario.name} seed={args.seed}: "
          f"{'converged' if converged else 'NOT converged'} "
          f"after {result.steps} steps, final loss {final_loss:.4f}")
    if args.out is not None:
        args.out.mkdir(parents=True, exist_ok=True)
        harness.write_trace_csv(result.trace, args.out / "trace.csv")
        harness.write_event_log(result.log, args.out / "events.jsonl")
        harness.write_final_state(result, scenario, args.out / "final.json")
        print(f"artifacts written to {args.out}")
    return EXIT_OK if converged else EXIT_NONCONVERGED


def cmd_batch(args) -> int:
    scenario = load_scenario(args.scenario)
    report, _ = harness.run_batch(scenario, args.runs, args.base_seed,
                                  out_dir=args.out)
    print(f"{scenario.name}: {report.converged}/{report.runs} converged, "
          f"steps {report.steps_min}/{report.steps_median}/{report.steps_max} "
          f"(min/median/max), artifacts in {args.out}")
    return EXIT_OK if report.converged == report.runs else EXIT_NONCONVERGED


def cmd_report(args) -> int:
    from . import figures  # matplotlib import deferred to the report path

    in_dir: Path = args.in_dir
    out_dir: Path = args.out_dir or in_dir
    report_path = in_dir / "report.json"
    if not report_path.exists():
        raise ScenarioError(f"{in_dir} does not look like a batch directory "
                            f"(missing report.json)")
    out_dir.mkdir(parents=True, exist_ok=True)
    report = json.loads(report_path.read_text())
    print(f"scenario {report['scenario']}: "
          f"{report['converged']}/{report['runs']} converged")

    curves = harness.read_plot_data(in_dir / "loss_curves.csv")
    figures.render_loss_curves(curves, out_dir / "loss_curves.png")

    worlds = harness.load_final_worlds(in_dir / "finals")
    goal_doc = json.loads(
        sorted((in_dir / "finals").glob("run_*.json"))[0].read_text())
    from .energy import GoalSpec
    from .poses import embed

    goals = GoalSpec(targets=tuple(
        embed(harness._pose_from_dict(g)) for g in goal_doc["goals"]))
    summary = harness.report_accuracy(worlds, goals)
    print(summary.table())
    harness.write_accuracy_csv(summary, out_dir / "accuracy_summary.csv")
    figures.render_error_distributions(summary, out_dir / "final_errors.png")
    print(f"report artifacts written to {out_dir}")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .bridge import serve  # websockets import deferred to the serve path

    scenario = load_scenario(args.scenario)
    serve(scenario, args.seed, args.port, tick_hz=args.tick)
    return EXIT_OK


def main(argv=None) -> int:
    _configure_logging()
    args = _build_parser().parse_args(argv)
    handlers = {"run": cmd_run, "batch": cmd_batch,
                "report": cmd_report, "serve": cmd_serve}
    try:
        return handlers[args.command](args)
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
