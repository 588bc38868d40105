"""Batch convergence studies, trace/log files and Table-style accuracy metrics.

A batch run sweeps seeds base_seed..base_seed+n-1 over one scenario,
writes one trace CSV, one event-log JSONL and one final-state JSON per
run, plus a combined plot-data CSV and a report.json. Runs are
embarrassingly parallel in principle; files are written by this single
aggregator so outputs are byte-stable.
"""

from __future__ import annotations

import csv
import json
import statistics
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .energy import GoalSpec
from .planner import PlannerConfig
from .poses import Pose, wrap_angle
from .scenario import Scenario
from .sim import EventLog, LossTrace, RunResult, WorldState, run

#: A run counts as converged when its final normalized total loss is
#: below this share of the initial loss.
CONVERGENCE_THRESHOLD = 0.05


@dataclass
class RunSummary:
    seed: int
    converged: bool
    steps: int
    final_normalized_loss: float
    max_boundary_violation: float


@dataclass
class BatchReport:
    """Aggregate of a seed sweep: counts plus per-run rows."""

    scenario: str
    runs: int
    converged: int
    steps_min: int
    steps_median: float
    steps_max: int
    final_loss_min: float
    final_loss_median: float
    final_loss_max: float
    per_run: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "runs": self.runs,
            "converged": self.converged,
            "steps": {"min": self.steps_min, "median": self.steps_median,
                      "max": self.steps_max},
            "final_loss": {"min": self.final_loss_min,
                           "median": self.final_loss_median,
                           "max": self.final_loss_max},
            "per_run": [vars(r) for r in self.per_run],
        }


def run_batch(scenario: Scenario, n_runs: int, base_seed: int,
              out_dir: Optional[Path] = None,
              cfg: Optional[PlannerConfig] = None):
    """Run seeds base_seed..base_seed+n_runs-1; optionally write artifacts.

    Returns (BatchReport, list[RunResult]). Convergence per run means
    final normalized loss < 0.05.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    results = []
    summaries = []
    for k in range(n_runs):
        seed = base_seed + k
        result = run(scenario, seed, cfg)
        final_loss = result.trace.normalized_total[-1]
        summaries.append(RunSummary(
            seed=seed,
            converged=bool(final_loss < CONVERGENCE_THRESHOLD),
            steps=result.steps,
            final_normalized_loss=float(final_loss),
            max_boundary_violation=float(result.max_boundary_violation),
        ))
        results.append(result)
    steps = [s.steps for s in summaries]
    finals = [s.final_normalized_loss for s in summaries]
    report = BatchReport(
        scenario=scenario.name,
        runs=n_runs,
        converged=sum(s.converged for s in summaries),
        steps_min=min(steps),
        steps_median=float(statistics.median(steps)),
        steps_max=max(steps),
        final_loss_min=min(finals),
        final_loss_median=float(statistics.median(finals)),
        final_loss_max=max(finals),
        per_run=summaries,
    )
    if out_dir is not None:
        write_batch_artifacts(report, results, scenario, Path(out_dir))
    return report, results


def write_batch_artifacts(report: BatchReport, results, scenario: Scenario,
                          out_dir: Path):
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "traces").mkdir(exist_ok=True)
    (out_dir / "events").mkdir(exist_ok=True)
    (out_dir / "finals").mkdir(exist_ok=True)
    for summary, result in zip(report.per_run, results):
        tag = f"run_{summary.seed:06d}"
        write_trace_csv(result.trace, out_dir / "traces" / f"{tag}.csv")
        write_event_log(result.log, out_dir / "events" / f"{tag}.jsonl")
        write_final_state(result, scenario, out_dir / "finals" / f"{tag}.json")
    emit_plot_data([r.trace for r in results],
                   out_dir / "loss_curves.csv",
                   seeds=[s.seed for s in report.per_run])
    (out_dir / "report.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")


def write_trace_csv(trace: LossTrace, path: Path):
    """One row per step; floats via repr so parsing reconstructs them exactly."""
    n_comp = len(trace.per_component[0]) if trace.per_component else 0
    n_hands = len(trace.selected[0]) if trace.selected else 0
    header = (["step", "normalized_total_loss"]
              + [f"loss_c{j}" for j in range(n_comp)]
              + [f"selected_h{i}" for i in range(n_hands)])
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["# normalized" if trace.normalized else "# raw",
                         repr(trace.initial_total)])
        writer.writerow(header)
        for i, step in enumerate(trace.steps):
            row = [step, repr(trace.normalized_total[i])]
            row += [repr(v) for v in trace.per_component[i]]
            row += ["" if s is None else s for s in trace.selected[i]]
            writer.writerow(row)


def read_trace_csv(path: Path) -> LossTrace:
    trace = LossTrace()
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        flag = next(reader)
        trace.normalized = flag[0] == "# normalized"
        trace.initial_total = float(flag[1])
        header = next(reader)
        n_comp = sum(1 for h in header if h.startswith("loss_c"))
        for row in reader:
            trace.steps.append(int(row[0]))
            trace.normalized_total.append(float(row[1]))
            trace.per_component.append([float(v) for v in row[2:2 + n_comp]])
            trace.selected.append([None if s == "" else int(s)
                                   for s in row[2 + n_comp:]])
    return trace


def write_event_log(log: EventLog, path: Path):
    with open(path, "w") as fh:
        for record in log.to_dicts():
            fh.write(json.dumps(record, sort_keys=True) + "\n")


def read_event_log(path: Path) -> list:
    with open(path) as fh:
        return [json.loads(line) for line in fh if line.strip()]


def write_final_state(result: RunResult, scenario: Scenario, path: Path):
    world = result.final
    doc = {
        "seed": world.rng_seed,
        "converged": result.converged,
        "steps": result.steps,
        "hands": [_pose_dict(p) for p in world.hands],
        "components": [_pose_dict(p) for p in world.components],
        "goals": [_pose_dict(c.goal) for c in scenario.components],
    }
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _pose_dict(p: Pose) -> dict:
    return {"p": [repr(v) for v in p.position.tolist()],
            "r": [repr(v) for v in p.angles.tolist()]}


def _pose_from_dict(d: dict) -> Pose:
    return Pose([float(v) for v in d["p"]], [float(v) for v in d["r"]])


def emit_plot_data(traces, path: Path, seeds=None):
    """Combined CSV (run, step, normalized_loss) for external plotting."""
    if not traces:
        raise ValueError("emit_plot_data needs at least one trace")
    if seeds is None:
        seeds = list(range(len(traces)))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["run", "step", "normalized_loss"])
        for seed, trace in zip(seeds, traces):
            for step, loss in zip(trace.steps, trace.normalized_total):
                writer.writerow([seed, step, repr(loss)])


def read_plot_data(path: Path) -> dict:
    """Parse an emit_plot_data CSV back into {run: [(step, loss), ...]}."""
    curves: dict = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        next(reader)
        for run_id, step, loss in reader:
            curves.setdefault(int(run_id), []).append(
                (int(step), float(loss)))
    return curves


@dataclass
class AccuracySummary:
    """Signed final-pose errors in the table plane, Table-style schema.

    x/y in millimetres, yaw in degrees; one entry per component per run.
    """

    x_errors_mm: np.ndarray
    y_errors_mm: np.ndarray
    yaw_errors_deg: np.ndarray

    def row(self, values: np.ndarray) -> dict:
        return {
            "mean": float(np.mean(values)),
            "std": float(np.std(values)),
            "rmse": float(np.sqrt(np.mean(values ** 2))),
        }

    def to_dict(self) -> dict:
        return {
            "X_mm": self.row(self.x_errors_mm),
            "Y_mm": self.row(self.y_errors_mm),
            "yaw_deg": self.row(self.yaw_errors_deg),
            "count": int(self.x_errors_mm.size),
        }

    def table(self) -> str:
        d = self.to_dict()
        lines = [f"{'':<12}{'X (mm)':>12}{'Y (mm)':>12}{'yaw (deg)':>12}"]
        lines.append(
            f"{'Mean ± Std.':<12}"
            f"{d['X_mm']['mean']:>6.2f} ± {d['X_mm']['std']:<5.2f}"
            f"{d['Y_mm']['mean']:>6.2f} ± {d['Y_mm']['std']:<5.2f}"
            f"{d['yaw_deg']['mean']:>6.2f} ± {d['yaw_deg']['std']:<5.2f}")
        lines.append(
            f"{'RMSE':<12}{d['X_mm']['rmse']:>12.2f}"
            f"{d['Y_mm']['rmse']:>12.2f}{d['yaw_deg']['rmse']:>12.2f}")
        lines.append(f"(n = {d['count']} component placements)")
        return "\n".join(lines)


def report_accuracy(final_worlds, goals: GoalSpec) -> AccuracySummary:
    """Signed per-component errors of final worlds against the goal poses."""
    if not final_worlds:
        raise ValueError("report_accuracy needs at least one final world")
    xs, ys, yaws = [], [], []
    targets = goals.targets
    for world in final_worlds:
        for comp, target in zip(world.components, targets):
            xs.append((comp.position[0] - target.position[0]) * 1000.0)
            ys.append((comp.position[1] - target.position[1]) * 1000.0)
            target_yaw = np.arctan2(target.trig[4], target.trig[5])
            yaws.append(np.degrees(wrap_angle(comp.angles[2] - target_yaw)))
    return AccuracySummary(
        x_errors_mm=np.asarray(xs),
        y_errors_mm=np.asarray(ys),
        yaw_errors_deg=np.asarray(yaws),
    )


def write_accuracy_csv(summary: AccuracySummary, path: Path):
    d = summary.to_dict()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "mean", "std", "rmse"])
        for key in ("X_mm", "Y_mm", "yaw_deg"):
            writer.writerow([key, repr(d[key]["mean"]), repr(d[key]["std"]),
                             repr(d[key]["rmse"])])


def load_final_worlds(finals_dir: Path):
    """Rehydrate final component poses written by write_final_state."""
    worlds = []
    for path in sorted(Path(finals_dir).glob("run_*.json")):
        doc = json.loads(path.read_text())
        worlds.append(WorldState(
            step=doc["steps"],
            hands=tuple(_pose_from_dict(p) for p in doc["hands"]),
            components=tuple(_pose_from_dict(p) for p in doc["components"]),
            attach=(None,) * len(doc["hands"]),
            grasps=(None,) * len(doc["hands"]),
            rng_seed=doc["seed"],
        ))
    return worlds
