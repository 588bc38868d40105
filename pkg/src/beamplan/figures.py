"""Figure rendering for the report path.

Only the `report` CLI subcommand imports this module; simulation and
batch runs never render in-process. Figures are written next to the
delimited outputs they visualise.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def render_loss_curves(curves: dict, path: Path):
    """Overlay the per-run normalized loss staircases, one line per run."""
    fig, ax = plt.subplots(figsize=(7, 4))
    for run_id in sorted(curves):
        steps, losses = zip(*curves[run_id])
        ax.plot(steps, losses, lw=0.8, alpha=0.6, color="tab:blue")
    ax.axhline(0.05, color="tab:red", ls="--", lw=0.8, label="convergence 0.05")
    ax.set_xlabel("step")
    ax.set_ylabel("normalized total goal loss")
    ax.set_title(f"goal loss, {len(curves)} runs")
    ax.set_ylim(bottom=0.0)
    ax.legend(loc="upper right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_error_distributions(summary, path: Path):
    """Violin plots of signed final-pose errors (x mm, y mm, yaw deg)."""
    fig, axes = plt.subplots(1, 3, figsize=(9, 3.2))
    series = [
        (summary.x_errors_mm, "X (mm)"),
        (summary.y_errors_mm, "Y (mm)"),
        (summary.yaw_errors_deg, "yaw (deg)"),
    ]
    for ax, (values, label) in zip(axes, series):
        if values.size:
            ax.violinplot(values, showmedians=True)
        ax.set_title(label, fontsize=10)
        ax.set_xticks([])
        ax.axhline(0.0, color="k", lw=0.5)
    fig.suptitle("final placement error", fontsize=11)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
