"""Matplotlib renderings of run traces, starter sweeps, oracle fields, and the layout."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 150


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=_DPI, bbox_inches="tight", metadata={"Software": "clampseq"})
    plt.close(fig)


def render_run_figures(trace, out_dir: Path) -> list[Path]:
    """trace.png (statistics vs step) and gaps.png (per-hole gap trajectories)."""
    steps = [t.step for t in trace]

    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(8, 9))
    axes[0].plot(steps, [t.stats.gap_mean for t in trace], label="gap mean")
    axes[0].plot(steps, [t.stats.gap_std for t in trace], label="gap std")
    axes[0].set_ylabel("gap [mm]")
    axes[0].legend()
    axes[1].plot(steps, [t.stats.force_mean for t in trace], color="tab:red")
    axes[1].set_ylabel("force mean [N]")
    axes[2].plot(steps, [t.loss for t in trace], color="tab:green")
    axes[2].set_ylabel("loss")
    axes[2].set_xlabel("step")
    fig.suptitle("Run statistics per step")

    gaps = np.array([t.gaps for t in trace])
    fig2, ax2 = plt.subplots(figsize=(8, 5))
    ax2.plot(steps, gaps, color="tab:blue", alpha=0.25, linewidth=0.8)
    ax2.plot(steps, gaps.mean(axis=1), color="black", linewidth=2.0, label="mean")
    ax2.set_xlabel("step")
    ax2.set_ylabel("gap [mm]")
    ax2.legend()
    fig2.suptitle("Per-hole gaps per step")

    paths = [Path(out_dir) / "trace.png", Path(out_dir) / "gaps.png"]
    _save(fig, paths[0])
    _save(fig2, paths[1])
    return paths


def render_starter_figure(rows, out_dir: Path) -> Path:
    """Final loss / gap statistics versus the starter hole index."""
    starters = [h for h, _ in rows]
    fig, axes = plt.subplots(3, 1, sharex=True, figsize=(8, 9))
    axes[0].plot(starters, [r.trace[-1].stats.gap_mean for _, r in rows], marker="o")
    axes[0].set_ylabel("final gap mean [mm]")
    axes[1].plot(starters, [r.trace[-1].stats.gap_var for _, r in rows], marker="o")
    axes[1].set_ylabel("final gap var [mm^2]")
    axes[2].plot(starters, [r.final_loss for _, r in rows], marker="o")
    axes[2].set_ylabel("final loss")
    axes[2].set_xlabel("starter hole")
    fig.suptitle("Starter sweep")
    path = Path(out_dir) / "starters.png"
    _save(fig, path)
    return path


def render_oracle_figure(layout, oracle_gaps, scenario_holes, out_dir: Path) -> Path:
    """Gap field of the simultaneous installation, drawn on the hole layout."""
    pos = layout.positions()
    fig, ax = plt.subplots(figsize=(10, 2.5))
    sc = ax.scatter(pos[:, 0], pos[:, 1], c=oracle_gaps, cmap="coolwarm", s=80)
    for h in scenario_holes:
        ax.scatter([pos[h, 0]], [pos[h, 1]], facecolors="none", edgecolors="black", s=140)
    fig.colorbar(sc, ax=ax, label="gap [mm]")
    ax.set_xlabel("x [mm]")
    ax.set_ylabel("y [mm]")
    ax.set_title("Simultaneous-installation gap field (ringed = scenario holes)")
    path = Path(out_dir) / "oracle.png"
    _save(fig, path)
    return path


def render_layout_figure(layout, out_dir: Path) -> Path:
    """Hole positions colored by block, annotated with hole indices."""
    pos = layout.positions()
    blocks = [h.block for h in layout.holes]
    fig, ax = plt.subplots(figsize=(10, 2.5))
    ax.scatter(pos[:, 0], pos[:, 1], c=blocks, cmap="tab10", s=80)
    for h, (x, y) in zip(layout.holes, pos):
        ax.annotate(str(h.index), (x, y), textcoords="offset points", xytext=(0, 6), fontsize=7)
    ax.set_xlabel("x [mm]")
    ax.set_ylabel("y [mm]")
    ax.set_title("Hole layout (color = block)")
    path = Path(out_dir) / "layout.png"
    _save(fig, path)
    return path
