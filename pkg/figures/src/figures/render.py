"""Two-panel trajectory figure from a bundle manifest.

One panel per listed trajectory, stacked and sharing the time axis; each
panel plots every component against time with a legend and carries the
trajectory's seed and initial data in its title.  Output bytes depend only
on the input files (fixed renderer settings, no timestamps).
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .errors import InputError
from .loading import load_manifest, load_trajectory_csv

PANEL_SIZE = (7.0, 2.8)
DPI = 150
# fixed text chunk so rerenders are byte-identical across library versions
PNG_METADATA = {"Software": "sdhopfield-figures"}


@dataclass(frozen=True)
class Panel:
    csv_path: Path
    title: str
    xlabel: str
    ylabel: str


@dataclass(frozen=True)
class FigureSpec:
    input_manifest: Path
    output_image: Path
    panels: tuple[Panel, ...]


def build_spec(manifest_path, output_image) -> FigureSpec:
    """Resolve a manifest into panel definitions, checking every CSV exists."""
    manifest_path = Path(manifest_path)
    doc = load_manifest(manifest_path)
    base = manifest_path.parent
    panels = []
    for entry in doc["trajectories"]:
        csv_path = base / entry["file"]
        if not csv_path.is_file():
            raise InputError(f"manifest references missing file {csv_path}")
        initial = ", ".join(f"{float(v):g}" for v in entry["initial"])
        title = f"{entry['label']}: u(0) = ({initial}), seed {entry['seed']}"
        panels.append(Panel(csv_path=csv_path, title=title,
                            xlabel="t", ylabel="u(t)"))
    return FigureSpec(input_manifest=manifest_path,
                      output_image=Path(output_image), panels=tuple(panels))


def render_trajectories(spec: FigureSpec):
    """Render the panels; returns the matplotlib figure (not yet saved)."""
    n_panels = len(spec.panels)
    fig, axes = plt.subplots(
        n_panels, 1, sharex=True,
        figsize=(PANEL_SIZE[0], PANEL_SIZE[1] * n_panels),
        constrained_layout=True)
    axes = np.atleast_1d(axes)
    for ax, panel in zip(axes, spec.panels):
        t, states = load_trajectory_csv(panel.csv_path)
        for j in range(states.shape[1]):
            ax.plot(t, states[:, j], lw=1.0, label=f"u_{j + 1}")
        ax.set_title(panel.title, fontsize=10)
        ax.set_ylabel(panel.ylabel)
        ax.axhline(0.0, color="0.7", lw=0.5, zorder=0)
        ax.legend(loc="upper right", fontsize=8)
    axes[-1].set_xlabel(spec.panels[-1].xlabel)
    return fig


def save_figure(fig, path) -> None:
    path = Path(path)
    kwargs = {"metadata": PNG_METADATA} if path.suffix.lower() == ".png" else {}
    try:
        fig.savefig(path, dpi=DPI, **kwargs)
    finally:
        plt.close(fig)
