"""Rendering for sdhopfield simulation bundles.

Consumes the CSV/JSON files named by a bundle manifest (the output of the
simulator's reproduce command) and produces a two-panel trajectory figure
plus a markdown condition-report table.  Strictly read-only over its inputs;
identical inputs render to identical bytes.
"""

from .errors import InputError
from .loading import load_manifest, load_trajectory_csv
from .render import FigureSpec, Panel, build_spec, render_trajectories, save_figure
from .report import render_report

__version__ = "0.1.0"
