"""Readers for the simulator's bundle files.

A manifest is a JSON object listing the bundle's files and per-trajectory
metadata.  Trajectory CSVs carry a ``t,u_1..u_n`` header and one float row
per grid node.  Everything is validated here so that rendering can assume
well-formed arrays, and every failure names the file it came from.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import InputError


def load_manifest(path) -> dict:
    """Parse and validate a bundle manifest."""
    path = Path(path)
    try:
        raw = path.read_text()
    except OSError as e:
        raise InputError(f"cannot read manifest {path}: {e}") from e
    try:
        doc = json.loads(raw)
    except json.JSONDecodeError as e:
        raise InputError(f"manifest {path} is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise InputError(f"manifest {path} must hold a JSON object")
    for key in ("files", "trajectories"):
        if key not in doc:
            raise InputError(f"manifest {path} is missing the {key!r} list")
    for i, entry in enumerate(doc["trajectories"]):
        for key in ("file", "seed", "initial", "label"):
            if key not in entry:
                raise InputError(
                    f"manifest {path}: trajectories[{i}] is missing {key!r}")
    if not doc["trajectories"]:
        raise InputError(f"manifest {path} lists no trajectories")
    return doc


def load_trajectory_csv(path) -> tuple[np.ndarray, np.ndarray]:
    """Read one trajectory file; returns (times, states) with states (rows, n)."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"cannot read trajectory {path}: {e}") from e
    lines = text.splitlines()
    if not lines:
        raise InputError(f"trajectory {path} is empty")
    header = lines[0].split(",")
    n = len(header) - 1
    if header[0] != "t" or n < 1 or header[1:] != [f"u_{j + 1}" for j in range(n)]:
        raise InputError(
            f"trajectory {path} has header {lines[0]!r}, expected t,u_1..u_n")
    if len(lines) < 2:
        raise InputError(f"trajectory {path} has no data rows")
    rows = np.empty((len(lines) - 1, n + 1))
    for i, line in enumerate(lines[1:], start=2):
        parts = line.split(",")
        if len(parts) != n + 1:
            raise InputError(
                f"trajectory {path} line {i}: expected {n + 1} columns, got {len(parts)}")
        try:
            rows[i - 2] = [float(x) for x in parts]
        except ValueError as e:
            raise InputError(f"trajectory {path} line {i}: {e}") from e
    if not np.all(np.isfinite(rows)):
        raise InputError(f"trajectory {path} contains non-finite values")
    return rows[:, 0], rows[:, 1:]


def load_report_json(path) -> dict:
    """Read a condition-report file into a plain dict."""
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as e:
        raise InputError(f"cannot read report {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise InputError(f"report {path} is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise InputError(f"report {path} must hold a JSON object")
    return doc
