"""Command line entry point.

    render --manifest <path> --out <image> [--report <path>]

Renders the bundle's trajectory files into a stacked multi-panel figure.
With --report, the bundle's conditions file is additionally rendered to a
markdown table at the given path.  Exit 0 on success, 2 for any missing or
malformed input (message on stderr names the file).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import InputError
from .loading import load_manifest, load_report_json
from .render import build_spec, render_trajectories, save_figure
from .report import render_report


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(
        prog="render",
        description="Render an sdhopfield bundle into a trajectory figure.")
    ap.add_argument("--manifest", required=True, help="bundle manifest JSON")
    ap.add_argument("--out", required=True, help="output image path")
    ap.add_argument("--report", default=None,
                    help="also write the conditions table to this path")
    args = ap.parse_args(argv)
    try:
        spec = build_spec(args.manifest, args.out)
        fig = render_trajectories(spec)
        save_figure(fig, spec.output_image)
        print(f"{spec.output_image}: {len(spec.panels)} panels")
        if args.report is not None:
            doc = load_manifest(args.manifest)
            name = doc.get("conditions")
            if name is None:
                raise InputError(
                    f"manifest {args.manifest} names no conditions file")
            table = render_report(
                load_report_json(Path(args.manifest).parent / name))
            Path(args.report).write_text(table)
            print(args.report)
        return 0
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
