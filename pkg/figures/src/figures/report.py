"""Markdown table for a condition report.

Turns the simulator's conditions JSON into a two-column quantity/value table
with explicit pass/fail verdict rows.  Both Lipschitz variants of the
delayed-coupling constant appear side by side, with the one the criteria
actually used marked.  Missing fields are a schema error naming the field.
"""

from __future__ import annotations

from .errors import InputError

REQUIRED_FIELDS = (
    "rho", "gamma", "K0", "K1", "tau", "L_v", "L_v_seed", "L_v_horizon",
    "L_v_dt", "c0", "c1", "L_gtilde_numeric", "L_gtilde_difference",
    "L_gtilde_used", "use_difference_lgtilde", "lemma6_ok",
    "theorem6_value", "theorem6_ok", "T_B", "lambda_abs",
)


def _fmt(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def render_report(report: dict) -> str:
    """Markdown table summarizing the stability report."""
    missing = [k for k in REQUIRED_FIELDS if k not in report]
    if missing:
        raise InputError("report is missing field(s): " + ", ".join(missing))
    used = "difference" if report["use_difference_lgtilde"] else "numeric"
    lo, hi = report["L_v_horizon"]
    rows = [
        ("spectral abscissa rho", _fmt(report["rho"])),
        ("decay rate gamma", _fmt(report["gamma"])),
        ("K0", _fmt(report["K0"])),
        ("K1", _fmt(report["K1"])),
        ("max delay tau", _fmt(report["tau"])),
        ("flow bound L_v", _fmt(report["L_v"])
         + f" (seed {report['L_v_seed']}, window [{_fmt(float(lo))}, {_fmt(float(hi))}],"
         + f" dt {_fmt(report['L_v_dt'])})"),
        ("c0", _fmt(report["c0"])),
        ("c1", _fmt(report["c1"])),
        ("L_g~ numeric / difference",
         f"{_fmt(report['L_gtilde_numeric'])} / {_fmt(report['L_gtilde_difference'])}"
         + f" (used: {used})"),
        ("absorbing-set criterion", "pass" if report["lemma6_ok"] else "FAIL"),
        ("contraction criterion value", _fmt(report["theorem6_value"])),
        ("contraction criterion", "pass" if report["theorem6_ok"] else "FAIL"),
        ("threshold time T_B", _fmt(report["T_B"])),
        ("lambda_abs", _fmt(report["lambda_abs"])),
    ]
    width = max(len(name) for name, _ in rows)
    lines = [f"| {'quantity'.ljust(width)} | value |",
             f"| {'-' * width} | ----- |"]
    for name, value in rows:
        lines.append(f"| {name.ljust(width)} | {value} |")
    return "\n".join(lines) + "\n"
