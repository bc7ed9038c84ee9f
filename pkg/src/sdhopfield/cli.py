"""Command line interface.

Subcommands (all write into the output directory given by --out, nowhere
else, and never seed from the clock):

* ``simulate``        one trajectory to trajectory.csv
* ``spectrum``        characteristic roots and decay constants to spectrum.json
* ``check``           full stability report to conditions.json
* ``pullback``        pullback endpoint diameters to pullback.csv
* ``cocycle``         composition residuals to cocycle.csv
* ``wongzakai``       interpolant-route gap table to wongzakai.csv
* ``reproduce-paper`` the built-in two-unit reference study: two trajectories,
  spectrum, condition report, pullback table, an assertion record, and a
  manifest naming all six files; exits 0 only if every assertion holds

Exit codes: 0 success, 2 configuration problem, 3 trajectory divergence,
4 analysis failure (empty spectrum, unstable linearization, degenerate flow,
failed bundle assertions).
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import attractor, conditions, spectral
from .errors import (AnalysisError, ConfigError, DivergenceError,
                     SimulationError)
from .integrator import (ROUTE_CONJUGATED, ROUTE_DIRECT, Trajectory,
                         integrate_conjugated, integrate_direct,
                         integrate_wong_zakai)
from .linearflow import build_flow
from .model import ActivationSpec, HistorySegment, NetworkParams
from .noise import sample_path

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_DIVERGENCE = 3
EXIT_ANALYSIS = 4


def _fmt(x: float) -> str:
    return repr(float(x))


def _as_matrix(value, n: int, name: str) -> np.ndarray:
    a = np.asarray(value, dtype=float)
    if a.ndim == 0:
        return np.diag(np.full(n, float(a)))
    if a.ndim == 1:
        if a.shape != (n,):
            raise ConfigError(f"{name}: diagonal list must have length {n}")
        return np.diag(a)
    if a.shape != (n, n):
        raise ConfigError(f"{name}: matrix must be {n} x {n}, got {a.shape}")
    return a


def _activation(cfg, n: int) -> ActivationSpec:
    if isinstance(cfg, str):
        cfg = {"kind": cfg}
    if not isinstance(cfg, dict):
        raise ConfigError(f"activation must be an object or a kind name, "
                          f"got {type(cfg).__name__}")
    kind = cfg.get("kind", "tanh")
    if kind == "tanh":
        return ActivationSpec.tanh(n)
    if kind == "custom-table":
        try:
            return ActivationSpec.from_table(
                n, cfg["xs"], cfg["f"], cfg["g"],
                lipschitz_f=cfg["lipschitz_f"], lipschitz_g=cfg["lipschitz_g"],
                bound=cfg["bound"], linear_part=cfg.get("linear_part"),
                lipschitz_g_tilde=cfg.get("lipschitz_g_tilde"))
        except KeyError as e:
            raise ConfigError(f"custom-table activation is missing key {e}") from e
    raise ConfigError(f"unknown activation kind {kind!r}")


@dataclass
class RunConfig:
    params: NetworkParams
    dt: float = 1e-3
    horizon: float = 5.0
    seed: int = 0
    route: str = ROUTE_DIRECT
    k: int | None = None
    initial_segments: list = field(default_factory=list)
    pullback_times: list = field(default_factory=list)
    pairs: list = field(default_factory=list)
    ks: list = field(default_factory=list)
    flow_horizon: tuple[float, float] = (-20.0, 20.0)
    use_difference_lgtilde: bool = False
    gamma_fraction: float = 0.9
    search_box: tuple[float, float, float] | None = None


def load_config(path: str) -> RunConfig:
    """Parse a config file; malformed JSON is reported with line and column."""
    try:
        raw = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        cfg = json.loads(raw)
    except json.JSONDecodeError as e:
        raise ConfigError(
            f"config {path} is not valid JSON: line {e.lineno} column {e.colno}: {e.msg}") from e
    if not isinstance(cfg, dict):
        raise ConfigError(f"config {path} must hold a JSON object at top level")
    return config_from_dict(cfg)


def config_from_dict(cfg: dict) -> RunConfig:
    p = cfg.get("params", cfg)
    try:
        n = int(p["n"])
    except KeyError:
        raise ConfigError("config needs params.n")
    delays = np.asarray(p.get("delays", 0.1), dtype=float)
    if delays.ndim == 0:
        delays = np.full(n, float(delays))
    params = NetworkParams(
        n=n,
        C=_as_matrix(p.get("C", 1.0), n, "C"),
        H=_as_matrix(p.get("H", np.zeros((n, n))), n, "H"),
        B=_as_matrix(p.get("B", np.zeros((n, n))), n, "B"),
        Sigma=_as_matrix(p.get("Sigma", np.zeros((n, n))), n, "Sigma"),
        delays=delays,
        activation=_activation(p.get("activation", {}), n))
    run = RunConfig(params=params)
    if "dt" in cfg:
        run.dt = float(cfg["dt"])
    if "horizon" in cfg:
        run.horizon = float(cfg["horizon"])
    if "seed" in cfg:
        run.seed = int(cfg["seed"])
    if "route" in cfg:
        run.route = str(cfg["route"])
    if "k" in cfg and cfg["k"] is not None:
        run.k = int(cfg["k"])
    for name in ("initial_segments", "pullback_times", "pairs", "ks"):
        if name in cfg:
            setattr(run, name, list(cfg[name]))
    if "initial_segment" in cfg:
        run.initial_segments = [cfg["initial_segment"]] + run.initial_segments
    if "flow_horizon" in cfg:
        lo, hi = cfg["flow_horizon"]
        run.flow_horizon = (float(lo), float(hi))
    if "use_difference_lgtilde" in cfg:
        run.use_difference_lgtilde = bool(cfg["use_difference_lgtilde"])
    if "gamma_fraction" in cfg:
        run.gamma_fraction = float(cfg["gamma_fraction"])
    if "search_box" in cfg and cfg["search_box"] is not None:
        a, b, c = cfg["search_box"]
        run.search_box = (float(a), float(b), float(c))
    return run


def _segments(run: RunConfig, need: int = 1) -> list[HistorySegment]:
    if len(run.initial_segments) < need:
        raise ConfigError(
            f"this command needs at least {need} initial segment(s); "
            "set initial_segment or initial_segments in the config")
    tau = run.params.max_delay
    out = []
    for head in run.initial_segments:
        if head == "zero" or head is None:
            head = np.zeros(run.params.n)
        out.append(HistorySegment.constant(np.asarray(head, dtype=float), tau, run.dt))
    return out


def _write_trajectory_csv(traj: Trajectory, out: Path) -> None:
    with open(out, "w", newline="") as fh:
        fh.write("t," + ",".join(f"u_{j + 1}" for j in range(traj.n)) + "\n")
        times = traj.times
        for i in range(traj.states.shape[0]):
            fh.write(",".join([_fmt(times[i])] + [_fmt(v) for v in traj.states[i]]) + "\n")


def cmd_simulate(run: RunConfig, out_dir: Path) -> int:
    phi = _segments(run, 1)[0]
    path = sample_path(run.params.n, run.dt, t_min=0.0, t_max=run.horizon,
                       seed=run.seed)
    if run.route == ROUTE_DIRECT:
        traj = integrate_direct(run.params, path, phi, run.dt, run.horizon)
    elif run.route == ROUTE_CONJUGATED:
        flow = build_flow(run.params, path, (0.0, run.horizon))
        traj = integrate_conjugated(run.params, flow, path, phi, run.dt, run.horizon)
    elif run.route in ("wong-zakai", "wongzakai"):
        if run.k is None:
            raise ConfigError("the wong-zakai route needs k (config key k or --k)")
        traj = integrate_wong_zakai(run.params, path, phi, run.dt, run.horizon, run.k)
    else:
        raise ConfigError(f"unknown route {run.route!r}")
    _write_trajectory_csv(traj, out_dir / "trajectory.csv")
    print(f"trajectory.csv: {traj.states.shape[0]} rows, route {traj.route}")
    return EXIT_OK


def _spectrum_dict(result: spectral.SpectralResult, dt: float) -> dict:
    return {
        "abscissa": result.abscissa,
        "gamma": result.gamma,
        "K0": result.K0,
        "K1": result.K1,
        "dt": dt,
        "search_box": list(result.search_box),
        "grid": list(result.grid),
        "roots": [{"re": float(z.real), "im": float(z.imag), "residual": float(r)}
                  for z, r in zip(result.roots, result.residuals)],
    }


def cmd_spectrum(run: RunConfig, out_dir: Path) -> int:
    result = spectral.analyze_spectrum(run.params, run.dt, box=run.search_box,
                                       gamma_fraction=run.gamma_fraction)
    (out_dir / "spectrum.json").write_text(
        json.dumps(_spectrum_dict(result, run.dt), indent=2, sort_keys=True) + "\n")
    print(f"spectrum.json: {len(result.roots)} roots, abscissa {result.abscissa:.6g}")
    return EXIT_OK


def cmd_check(run: RunConfig, out_dir: Path) -> int:
    report = conditions.full_report(
        run.params, run.dt, run.seed, flow_horizon=run.flow_horizon,
        box=run.search_box, gamma_fraction=run.gamma_fraction,
        use_difference_lgtilde=run.use_difference_lgtilde)
    (out_dir / "conditions.json").write_text(conditions.report_to_json(report) + "\n")
    print(f"conditions.json: lemma6_ok={report.lemma6_ok} theorem6_ok={report.theorem6_ok}")
    return EXIT_OK


def cmd_pullback(run: RunConfig, out_dir: Path) -> int:
    if not run.pullback_times:
        raise ConfigError("pullback needs pullback_times in the config")
    segs = _segments(run, 2)
    t_min = -float(max(run.pullback_times))
    path = sample_path(run.params.n, run.dt, t_min=t_min, t_max=0.0, seed=run.seed)
    runout = attractor.pullback_endpoints(run.params, path, segs,
                                          run.pullback_times, run.dt)
    with open(out_dir / "pullback.csv", "w", newline="") as fh:
        fh.write("t_n,diameter\n")
        for t_n, d in zip(runout.times, runout.diameters):
            fh.write(f"{_fmt(t_n)},{_fmt(d)}\n")
    print(f"pullback.csv: {len(runout.times)} start times, "
          f"final diameter {runout.diameters[-1]:.3e}")
    return EXIT_OK


def cmd_cocycle(run: RunConfig, out_dir: Path) -> int:
    if not run.pairs:
        raise ConfigError("cocycle needs pairs (list of [t1, t2]) in the config")
    phi = _segments(run, 1)[0]
    t_max = max(float(a) + float(b) for a, b in run.pairs)
    path = sample_path(run.params.n, run.dt, t_min=0.0, t_max=t_max, seed=run.seed)
    with open(out_dir / "cocycle.csv", "w", newline="") as fh:
        fh.write("t1,t2,residual\n")
        for a, b in run.pairs:
            r = attractor.cocycle_residual(run.params, path, phi,
                                           float(a), float(b), run.dt)
            fh.write(f"{_fmt(float(a))},{_fmt(float(b))},{_fmt(r)}\n")
    print(f"cocycle.csv: {len(run.pairs)} pairs")
    return EXIT_OK


def cmd_wongzakai(run: RunConfig, out_dir: Path) -> int:
    if not run.ks:
        raise ConfigError("wongzakai needs ks (list of mesh parameters) in the config")
    segs = _segments(run, 1)
    path = sample_path(run.params.n, run.dt, t_min=0.0, t_max=run.horizon,
                       seed=run.seed)
    gaps = attractor.wong_zakai_gap(run.params, path, segs, run.ks,
                                    run.horizon, run.dt)
    with open(out_dir / "wongzakai.csv", "w", newline="") as fh:
        fh.write("k,gap\n")
        for k in run.ks:
            fh.write(f"{int(k)},{_fmt(gaps[int(k)])}\n")
    print("wongzakai.csv: " + ", ".join(f"k={k}: {gaps[int(k)]:.3e}" for k in run.ks))
    return EXIT_OK


def reference_params() -> NetworkParams:
    """The built-in two-unit configuration used by reproduce-paper."""
    return NetworkParams(
        n=2,
        C=np.diag([5.0, 5.0]),
        H=np.array([[0.2, 0.1], [0.3, 0.1]]),
        B=np.array([[-0.3, 0.2], [0.1, 0.3]]),
        Sigma=np.diag([0.01, 0.02]),
        delays=np.array([0.1, 0.1]),
        activation=ActivationSpec.tanh(2))


def cmd_reproduce_paper(out_dir: Path) -> int:
    """Regenerate the bundled reference study and self-check it.

    Emits six files plus a manifest listing them.  Every numeric claim is
    checked into assertions.json; the command succeeds only if all hold.
    Outputs are byte-stable: rerunning into a fresh directory produces
    identical files.
    """
    params = reference_params()
    dt = 1e-3
    T = 5.0
    tau = params.max_delay
    files: list[str] = []

    runs = [
        ("trajectory_small.csv", 1, np.array([0.1, 0.2]), "small initial data"),
        ("trajectory_large.csv", 2, np.array([10.0, 20.0]), "large initial data"),
    ]
    assertions = {}
    traj_meta = []
    for fname, seed, head, label in runs:
        path = sample_path(2, dt, t_min=0.0, t_max=T, seed=seed)
        phi = HistorySegment.constant(head, tau, dt)
        traj = integrate_direct(params, path, phi, dt, T)
        _write_trajectory_csv(traj, out_dir / fname)
        files.append(fname)
        endpoint = float(np.max(np.abs(traj.state(T))))
        key = "small" if "small" in fname else "large"
        assertions[f"endpoint_max_abs_{key}"] = endpoint
        assertions[f"endpoint_ok_{key}"] = bool(endpoint < 1e-2)
        traj_meta.append({"file": fname, "seed": seed,
                          "initial": [float(v) for v in head], "label": label})

    result = spectral.analyze_spectrum(params, dt)
    (out_dir / "spectrum.json").write_text(
        json.dumps(_spectrum_dict(result, dt), indent=2, sort_keys=True) + "\n")
    files.append("spectrum.json")
    assertions["abscissa"] = result.abscissa
    assertions["abscissa_ok"] = bool(result.abscissa < 0.0)

    report = conditions.full_report(params, dt, seed=1)
    (out_dir / "conditions.json").write_text(conditions.report_to_json(report) + "\n")
    files.append("conditions.json")
    assertions["lemma6_ok"] = bool(report.lemma6_ok)
    assertions["theorem6_ok"] = bool(report.theorem6_ok)

    times = [2.0, 4.0, 6.0, 8.0]
    pb_path = sample_path(2, dt, t_min=-times[-1], t_max=0.0, seed=1)
    segs = [HistorySegment.constant(np.array([0.1, 0.2]), tau, dt),
            HistorySegment.constant(np.array([10.0, 20.0]), tau, dt)]
    runout = attractor.pullback_endpoints(params, pb_path, segs, times, dt)
    with open(out_dir / "pullback.csv", "w", newline="") as fh:
        fh.write("t_n,diameter\n")
        for t_n, d in zip(runout.times, runout.diameters):
            fh.write(f"{_fmt(t_n)},{_fmt(d)}\n")
    files.append("pullback.csv")
    final_diam = float(runout.diameters[-1])
    assertions["pullback_final_diameter"] = final_diam
    assertions["pullback_ok"] = bool(final_diam < 1e-6)

    all_ok = all(v for k, v in assertions.items() if k.endswith("_ok"))
    assertions["all_ok"] = bool(all_ok)
    (out_dir / "assertions.json").write_text(
        json.dumps(assertions, indent=2, sort_keys=True) + "\n")
    files.append("assertions.json")

    manifest = {
        "kind": "sdhopfield-bundle",
        "files": files,
        "trajectories": traj_meta,
        "spectrum": "spectrum.json",
        "conditions": "conditions.json",
        "pullback": "pullback.csv",
        "assertions": "assertions.json",
        "sha256": {f: hashlib.sha256((out_dir / f).read_bytes()).hexdigest()
                   for f in files},
    }
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"bundle of {len(files)} files in {out_dir}; all_ok={all_ok}")
    if not all_ok:
        failed = [k for k, v in assertions.items() if k.endswith("_ok") and not v]
        print("failed assertions: " + ", ".join(failed), file=sys.stderr)
        return EXIT_ANALYSIS
    return EXIT_OK


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sdhopfield",
        description="Simulation and stability analysis of stochastic delayed "
                    "Hopfield networks with multiplicative noise.")
    sub = ap.add_subparsers(dest="command", required=True)
    names = ["simulate", "spectrum", "check", "pullback", "cocycle",
             "wongzakai", "reproduce-paper"]
    for name in names:
        p = sub.add_parser(name)
        p.add_argument("--out", default=".", help="output directory (default: .)")
        if name != "reproduce-paper":
            p.add_argument("--config", required=True, help="JSON config file")
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--dt", type=float, default=None)
            p.add_argument("--route", default=None,
                           choices=["direct", "conjugated", "wong-zakai"])
            p.add_argument("--k", type=int, default=None)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        if args.command == "reproduce-paper":
            return cmd_reproduce_paper(out_dir)
        run = load_config(args.config)
        for name in ("seed", "dt", "route", "k"):
            v = getattr(args, name)
            if v is not None:
                setattr(run, name, v)
        handler = {
            "simulate": cmd_simulate,
            "spectrum": cmd_spectrum,
            "check": cmd_check,
            "pullback": cmd_pullback,
            "cocycle": cmd_cocycle,
            "wongzakai": cmd_wongzakai,
        }[args.command]
        return handler(run, out_dir)
    except ConfigError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except DivergenceError as e:
        print(f"divergence: {e}", file=sys.stderr)
        return EXIT_DIVERGENCE
    except AnalysisError as e:
        print(f"analysis failure: {e}", file=sys.stderr)
        return EXIT_ANALYSIS
    except SimulationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
