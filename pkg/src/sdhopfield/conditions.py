"""Stability constants and the two sufficient conditions built from them.

All constants are assembled into one report:

* spectral data: abscissa rho < 0, safety rate gamma, envelope constants
  K0 and K1 of the fundamental solution;
* matrix norms c = ||C||_2, h = ||H||_2, b = ||B||_2;
* activation constants L_f, L_g and both variants of the residual constant
  of g (sampled bound and difference form);
* the flow bound L_v with its seed and horizon, because it is a path
  statistic and means nothing without them;
* the composite constants c0 = K0 exp(gamma tau) and
  c1 = (h L_f + b L_gtilde) exp(-rho tau / 2).

``lemma6_ok`` is the absorbing-set criterion: c1 + rho/2 < 0 < c1 + rho/2 +
gamma, reported with both margins.  ``theorem6_ok`` is the pullback
contraction criterion: (rho/2) exp(rho/2 + L_v (h L_f + b L_gtilde)) + tau
- 1 < 0, strict.  When the absorbing criterion holds, the absorbing
threshold time T_B is the first time the envelope

    psi(t) = c0 exp(-gamma t) + c0 c1 (exp((c1 + rho/2) t) - exp(-gamma t))
                                     / (c1 + rho/2 + gamma)

drops below 1, and lambda_abs = sup_{t >= T_B} psi(t); the absorbing radius
for initial data phi is lambda_abs * ||phi|| * (flow bound over the run).
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .errors import AnalysisError, ConfigError, UnstableLinearizationError
from .linearflow import LinearFlow, build_flow, estimate_bound
from .model import NetworkParams
from .noise import sample_path
from .spectral import SpectralResult, analyze_spectrum


@dataclass(frozen=True)
class ConditionReport:
    rho: float
    gamma: float
    K0: float
    K1: float
    tau: float
    c_norm: float
    h_norm: float
    b_norm: float
    L_f: float
    L_g: float
    L_gtilde_numeric: float
    L_gtilde_difference: float
    L_gtilde_used: float
    use_difference_lgtilde: bool
    L_v: float
    L_v_seed: int
    L_v_horizon: tuple[float, float]
    L_v_dt: float
    c0: float
    c1: float
    lemma6_ok: bool
    lemma6_margins: tuple[float, float]
    theorem6_value: float
    theorem6_ok: bool
    T_B: float | None
    lambda_abs: float | None

    def __post_init__(self):
        if self.L_v_seed is None or self.L_v_horizon is None or self.L_v_dt is None:
            raise ConfigError(
                "flow bound provenance (seed, horizon, dt) is required; "
                "a bare L_v number is not acceptable")


def check_lemma6(report: ConditionReport) -> bool:
    """Absorbing-set criterion, recomputed from the stored constants."""
    x = report.c1 + report.rho / 2.0
    return bool(x < 0.0 < x + report.gamma)


def theorem6_value(rho: float, L_v: float, h_norm: float, L_f: float,
                   b_norm: float, L_gtilde: float, tau: float) -> float:
    return float((rho / 2.0) * np.exp(rho / 2.0 + L_v * (h_norm * L_f + b_norm * L_gtilde)) + tau - 1.0)


def check_theorem6(report: ConditionReport) -> bool:
    """Pullback contraction criterion (strict inequality), recomputed."""
    v = theorem6_value(report.rho, report.L_v, report.h_norm, report.L_f,
                       report.b_norm, report.L_gtilde_used, report.tau)
    return bool(v < 0.0)


def _envelope(t: np.ndarray, c0: float, c1: float, rho: float, gamma: float) -> np.ndarray:
    decay = np.exp(-gamma * t)
    if c1 == 0.0:
        return c0 * decay
    denom = c1 + rho / 2.0 + gamma
    return c0 * decay + c0 * c1 * (np.exp((c1 + rho / 2.0) * t) - decay) / denom


def _absorbing_threshold(c0, c1, rho, gamma):
    """(T_B, lambda_abs) on a log-spaced grid; both None when psi never reaches 1."""
    rate = min(gamma, -(c1 + rho / 2.0))
    t_hi = 200.0 / rate
    for _ in range(4):
        t = np.logspace(-3, np.log10(t_hi), 4000)
        psi = _envelope(t, c0, c1, rho, gamma)
        below = np.nonzero(psi < 1.0)[0]
        if below.size:
            i = below[0]
            T_B = float(t[i])
            lam = float(np.max(psi[i:]))
            return T_B, lam
        t_hi *= 10.0
    return None, None


def absorbing_radius(report: ConditionReport, phi_norm: float, flow_norm: float) -> float:
    """Radius of the absorbing ball for initial data of the given norm.

    ``flow_norm`` is the flow bound over the run that the radius is asserted
    for; use the bound from the same seed and horizon.
    """
    if not report.lemma6_ok or report.lambda_abs is None:
        raise AnalysisError("absorbing criterion not satisfied; no finite radius")
    if phi_norm < 0.0 or flow_norm < 0.0:
        raise ConfigError("norms must be nonnegative")
    return report.lambda_abs * phi_norm * flow_norm


def compute_constants(params: NetworkParams, spectral: SpectralResult,
                      flow: LinearFlow,
                      use_difference_lgtilde: bool = False) -> ConditionReport:
    """Assemble the full report from a finished spectral result and a flow.

    The residual constant of g defaults to the sampled numerical bound; the
    difference form L_g - ||L|| is reported alongside and can be selected
    instead.  Requires spectral.abscissa < 0 and decay constants present.
    """
    if spectral.gamma is None or spectral.K0 is None or spectral.K1 is None:
        raise ConfigError("spectral result lacks decay constants; run the full analysis")
    rho = spectral.abscissa
    if rho >= 0.0:
        raise UnstableLinearizationError(f"spectral abscissa {rho:g} is nonnegative")
    act = params.activation
    tau = params.max_delay
    c_norm = float(np.linalg.norm(params.C, 2))
    h_norm = float(np.linalg.norm(params.H, 2))
    b_norm = float(np.linalg.norm(params.B, 2))
    lg_num = act.lipschitz_g_tilde
    lg_diff = act.lipschitz_g_tilde_difference
    lg_used = lg_diff if use_difference_lgtilde else lg_num
    L_v = estimate_bound(flow)
    gamma = spectral.gamma
    c0 = spectral.K0 * float(np.exp(gamma * tau))
    c1 = (h_norm * act.lipschitz_f + b_norm * lg_used) * float(np.exp(-rho * tau / 2.0))
    x = c1 + rho / 2.0
    lemma6 = x < 0.0 < x + gamma
    t6val = float(theorem6_value(rho, L_v, h_norm, act.lipschitz_f, b_norm, lg_used, tau))
    T_B, lam = _absorbing_threshold(c0, c1, rho, gamma) if lemma6 else (None, None)
    return ConditionReport(
        rho=rho, gamma=gamma, K0=spectral.K0, K1=spectral.K1, tau=tau,
        c_norm=c_norm, h_norm=h_norm, b_norm=b_norm,
        L_f=act.lipschitz_f, L_g=act.lipschitz_g,
        L_gtilde_numeric=lg_num, L_gtilde_difference=lg_diff,
        L_gtilde_used=lg_used, use_difference_lgtilde=use_difference_lgtilde,
        L_v=L_v, L_v_seed=flow.seed, L_v_horizon=flow.horizon, L_v_dt=flow.delta,
        c0=c0, c1=c1, lemma6_ok=lemma6,
        lemma6_margins=(-x, x + gamma),
        theorem6_value=t6val, theorem6_ok=t6val < 0.0,
        T_B=T_B, lambda_abs=lam)


def full_report(params: NetworkParams, dt: float, seed: int,
                flow_horizon: tuple[float, float] = (-20.0, 20.0),
                box: tuple[float, float, float] | None = None,
                gamma_fraction: float = 0.9,
                use_difference_lgtilde: bool = False) -> ConditionReport:
    """Pipeline: spectrum, fundamental solution, flow bound, report."""
    spectral = analyze_spectrum(params, dt, box=box, gamma_fraction=gamma_fraction)
    path = sample_path(params.n, dt, t_min=min(flow_horizon[0], 0.0),
                       t_max=max(flow_horizon[1], dt), seed=seed)
    flow = build_flow(params, path, flow_horizon)
    return compute_constants(params, spectral, flow,
                             use_difference_lgtilde=use_difference_lgtilde)


def report_to_dict(report: ConditionReport) -> dict:
    d = asdict(report)
    d["L_v_horizon"] = list(report.L_v_horizon)
    d["lemma6_margins"] = list(report.lemma6_margins)
    return d


def report_to_json(report: ConditionReport) -> str:
    return json.dumps(report_to_dict(report), indent=2, sort_keys=True)
