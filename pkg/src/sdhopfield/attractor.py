"""Pullback-attraction experiments on a frozen noise path.

A pullback run starts the network at time -t_n with initial segment phi and
integrates the same path realization up to time 0; equivalently it runs on
[0, t_n] over the path recentered at -t_n.  As t_n grows the endpoints from
different initial data collapse onto a single random point, the stationary
state of the path.  The routines here measure that collapse: endpoint
diameters, composition (cocycle) residuals, interpolant-route gaps, a
stationary point estimate with Cauchy residuals, and the forward attraction
rate fitted from log distances.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AnalysisError, ConfigError
from .integrator import end_segment, integrate_direct, integrate_wong_zakai
from .model import HistorySegment, NetworkParams, segment_distance
from .noise import BrownianPath, shift

UNDERFLOW_FLOOR = 1e-14


def _zero_segment(params: NetworkParams, dt: float) -> HistorySegment:
    return HistorySegment.constant(np.zeros(params.n), params.max_delay, dt)


@dataclass(frozen=True)
class PullbackRun:
    """End segments at time 0 of pullback runs, by start time and initial segment.

    ``segments[i][j]`` is the endpoint for start time ``times[i]`` and the
    j-th initial segment; ``diameters[i]`` is the largest pairwise uniform
    distance between endpoints at that start time.
    """

    times: tuple[float, ...]
    segments: tuple[tuple[HistorySegment, ...], ...]
    diameters: np.ndarray

    def __post_init__(self):
        self.diameters.setflags(write=False)


def pullback_endpoints(params: NetworkParams, path: BrownianPath,
                       initial_segments: list[HistorySegment],
                       times: list[float], dt: float) -> PullbackRun:
    """Integrate each initial segment from -t_n to 0 and collect endpoints.

    The same path realization drives every run (that is the point of the
    pullback construction).  Raises the path's horizon error when the window
    does not reach back to -max(times) - tau.
    """
    if not times or not initial_segments:
        raise ConfigError("need at least one start time and one initial segment")
    rows = []
    diams = []
    for t_n in times:
        endpoints = []
        for phi in initial_segments:
            traj = integrate_direct(params, path, phi, dt, t_n, t_start=-t_n)
            endpoints.append(end_segment(traj, 0.0))
        rows.append(tuple(endpoints))
        best = 0.0
        for a in range(len(endpoints)):
            for b in range(a + 1, len(endpoints)):
                best = max(best, segment_distance(endpoints[a], endpoints[b]))
        diams.append(best)
    return PullbackRun(times=tuple(float(t) for t in times),
                       segments=tuple(rows), diameters=np.asarray(diams))


def cocycle_residual(params: NetworkParams, path: BrownianPath,
                     phi: HistorySegment, t1: float, t2: float,
                     dt: float) -> float:
    """Uniform distance between the composed and the single-shot evolution.

    Composition runs to t1 on the path, then continues from the reached
    segment on the path recentered at t1.  Both legs replay the identical
    increments the single run over [0, t1 + t2] uses, so the residual is a
    pure bookkeeping check and must vanish to rounding.
    """
    single = integrate_direct(params, path, phi, dt, t1 + t2)
    first = integrate_direct(params, path, phi, dt, t1)
    mid = end_segment(first, t1)
    second = integrate_direct(params, shift(path, t1), mid, dt, t2)
    return segment_distance(end_segment(second, t2), end_segment(single, t1 + t2))


def wong_zakai_gap(params: NetworkParams, path: BrownianPath,
                   initial_segments: list[HistorySegment],
                   ks: list[int], T: float, dt: float) -> dict[int, float]:
    """max over initial segments and grid times of |interpolant route - direct route|.

    Segments at every grid time of [0, T] are compared through their nodes,
    which reduces to the largest pointwise state distance over the stored
    trajectories.
    """
    directs = [integrate_direct(params, path, phi, dt, T) for phi in initial_segments]
    gaps = {}
    for k in ks:
        worst = 0.0
        for phi, ref in zip(initial_segments, directs):
            traj = integrate_wong_zakai(params, path, phi, dt, T, k)
            dist = np.linalg.norm(traj.states - ref.states, axis=1)
            worst = max(worst, float(np.max(dist)))
        gaps[int(k)] = worst
    return gaps


@dataclass(frozen=True)
class StationaryEstimate:
    """Pullback endpoint at the largest start time, with Cauchy residuals.

    ``residuals[i]`` is the uniform distance between the endpoints for
    ``times[i]`` and ``times[i+1]``; a tail that fails to decrease triggers a
    no-convergence warning at construction time.
    """

    times: tuple[float, ...]
    residuals: tuple[float, ...]
    estimate: HistorySegment


def stationary_point(params: NetworkParams, path: BrownianPath,
                     T_list: list[float], dt: float,
                     phi: HistorySegment | None = None,
                     report=None) -> StationaryEstimate:
    """Estimate the stationary state of the path by deep pullback.

    The initial segment defaults to the zero segment.  When a condition
    report is passed and its contraction criterion failed, a warning is
    emitted (the estimate may then depend on the initial data).
    """
    if len(T_list) < 2:
        raise ConfigError("need at least two pullback depths for Cauchy residuals")
    if sorted(T_list) != list(T_list):
        raise ConfigError("pullback depths must be increasing")
    if report is not None and not report.theorem6_ok:
        warnings.warn("contraction criterion not satisfied; "
                      "the stationary point estimate may not converge")
    if phi is None:
        phi = _zero_segment(params, dt)
    run = pullback_endpoints(params, path, [phi], list(T_list), dt)
    ends = [row[0] for row in run.segments]
    residuals = tuple(segment_distance(ends[i], ends[i + 1])
                      for i in range(len(ends) - 1))
    if len(residuals) >= 2 and all(residuals[i + 1] >= residuals[i] > 0.0
                                   for i in range(len(residuals) - 1)):
        warnings.warn("pullback residuals are not decreasing; no convergence")
    return StationaryEstimate(times=tuple(float(t) for t in T_list),
                              residuals=residuals, estimate=ends[-1])


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of log distance against time over the fit window."""

    slope: float
    intercept: float
    r_squared: float
    window: tuple[float, float]
    n_points: int


def attraction_rate(params: NetworkParams, path: BrownianPath,
                    phi: HistorySegment, psi: HistorySegment,
                    T: float, dt: float, t_lo: float = 1.0) -> RateFit:
    """Fit the forward separation rate of two trajectories.

    Both initial segments run forward on the same path; the Euclidean state
    distance is sampled on the grid over [t_lo, T] and log distance is
    regressed on time.  Distances below 1e-14 truncate the window (the
    difference has hit rounding noise).
    """
    if not t_lo < T:
        raise ConfigError(f"need t_lo < T, got [{t_lo:g}, {T:g}]")
    a = integrate_direct(params, path, phi, dt, T)
    b = integrate_direct(params, path, psi, dt, T)
    lo = a.node_index(t_lo)
    dist = np.linalg.norm(a.states[lo:] - b.states[lo:], axis=1)
    t = t_lo + dt * np.arange(dist.size)
    under = np.nonzero(dist < UNDERFLOW_FLOOR)[0]
    if under.size:
        dist = dist[:under[0]]
        t = t[:under[0]]
    if dist.size < 2:
        raise AnalysisError(
            "trajectories coincide to rounding over the whole window; no rate to fit")
    y = np.log(dist)
    A = np.vstack([t, np.ones_like(t)]).T
    (slope, intercept), res, *_ = np.linalg.lstsq(A, y, rcond=None)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(res[0]) if res.size else float(np.sum((A @ [slope, intercept] - y) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(slope=float(slope), intercept=float(intercept),
                   r_squared=r2, window=(t_lo, float(t[-1])), n_points=int(dist.size))
