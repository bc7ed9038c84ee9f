"""Path-wise integration routes for the delayed network SDE.

Three routes produce trajectories on the same grid:

* direct: Euler-Maruyama on the network equation, with the multiplicative
  noise applied as Sigma (u o dW) per step.
* conjugated: the noise is absorbed into the linear flow v; the transformed
  state u~ solves a path-frozen delay ODE by explicit Euler and the
  trajectory is reconstructed as u = v u~.
* wong-zakai: like conjugated, but v is replaced by the flow of the random
  ODE driven by the piecewise-linear interpolant of the path on mesh 1/k,
  with the quadratic-variation correction term retained so the family
  approximates the same (Ito) dynamics as k grows.

Delays must be integer multiples of the step: delayed state reads are pure
index lookups into the trajectory storage, never interpolation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DivergenceError, FlowDegenerateError
from .linearflow import LinearFlow, _check_condition
from .model import (HistorySegment, NetworkParams, evaluate_activation,
                    require_valid)
from .noise import BrownianPath, wong_zakai

DIVERGENCE_LIMIT = 1e12

ROUTE_DIRECT = "direct"
ROUTE_CONJUGATED = "conjugated"


def wong_zakai_route(k: int) -> str:
    return f"wong-zakai({k})"


@dataclass(frozen=True)
class Trajectory:
    """States on the uniform grid, including the history prefix.

    ``states[hist_len]`` is the state at ``t_start``; earlier rows hold the
    initial segment on [t_start - tau, t_start].  ``interpolated_delay_reads``
    counts delayed reads that required interpolation and must stay 0 by
    construction.
    """

    step: float
    t_start: float
    states: np.ndarray
    route: str
    hist_len: int
    interpolated_delay_reads: int = 0

    def __post_init__(self):
        self.states.setflags(write=False)

    @property
    def n(self) -> int:
        return self.states.shape[1]

    @property
    def n_steps(self) -> int:
        return self.states.shape[0] - 1 - self.hist_len

    @property
    def t_end(self) -> float:
        return self.t_start + self.n_steps * self.step

    @property
    def times(self) -> np.ndarray:
        return self.t_start + (np.arange(self.states.shape[0]) - self.hist_len) * self.step

    def node_index(self, t: float) -> int:
        x = (t - self.t_start) / self.step + self.hist_len
        i = round(x)
        if abs(x - i) > 1e-9 * max(1.0, abs(x)):
            raise ConfigError(f"time {t!r} is not on the trajectory grid")
        if i < 0 or i >= self.states.shape[0]:
            raise ConfigError(
                f"time {t:g} outside the stored range "
                f"[{self.t_start - self.hist_len * self.step:g}, {self.t_end:g}]")
        return i

    def state(self, t: float) -> np.ndarray:
        return self.states[self.node_index(t)]


def _setup(params: NetworkParams, phi: HistorySegment, dt: float, T: float):
    require_valid(params, dt)
    if abs(phi.step - dt) > 1e-12 * max(1.0, dt):
        raise ConfigError(f"history step {phi.step!r} must equal dt {dt!r}")
    if phi.n != params.n:
        raise ConfigError(f"history has {phi.n} components, parameters have {params.n}")
    tau = params.max_delay
    hist_len = round(tau / dt)
    if phi.values.shape[0] != hist_len + 1:
        raise ConfigError(
            f"history must cover [-{tau:g}, 0] with {hist_len + 1} nodes, "
            f"got {phi.values.shape[0]}")
    steps = round(T / dt)
    if steps < 1 or abs(T - steps * dt) > 1e-9 * max(1.0, T):
        raise ConfigError(f"horizon T={T!r} must be a positive multiple of dt")
    offsets = np.rint(params.delays / dt).astype(int)
    return hist_len, steps, offsets


def _guard(u: np.ndarray, t: float) -> None:
    if not np.all(np.isfinite(u)) or np.linalg.norm(u) > DIVERGENCE_LIMIT:
        raise DivergenceError(
            f"state norm exceeded {DIVERGENCE_LIMIT:g} (or became non-finite) at t={t:g}")


def _activations(params: NetworkParams):
    act = params.activation
    if act.kind == "tanh":
        return np.tanh, np.tanh
    return (lambda x: evaluate_activation(act, x, "f"),
            lambda x: evaluate_activation(act, x, "g"))


def integrate_direct(params: NetworkParams, path: BrownianPath,
                     phi: HistorySegment, dt: float, T: float,
                     t_start: float = 0.0) -> Trajectory:
    """Euler-Maruyama from t_start over [t_start, t_start + T].

    Steps read the path increments over [t_i, t_i + dt]; the noise term is
    Sigma (u_i o dW_i) with the componentwise product.  Integration aborts
    with :class:`DivergenceError` once the state norm passes 1e12.
    """
    hist_len, steps, offsets = _setup(params, phi, dt, T)
    if path.m != params.n:
        raise ConfigError(f"path has {path.m} components, parameters have {params.n}")
    inc = path.increment_block(t_start, steps)
    f, g = _activations(params)
    C, H, B, Sigma = params.C, params.H, params.B, params.Sigma
    comp = np.arange(params.n)

    states = np.empty((hist_len + steps + 1, params.n))
    states[:hist_len + 1] = phi.values
    for i in range(steps):
        cur = hist_len + i
        u = states[cur]
        _guard(u, t_start + i * dt)
        delayed = states[cur - offsets, comp]
        drift = -(C @ u) + H @ f(u) + B @ g(delayed)
        states[cur + 1] = u + dt * drift + Sigma @ (u * inc[i])
    _guard(states[-1], t_start + T)
    return Trajectory(step=dt, t_start=t_start, states=states,
                      route=ROUTE_DIRECT, hist_len=hist_len)


def _conjugated_core(params: NetworkParams, flow: LinearFlow,
                     phi: HistorySegment, dt: float, T: float,
                     route: str) -> Trajectory:
    hist_len, steps, offsets = _setup(params, phi, dt, T)
    if abs(flow.delta - dt) > 1e-12 * max(1.0, dt):
        raise ConfigError(f"flow grid step {flow.delta!r} must equal dt {dt!r}")
    if flow.t_lo > 0.0 or flow.t_hi < T - 1e-9:
        raise ConfigError(f"flow horizon {flow.horizon} must cover [0, {T:g}]")
    if flow.n != params.n:
        raise ConfigError("flow dimension does not match the parameters")
    f, g = _activations(params)
    C, H, B = params.C, params.H, params.B
    comp = np.arange(params.n)
    base = flow.node_index(0.0)

    states = np.empty((hist_len + steps + 1, params.n))
    states[:hist_len + 1] = phi.values
    utilde = phi.values[-1].copy()
    for i in range(steps):
        cur = hist_len + i
        u = states[cur]
        _guard(u, i * dt)
        delayed = states[cur - offsets, comp]
        inner = -(C @ u) + H @ f(u) + B @ g(delayed)
        utilde = utilde + dt * (flow.inverses[base + i] @ inner)
        states[cur + 1] = flow.values[base + i + 1] @ utilde
    _guard(states[-1], T)
    return Trajectory(step=dt, t_start=0.0, states=states,
                      route=route, hist_len=hist_len)


def integrate_conjugated(params: NetworkParams, flow: LinearFlow,
                         path: BrownianPath, phi: HistorySegment,
                         dt: float, T: float) -> Trajectory:
    """Conjugated route: explicit Euler on the transformed delay ODE.

    The transformed state obeys du~/dt = v^-1 [-C v u~ + H f(v u~) + B g(w)],
    where component j of the delayed argument w is the reconstructed state
    [v u~]_j at t - tau_j once t - tau_j >= 0 and the raw history phi before
    that.  The returned trajectory holds u = v u~ with the plain history
    prefix, so it is directly comparable with the direct route.
    """
    if path is not None:
        if abs(path.delta - dt) > 1e-12 * max(1.0, dt):
            raise ConfigError("path grid step must equal dt")
        if flow.seed != path.seed:
            raise ConfigError("flow was built from a different path (seed mismatch)")
    return _conjugated_core(params, flow, phi, dt, T, ROUTE_CONJUGATED)


def build_wong_zakai_flow(params: NetworkParams, path: BrownianPath,
                          k: int, dt: float, T: float) -> LinearFlow:
    """Explicit Euler flow of the interpolant-driven random ODE on [0, T].

    The ODE is dv/dt = Sigma diag(W'(t) - sigma_d / 2) v, where W' is the
    cellwise-constant derivative of the mesh-1/k interpolant and sigma_d is
    the diagonal of Sigma; the -sigma_d/2 term is the quadratic-variation
    correction that keeps the k -> infinity limit consistent with the
    Euler-Maruyama flow.
    """
    wz = wong_zakai(path, k)
    steps = round(T / dt)
    if steps < 1 or abs(T - steps * dt) > 1e-9 * max(1.0, T):
        raise ConfigError(f"horizon T={T!r} must be a positive multiple of dt")
    per_cell = round(1.0 / (k * dt))
    if per_cell < 1 or abs(1.0 / (k * dt) - per_cell) > 1e-9 * per_cell:
        raise ConfigError(f"mesh 1/{k} must be an integer number of dt steps")
    sigma = np.asarray(params.Sigma, dtype=float)
    half_sd = 0.5 * np.diagonal(sigma)
    n = sigma.shape[0]

    values = np.empty((steps + 1, n, n))
    values[0] = np.eye(n)
    slope = None
    for i in range(steps):
        if i % per_cell == 0:
            slope = wz.slope(i // per_cell)
        coeff = sigma * (slope - half_sd)[None, :]
        values[i + 1] = values[i] + dt * (coeff @ values[i])
    if not np.all(np.isfinite(values)):
        raise FlowDegenerateError("interpolant-driven flow overflowed; reduce dt or k")
    _check_condition(values)
    inverses = np.linalg.inv(values)
    if not np.all(np.isfinite(inverses)):
        raise FlowDegenerateError("interpolant-driven flow is numerically singular")
    return LinearFlow(mode=wong_zakai_route(k), delta=dt, t_lo=0.0,
                      t_hi=steps * dt, seed=path.seed, values=values,
                      inverses=inverses)


def integrate_wong_zakai(params: NetworkParams, path: BrownianPath,
                         phi: HistorySegment, dt: float, T: float,
                         k: int) -> Trajectory:
    """Conjugated route run against the mesh-1/k interpolant flow."""
    flow = build_wong_zakai_flow(params, path, k, dt, T)
    return _conjugated_core(params, flow, phi, dt, T, wong_zakai_route(k))


def end_segment(traj: Trajectory, t: float) -> HistorySegment:
    """The history window [t - tau, t] of the trajectory as a segment."""
    hi = traj.node_index(t)
    lo = hi - traj.hist_len
    if lo < 0:
        raise ConfigError(f"trajectory stores nothing before t={traj.times[0]:g}")
    return HistorySegment(step=traj.step, values=traj.states[lo:hi + 1].copy())
