"""Fundamental flow of the linear noise equation dv = Sigma (v o dW), v(0) = id.

The flow conjugates the network SDE to a path-frozen random delay ODE: with
v solving the equation above, u(t) = v(t) u~(t) turns the multiplicative
noise into time-dependent coefficients.  Columns of v each solve the vector
equation dx = Sigma (x o dW), which in matrix form reads

    v_{i+1} = v_i + Sigma diag(dW_i) v_i          (Euler-Maruyama step)

For diagonal Sigma the equation decouples and has the closed form
v_jj(t) = exp(sigma_jj W_j(t) - sigma_jj^2 t / 2) with zero off-diagonals;
that exact mode is used automatically whenever Sigma is diagonal.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, FlowDegenerateError
from .model import NetworkParams
from .noise import BrownianPath, _grid_index

COND_LIMIT = 1e12

MODE_EXACT = "exact-diagonal"
MODE_NUMERIC = "numeric-general"


@dataclass(frozen=True)
class LinearFlow:
    """Flow matrices sampled on the path grid over [t_lo, t_hi].

    ``values[i]`` and ``inverses[i]`` are v and v^-1 at node t_lo + i * delta.
    ``seed`` and the horizon are provenance for any bound derived from this
    flow; stability reports refuse bounds that lack them.
    """

    mode: str
    delta: float
    t_lo: float
    t_hi: float
    seed: int
    values: np.ndarray     # (N+1, n, n)
    inverses: np.ndarray   # (N+1, n, n)

    def __post_init__(self):
        self.values.setflags(write=False)
        self.inverses.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def horizon(self) -> tuple[float, float]:
        return (self.t_lo, self.t_hi)

    def node_index(self, t: float) -> int:
        i = _grid_index(t - self.t_lo, self.delta, "flow time")
        if i < 0 or i >= self.values.shape[0]:
            raise ConfigError(
                f"time {t:g} outside the flow horizon [{self.t_lo:g}, {self.t_hi:g}]")
        return i

    def matrix(self, t: float) -> np.ndarray:
        return self.values[self.node_index(t)]

    def inverse_matrix(self, t: float) -> np.ndarray:
        return self.inverses[self.node_index(t)]


def build_flow(params: NetworkParams, path: BrownianPath,
               horizon: tuple[float, float], mode: str = "auto") -> LinearFlow:
    """Sample the flow on every path node in ``horizon`` (grid-aligned, containing 0).

    mode "auto" picks the exact diagonal form when Sigma is diagonal and the
    Euler-Maruyama matrix recursion otherwise; both can be forced by name.
    The numeric mode anchors v(0) = id and extends to negative times through
    the same one-step recursion.  A condition number beyond 1e12 at any node
    raises :class:`FlowDegenerateError`.
    """
    sigma = np.asarray(params.Sigma, dtype=float)
    n = sigma.shape[0]
    t_lo, t_hi = horizon
    if not (t_lo <= 0.0 <= t_hi) or t_lo == t_hi:
        raise ConfigError(f"flow horizon [{t_lo:g}, {t_hi:g}] must contain 0 and be nonempty")
    lo = path.node_index(t_lo)
    hi = path.node_index(t_hi)
    origin = path.origin_offset - lo

    if mode == "auto":
        diagonal = np.all(sigma == np.diag(np.diagonal(sigma)))
        mode = MODE_EXACT if diagonal else MODE_NUMERIC
    if mode == MODE_EXACT:
        if np.any(sigma != np.diag(np.diagonal(sigma))):
            raise ConfigError("exact-diagonal mode requires a diagonal Sigma")
        values, inverses = _exact_diagonal(np.diagonal(sigma), path, lo, hi)
    elif mode == MODE_NUMERIC:
        values, inverses = _numeric_general(sigma, path, lo, hi, origin)
    else:
        raise ConfigError(f"unknown flow mode {mode!r}")

    if not np.all(np.isfinite(values)):
        raise FlowDegenerateError("flow overflowed to non-finite values")
    if not np.all(np.isfinite(inverses)):
        # denormal collapse: v(t) nonzero but 1/v(t) overflows
        raise FlowDegenerateError("flow inverse overflowed; v(t) is numerically singular")
    _check_condition(values)
    return LinearFlow(mode=mode, delta=path.delta,
                      t_lo=path.t_min + lo * path.delta,
                      t_hi=path.t_min + hi * path.delta,
                      seed=path.seed, values=values, inverses=inverses)


def _exact_diagonal(sigma_diag, path, lo, hi):
    t = path.t_min + path.delta * np.arange(lo, hi + 1)
    w = path.node_values(lo, hi)                       # (N+1, m)
    exponent = sigma_diag[None, :] * w - 0.5 * sigma_diag[None, :] ** 2 * t[:, None]
    diag = np.exp(exponent)
    count = hi - lo + 1
    n = len(sigma_diag)
    values = np.zeros((count, n, n))
    inverses = np.zeros((count, n, n))
    idx = np.arange(n)
    values[:, idx, idx] = diag
    with np.errstate(divide="ignore", over="ignore"):
        inverses[:, idx, idx] = 1.0 / diag
    return values, inverses


def _numeric_general(sigma, path, lo, hi, origin):
    n = sigma.shape[0]
    count = hi - lo + 1
    inc = path.increments[:, lo:hi].T                  # (N, m)
    prods = np.empty((count, n, n))
    prods[0] = np.eye(n)
    for i in range(count - 1):
        step = np.eye(n) + sigma * inc[i][None, :]     # I + Sigma diag(dW)
        prods[i + 1] = step @ prods[i]
    anchor = prods[origin]
    try:
        anchor_inv = np.linalg.inv(anchor)
    except np.linalg.LinAlgError as e:
        raise FlowDegenerateError(f"flow anchor matrix is singular: {e}") from e
    values = prods @ anchor_inv
    values[origin] = np.eye(n)
    try:
        inverses = np.linalg.inv(values)
    except np.linalg.LinAlgError as e:
        raise FlowDegenerateError(f"flow matrix is singular at some node: {e}") from e
    return values, inverses


def _check_condition(values: np.ndarray) -> None:
    s = np.linalg.svd(values, compute_uv=False)
    smin = s[:, -1]
    bad = (smin <= 0.0) | (s[:, 0] > COND_LIMIT * smin)
    if np.any(bad):
        i = int(np.argmax(bad))
        raise FlowDegenerateError(
            f"flow condition number exceeded {COND_LIMIT:g} at node {i}")


def flow_apply(flow: LinearFlow, t: float, x: np.ndarray,
               inverse: bool = False) -> np.ndarray:
    """v(t) x, or v(t)^-1 x with inverse=True, at a grid node t."""
    m = flow.inverse_matrix(t) if inverse else flow.matrix(t)
    return m @ np.asarray(x, dtype=float)


def estimate_bound(flow: LinearFlow) -> float:
    """L_v: the maximum spectral norm of v over the horizon nodes.

    At least 1 whenever the horizon contains 0, since v(0) = id.  Report the
    flow's seed and horizon next to this number; it is a path statistic, not
    a deterministic constant.
    """
    s = np.linalg.svd(flow.values, compute_uv=False)
    return float(np.max(s[:, 0]))
