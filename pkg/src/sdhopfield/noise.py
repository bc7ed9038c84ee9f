"""Two-sided Brownian driving paths on a uniform grid.

A path stores per-component N(0, delta) increments for every grid cell of
[t_min, t_max] with t_min <= 0 <= t_max.  Values are anchored so W(0) = 0
exactly.  The time shift theta_t (recentering the path at t) is an index
offset on the shared increment arrays, never a resample, so shifted views
agree with the parent bit for bit and compose exactly.

Sampling is deterministic in the seed and prefix-stable: enlarging the
window in either direction reuses the same per-component forward and
backward substreams, so the overlapping increments are bit-identical.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError, PathHorizonError

DEFAULT_T_MIN = -64.0

_GRID_SNAP = 1e-9


def _grid_index(t: float, delta: float, what: str) -> int:
    x = t / delta
    i = round(x)
    if abs(x - i) > _GRID_SNAP * max(1.0, abs(x)):
        raise ConfigError(f"{what} ({t!r}) must be a multiple of the grid step {delta!r}")
    return i


@dataclass(frozen=True)
class BrownianPath:
    """Sampled two-sided Brownian motion; construct via :func:`sample_path`.

    ``increments[c, i]`` is the increment of component c over the i-th grid
    cell counted from t_min.  ``origin_offset`` is the node index of t = 0.
    ``cumsum`` holds node values summed outward from the origin node (exact
    zero there), so a shared node's value survives window enlargement bit for
    bit.  Reads still subtract ``cumsum[origin_offset]`` because shifted
    views move their origin onto a nonzero node.
    """

    m: int
    delta: float
    t_min: float
    t_max: float
    seed: int
    origin_offset: int
    increments: np.ndarray
    cumsum: np.ndarray

    def __post_init__(self):
        self.increments.setflags(write=False)
        self.cumsum.setflags(write=False)

    @property
    def n_cells(self) -> int:
        return self.increments.shape[1]

    def node_index(self, t: float) -> int:
        """Index into the node arrays for a grid-aligned time t."""
        i = self.origin_offset + _grid_index(t, self.delta, "time")
        if i < 0 or i > self.n_cells:
            raise PathHorizonError(
                f"time {t:g} outside the sampled window [{self.t_min:g}, {self.t_max:g}]; "
                f"resample the path with a wider window",
                t_min_required=min(t, self.t_min), t_max_required=max(t, self.t_max))
        return i

    def node_values(self, lo: int, hi: int) -> np.ndarray:
        """Node values W(t_i) for node indices lo..hi inclusive, shape (hi-lo+1, m)."""
        block = self.cumsum[:, lo:hi + 1] - self.cumsum[:, self.origin_offset:self.origin_offset + 1]
        return block.T

    def increment_block(self, t_start: float, n_steps: int) -> np.ndarray:
        """Increments over n_steps consecutive cells from t_start, shape (n_steps, m)."""
        i0 = self.node_index(t_start)
        if i0 + n_steps > self.n_cells:
            t_need = self.t_min + (i0 + n_steps) * self.delta
            raise PathHorizonError(
                f"path ends at {self.t_max:g} but {n_steps} steps from {t_start:g} "
                f"need {t_need:g}; resample with a wider window",
                t_max_required=t_need)
        return self.increments[:, i0:i0 + n_steps].T


def _prefix_sums(inc: np.ndarray, origin: int) -> np.ndarray:
    """Node values anchored at node ``origin``: zero there, summed outward.

    Summation walks away from the origin on both sides, which keeps shared
    node values independent of how far the window extends.
    """
    m, n = inc.shape
    cs = np.zeros((m, n + 1))
    np.cumsum(inc[:, origin:], axis=1, out=cs[:, origin + 1:])
    if origin:
        cs[:, :origin] = -np.cumsum(inc[:, :origin][:, ::-1], axis=1)[:, ::-1]
    return cs


def sample_path(m: int, delta: float, t_min: float = DEFAULT_T_MIN,
                t_max: float = 1.0, seed: int = 0) -> BrownianPath:
    """Draw an m-component path on [t_min, t_max] with grid step delta.

    t_min <= 0 <= t_max and both must be multiples of delta.  Each component
    uses its own forward and backward substream spawned from the seed, drawn
    outward from 0, so re-sampling with a wider window extends the path
    without changing the shared region.
    """
    if m < 1:
        raise ConfigError(f"need at least one component, got m={m}")
    if delta <= 0.0:
        raise ConfigError(f"grid step must be positive, got {delta}")
    if not (t_min <= 0.0 <= t_max) or t_min == t_max:
        raise ConfigError(f"window [{t_min:g}, {t_max:g}] must contain 0 and be nonempty")
    n_bwd = -_grid_index(t_min, delta, "t_min")
    n_fwd = _grid_index(t_max, delta, "t_max")

    fwd_root, bwd_root = np.random.SeedSequence(seed).spawn(2)
    fwd_streams = fwd_root.spawn(m)
    bwd_streams = bwd_root.spawn(m)
    scale = float(np.sqrt(delta))
    inc = np.empty((m, n_bwd + n_fwd))
    for c in range(m):
        if n_fwd:
            gen = np.random.default_rng(fwd_streams[c])
            inc[c, n_bwd:] = scale * gen.standard_normal(n_fwd)
        if n_bwd:
            gen = np.random.default_rng(bwd_streams[c])
            # Backward draws walk away from 0, so cell n_bwd-1-j gets draw j.
            inc[c, :n_bwd] = (scale * gen.standard_normal(n_bwd))[::-1]
    return BrownianPath(m=m, delta=delta, t_min=t_min, t_max=t_max, seed=seed,
                        origin_offset=n_bwd, increments=inc,
                        cumsum=_prefix_sums(inc, n_bwd))


def path_value(path: BrownianPath, component: int | None, t: float):
    """W_component(t), linearly interpolated between grid nodes.

    With component None the full vector is returned.
    """
    x = (t - path.t_min) / path.delta
    if x < -_GRID_SNAP or x > path.n_cells + _GRID_SNAP:
        raise DomainError(
            f"time {t:g} outside the sampled window [{path.t_min:g}, {path.t_max:g}]")
    i = round(x)
    o = path.origin_offset
    if abs(x - i) <= _GRID_SNAP * max(1.0, abs(x)):
        vals = path.cumsum[:, i] - path.cumsum[:, o]
    else:
        i = int(np.floor(x))
        frac = x - i
        left = path.cumsum[:, i] - path.cumsum[:, o]
        right = path.cumsum[:, i + 1] - path.cumsum[:, o]
        vals = (1.0 - frac) * left + frac * right
    if component is None:
        return vals
    return float(vals[component])


def shift(path: BrownianPath, t: float) -> BrownianPath:
    """The path recentered at t: value at s is W(t + s) - W(t).

    t must be a grid-aligned time inside the sampled window.  The result
    shares the parent's arrays; only the origin index and window move, so
    shift(shift(p, s), t) and shift(p, s + t) agree exactly.
    """
    k = _grid_index(t, path.delta, "shift offset")
    new_origin = path.origin_offset + k
    if new_origin < 0 or new_origin > path.n_cells:
        raise PathHorizonError(
            f"shift by {t:g} leaves the sampled window [{path.t_min:g}, {path.t_max:g}]",
            t_min_required=min(t, path.t_min), t_max_required=max(t, path.t_max))
    return BrownianPath(m=path.m, delta=path.delta,
                        t_min=path.t_min - k * path.delta,
                        t_max=path.t_max - k * path.delta,
                        seed=path.seed, origin_offset=new_origin,
                        increments=path.increments, cumsum=path.cumsum)


def coarsen(path: BrownianPath, factor: int) -> BrownianPath:
    """Restriction of the same Brownian motion to a grid ``factor`` times coarser.

    Coarse increments are sums of consecutive fine increments, so the coarse
    path is the identical realization read on fewer nodes.  Used for step
    refinement studies where every step size must see the same noise.
    """
    if factor < 1 or int(factor) != factor:
        raise ConfigError(f"coarsening factor must be a positive integer, got {factor}")
    factor = int(factor)
    if path.origin_offset % factor or path.n_cells % factor:
        raise ConfigError(
            "window endpoints must be multiples of the coarse step to coarsen")
    inc = path.increments.reshape(path.m, path.n_cells // factor, factor).sum(axis=2)
    # surviving nodes keep the parent's values bit for bit
    cs = path.cumsum[:, ::factor].copy()
    return BrownianPath(m=path.m, delta=path.delta * factor,
                        t_min=path.t_min, t_max=path.t_max, seed=path.seed,
                        origin_offset=path.origin_offset // factor,
                        increments=inc, cumsum=cs)


@dataclass(frozen=True)
class WongZakaiView:
    """Piecewise-linear interpolant of a path on the mesh 1/k.

    On each cell [j/k, (j+1)/k) the interpolant is the chord of the parent
    path, so it reproduces the parent's values at its own nodes exactly and
    has the constant derivative k * (W((j+1)/k) - W(j/k)) inside the cell.
    """

    path: BrownianPath
    k: int
    nodes_per_cell: int

    @property
    def mesh(self) -> float:
        return 1.0 / self.k

    def _cell_and_frac(self, t: float) -> tuple[int, float]:
        x = t * self.k
        j = round(x)
        if abs(x - j) <= _GRID_SNAP * max(1.0, abs(x)):
            return j, 0.0
        j = int(np.floor(x))
        return j, x - j

    def _node_value(self, j: int) -> np.ndarray:
        i = self.path.origin_offset + j * self.nodes_per_cell
        if i < 0 or i > self.path.n_cells:
            raise DomainError(
                f"interpolant node {j}/{self.k} outside the sampled window")
        return self.path.cumsum[:, i] - self.path.cumsum[:, self.path.origin_offset]

    def value(self, component: int | None, t: float):
        j, frac = self._cell_and_frac(t)
        if frac == 0.0:
            vals = self._node_value(j)
        else:
            left = self._node_value(j)
            right = self._node_value(j + 1)
            vals = (1.0 - frac) * left + frac * right
        if component is None:
            return vals
        return float(vals[component])

    def slope(self, cell: int) -> np.ndarray:
        """Derivative vector on cell [cell/k, (cell+1)/k)."""
        return self.k * (self._node_value(cell + 1) - self._node_value(cell))

    def derivative(self, component: int | None, t: float):
        j, _ = self._cell_and_frac(t)
        vals = self.slope(j)
        if component is None:
            return vals
        return float(vals[component])


def wong_zakai(path: BrownianPath, k: int) -> WongZakaiView:
    """Interpolant of ``path`` on the mesh 1/k.

    The mesh must be an integer number of path grid cells, so the cell
    boundaries j/k all fall on path nodes.
    """
    if k < 1 or int(k) != k:
        raise ConfigError(f"mesh parameter k must be a positive integer, got {k}")
    q = 1.0 / (k * path.delta)
    qi = round(q)
    if qi < 1 or abs(q - qi) > _GRID_SNAP * max(1.0, q):
        raise ConfigError(
            f"mesh 1/{k} is not an integer multiple of the path grid step {path.delta!r}")
    return WongZakaiView(path=path, k=int(k), nodes_per_cell=qi)


def write_path_csv(path: BrownianPath, out) -> None:
    """Audit export: one row per grid node, columns t, W_1..W_m."""
    close = False
    if not isinstance(out, io.TextIOBase):
        out = open(out, "w", newline="")
        close = True
    try:
        out.write("t," + ",".join(f"W_{c + 1}" for c in range(path.m)) + "\n")
        values = path.node_values(0, path.n_cells)
        for i in range(path.n_cells + 1):
            t = path.t_min + i * path.delta
            out.write(",".join(repr(float(v)) for v in [t, *values[i]]) + "\n")
    finally:
        if close:
            out.close()
