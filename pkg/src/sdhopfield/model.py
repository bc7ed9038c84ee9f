"""Domain types for a stochastic delayed Hopfield network.

The network state u(t) in R^n evolves by

    du = [-C u + H f(u) + B g(u_tau)] dt + Sigma (u o dW)

where C is a positive diagonal matrix, H and B are connection matrices,
f and g are componentwise activations, u_tau has component j equal to
u_j(t - tau_j), and (u o dW)_j = u_j dW_j is a componentwise product
with the Brownian increments, so the noise enters multiplicatively
through the matrix Sigma.

Initial data lives on the delay interval [-tau, 0] with tau = max_j tau_j
and is represented on a uniform grid by :class:`HistorySegment`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DomainError

# Sampling window and density used for the numerical residual Lipschitz
# constant of g (distance of the componentwise derivative from the
# declared linear part, maximized over a dense sample).
LGTILDE_SAMPLE_RANGE = (-10.0, 10.0)
LGTILDE_SAMPLE_COUNT = 10_000

_NODE_SNAP = 1e-9


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class ActivationSpec:
    """Componentwise activation pair (f, g) with its analysis constants.

    ``lipschitz_g_tilde`` bounds the residual nonlinearity of g after its
    linear part is removed: it is sup_x ||Dg(x) - L||_2 estimated on a dense
    sample.  ``lipschitz_g_tilde_difference`` is the cruder difference form
    lipschitz_g - ||L||_2, kept alongside the numerical value because the two
    can disagree badly (for tanh the difference form collapses to zero while
    the sampled residual is close to one).
    """

    kind: str                      # "tanh" | "custom-table"
    n: int
    lipschitz_f: float
    lipschitz_g: float
    bound: float                   # M, uniform bound on |f| and |g|
    linear_part: np.ndarray        # L, n x n linear part of g at the origin
    lipschitz_g_tilde: float
    xs: np.ndarray | None = None
    f_values: np.ndarray | None = None
    g_values: np.ndarray | None = None
    sample_range: tuple[float, float] = LGTILDE_SAMPLE_RANGE
    sample_count: int = LGTILDE_SAMPLE_COUNT

    def __post_init__(self):
        object.__setattr__(self, "linear_part", _readonly(self.linear_part))
        for name in ("xs", "f_values", "g_values"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, _readonly(v))

    @property
    def lipschitz_g_tilde_difference(self) -> float:
        return self.lipschitz_g - float(np.linalg.norm(self.linear_part, 2))

    @classmethod
    def tanh(cls, n: int,
             sample_range: tuple[float, float] = LGTILDE_SAMPLE_RANGE,
             sample_count: int = LGTILDE_SAMPLE_COUNT) -> "ActivationSpec":
        """Standard choice f = g = tanh with L the identity.

        tanh is 1-Lipschitz with |tanh| <= 1, so lipschitz_f = lipschitz_g =
        bound = 1.  The residual constant is sampled: |d tanh/dx - 1| =
        tanh(x)^2, whose supremum over the sample window is just under 1.
        """
        s = np.linspace(sample_range[0], sample_range[1], sample_count)
        lgt = float(np.max(np.tanh(s) ** 2))
        return cls(kind="tanh", n=n, lipschitz_f=1.0, lipschitz_g=1.0,
                   bound=1.0, linear_part=np.eye(n), lipschitz_g_tilde=lgt,
                   sample_range=sample_range, sample_count=sample_count)

    @classmethod
    def from_table(cls, n: int, xs, f_values, g_values,
                   lipschitz_f: float, lipschitz_g: float, bound: float,
                   linear_part=None,
                   lipschitz_g_tilde: float | None = None,
                   sample_range: tuple[float, float] = LGTILDE_SAMPLE_RANGE,
                   sample_count: int = LGTILDE_SAMPLE_COUNT) -> "ActivationSpec":
        """Tabulated activation, evaluated by linear interpolation.

        The declared constants are cross-checked against the table slopes and
        values; a warning is emitted when a declared constant is violated.
        The linear part defaults to the central-difference slope of g at 0
        times the identity.  Tables must bracket 0 and satisfy f(0) = g(0) = 0.
        """
        xs = np.asarray(xs, dtype=float)
        f_values = np.asarray(f_values, dtype=float)
        g_values = np.asarray(g_values, dtype=float)
        if xs.ndim != 1 or xs.size < 2 or not np.all(np.diff(xs) > 0):
            raise ConfigError("activation table abscissae must be strictly increasing, length >= 2")
        if f_values.shape != xs.shape or g_values.shape != xs.shape:
            raise ConfigError("activation table values must match the abscissae in shape")
        if not (xs[0] <= 0.0 <= xs[-1]):
            raise ConfigError("activation table must bracket x = 0")
        f0 = float(np.interp(0.0, xs, f_values))
        g0 = float(np.interp(0.0, xs, g_values))
        if abs(f0) > 1e-12 or abs(g0) > 1e-12:
            raise ConfigError(f"activation must vanish at 0, got f(0)={f0:g}, g(0)={g0:g}")

        f_slopes = np.diff(f_values) / np.diff(xs)
        g_slopes = np.diff(g_values) / np.diff(xs)
        if np.max(np.abs(f_slopes)) > lipschitz_f * (1 + 1e-6) + 1e-12:
            warnings.warn("declared lipschitz_f is violated by the table slopes")
        if np.max(np.abs(g_slopes)) > lipschitz_g * (1 + 1e-6) + 1e-12:
            warnings.warn("declared lipschitz_g is violated by the table slopes")
        if max(np.max(np.abs(f_values)), np.max(np.abs(g_values))) > bound * (1 + 1e-6) + 1e-12:
            warnings.warn("declared bound is violated by the table values")

        if linear_part is None:
            h = float(np.min(np.diff(xs)))
            lo = max(xs[0], -h)
            hi = min(xs[-1], h)
            slope0 = (np.interp(hi, xs, g_values) - np.interp(lo, xs, g_values)) / (hi - lo)
            linear_part = slope0 * np.eye(n)
        linear_part = np.asarray(linear_part, dtype=float)

        lgt_numeric = _table_lgtilde(xs, g_slopes, linear_part, n,
                                     sample_range, sample_count)
        if lipschitz_g_tilde is not None:
            if lgt_numeric > lipschitz_g_tilde * (1 + 1e-6) + 1e-12:
                warnings.warn("declared lipschitz_g_tilde is violated by the sampled residual")
        else:
            lipschitz_g_tilde = lgt_numeric
        return cls(kind="custom-table", n=n, lipschitz_f=lipschitz_f,
                   lipschitz_g=lipschitz_g, bound=bound,
                   linear_part=linear_part, lipschitz_g_tilde=lipschitz_g_tilde,
                   xs=xs, f_values=f_values, g_values=g_values,
                   sample_range=sample_range, sample_count=sample_count)


def _table_lgtilde(xs, g_slopes, linear_part, n, sample_range, sample_count):
    lo = max(sample_range[0], float(xs[0]))
    hi = min(sample_range[1], float(xs[-1]))
    s = np.linspace(lo, hi, sample_count)
    cell = np.clip(np.searchsorted(xs, s, side="right") - 1, 0, len(g_slopes) - 1)
    deriv = g_slopes[cell]
    diag = np.diagonal(linear_part)
    if np.allclose(linear_part, np.diag(diag)):
        return float(max(np.max(np.abs(deriv - d)) for d in diag))
    # Non-diagonal linear part: fall back to per-sample matrix norms.
    return float(max(np.linalg.norm(np.diag(np.full(n, d)) - linear_part, 2)
                     for d in deriv))


def evaluate_activation(spec: ActivationSpec, x, which: str = "f") -> np.ndarray:
    """Apply f or g componentwise to x.

    Args:
        spec: activation description.
        x: scalar or array input.
        which: "f" or "g".

    Raises:
        DomainError: a tabulated activation was evaluated outside its range.
        ConfigError: unknown ``which`` or unknown activation kind.
    """
    if which not in ("f", "g"):
        raise ConfigError(f"unknown activation selector {which!r}")
    x = np.asarray(x, dtype=float)
    if spec.kind == "tanh":
        return np.tanh(x)
    if spec.kind == "custom-table":
        lo, hi = spec.xs[0], spec.xs[-1]
        if np.any(x < lo) or np.any(x > hi):
            raise DomainError(
                f"activation table covers [{lo:g}, {hi:g}] but evaluation was "
                f"requested at values in [{np.min(x):g}, {np.max(x):g}]")
        vals = spec.f_values if which == "f" else spec.g_values
        return np.interp(x, spec.xs, vals)
    raise ConfigError(f"unknown activation kind {spec.kind!r}")


@dataclass(frozen=True)
class NetworkParams:
    """Parameters of the network; see the module docstring for the equation.

    Construction only normalizes array storage.  Semantic requirements
    (diagonal positive C, square shapes, positive delays, delays divisible
    by the step) are checked by :func:`validate_params`, which integrators
    call before running.
    """

    n: int
    C: np.ndarray
    H: np.ndarray
    B: np.ndarray
    Sigma: np.ndarray
    delays: np.ndarray
    activation: ActivationSpec

    def __post_init__(self):
        for name in ("C", "H", "B", "Sigma"):
            object.__setattr__(self, name, _readonly(np.atleast_2d(getattr(self, name))))
        object.__setattr__(self, "delays", _readonly(np.atleast_1d(self.delays)))

    @property
    def max_delay(self) -> float:
        return float(np.max(self.delays))


def validate_params(params: NetworkParams, dt: float | None = None) -> list[str]:
    """Collect every violated requirement as a human-readable message.

    An empty list means the parameters are usable.  When ``dt`` is given the
    integrator constraint is included: each delay must be a positive integer
    multiple of the step, because delayed reads are pure index lookups.
    """
    issues = []
    n = params.n
    if n < 1:
        issues.append(f"n must be a positive integer, got {n}")
        return issues
    for name in ("C", "H", "B", "Sigma"):
        m = getattr(params, name)
        if m.shape != (n, n):
            issues.append(f"{name} must have shape ({n}, {n}), got {m.shape}")
    if params.C.shape == (n, n):
        off = params.C - np.diag(np.diagonal(params.C))
        if np.any(off != 0.0):
            issues.append("C must be diagonal")
        if np.any(np.diagonal(params.C) <= 0.0):
            issues.append("diagonal entries of C must be strictly positive")
    if params.delays.shape != (n,):
        issues.append(f"delays must have shape ({n},), got {params.delays.shape}")
    else:
        if np.any(params.delays <= 0.0):
            issues.append("delays must be strictly positive")
        if dt is not None:
            if dt <= 0.0:
                issues.append(f"dt must be positive, got {dt}")
            else:
                for j, tau in enumerate(params.delays):
                    ratio = tau / dt
                    if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
                        issues.append(
                            f"delay {j} ({tau:g}) is not an integer multiple of dt ({dt:g})")
    if params.activation.n != n:
        issues.append(
            f"activation was built for n={params.activation.n}, parameters have n={n}")
    if params.activation.linear_part.shape != (n, n):
        issues.append("activation linear part must be n x n")
    for name, value in (("lipschitz_f", params.activation.lipschitz_f),
                        ("lipschitz_g", params.activation.lipschitz_g),
                        ("bound", params.activation.bound)):
        if not value > 0.0:
            issues.append(f"activation {name} must be positive, got {value}")
    return issues


def require_valid(params: NetworkParams, dt: float | None = None) -> None:
    issues = validate_params(params, dt)
    if issues:
        raise ConfigError("invalid parameters: " + "; ".join(issues))


@dataclass(frozen=True)
class HistorySegment:
    """State history on [-tau, 0] sampled on a uniform grid.

    ``values`` has one row per node, ``values[0]`` at -tau and ``values[-1]``
    at 0, so tau = step * (len(values) - 1).  Off-node evaluation is linear
    interpolation; the segment norm is the maximum Euclidean norm over nodes,
    which for piecewise-linear data equals the supremum over the interval.
    """

    step: float
    values: np.ndarray

    def __post_init__(self):
        v = np.atleast_2d(np.asarray(self.values, dtype=float))
        if self.step <= 0.0:
            raise ConfigError(f"segment step must be positive, got {self.step}")
        if v.shape[0] < 2:
            raise ConfigError("a history segment needs at least two nodes")
        if not np.all(np.isfinite(v)):
            raise ConfigError("history segment values must be finite")
        object.__setattr__(self, "values", _readonly(v))

    @property
    def tau(self) -> float:
        return self.step * (self.values.shape[0] - 1)

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @classmethod
    def constant(cls, head, tau: float, step: float) -> "HistorySegment":
        """Segment equal to ``head`` everywhere on [-tau, 0]."""
        head = np.atleast_1d(np.asarray(head, dtype=float))
        k = round(tau / step)
        if k < 1 or abs(tau - k * step) > 1e-9 * max(1.0, tau):
            raise ConfigError(f"tau ({tau:g}) must be a positive integer multiple of step ({step:g})")
        return cls(step=step, values=np.tile(head, (k + 1, 1)))


def segment_eval(segment: HistorySegment, s: float) -> np.ndarray:
    """Value of the segment at s in [-tau, 0].

    Grid nodes are returned bit-for-bit as stored; between nodes the value is
    the linear interpolant.  Arguments outside [-tau, 0] (beyond a relative
    snap tolerance) raise :class:`DomainError`.
    """
    tau = segment.tau
    x = (s + tau) / segment.step
    last = segment.values.shape[0] - 1
    i = round(x)
    if abs(x - i) <= _NODE_SNAP * max(1.0, abs(x)):
        if i < 0 or i > last:
            raise DomainError(f"segment evaluation at s={s:g} outside [-{tau:g}, 0]")
        return segment.values[i].copy()
    if x < 0.0 or x > last:
        raise DomainError(f"segment evaluation at s={s:g} outside [-{tau:g}, 0]")
    i = int(np.floor(x))
    frac = x - i
    return (1.0 - frac) * segment.values[i] + frac * segment.values[i + 1]


def segment_norm(segment: HistorySegment) -> float:
    """sup over [-tau, 0] of the Euclidean norm (attained at a node)."""
    return float(np.max(np.linalg.norm(segment.values, axis=1)))


def segment_distance(a: HistorySegment, b: HistorySegment) -> float:
    """Uniform distance between two segments on the same grid."""
    if a.values.shape != b.values.shape or a.step != b.step:
        raise ConfigError("segments must share grid step and node count")
    return float(np.max(np.linalg.norm(a.values - b.values, axis=1)))
