"""Spectrum of the linear delay backbone du/dt = -C u + B L u_tau.

The characteristic matrix of the backbone is

    Delta(lambda) = lambda I + C - B L diag(exp(-lambda tau_j))

and the characteristic roots are the zeros of det Delta.  The spectral
abscissa (largest real part over the roots in the search box) drives every
decay estimate downstream.  Note the sign convention: C enters with a plus
because the drift is -C u, so a stable diagonal C pushes roots left.

Roots are found by Newton iteration on the determinant from a coarse grid
of starts, with the analytic derivative assembled from
Delta'(lambda) = I + B L diag(tau_j exp(-lambda tau_j)) through the
determinant derivative d det = tr(adj(Delta) Delta').
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (AnalysisError, ConfigError, EmptySpectrumError,
                     UnstableLinearizationError)
from .model import NetworkParams, require_valid

DEFAULT_GRID = (40, 40)
RESIDUAL_TOL = 1e-9
DEDUP_TOL = 1e-6


def default_search_box(params: NetworkParams) -> tuple[float, float, float]:
    """(re_min, re_max, im_max): Re in [-3 ||C||, 1], Im in [0, 50 / max delay]."""
    c_norm = float(np.linalg.norm(params.C, 2))
    return (-3.0 * c_norm, 1.0, 50.0 / params.max_delay)


@dataclass(frozen=True)
class SpectralResult:
    """Roots, residuals, and (once computed) the decay constants.

    ``roots`` is sorted by descending real part, then ascending imaginary
    part, and closed under conjugation.  ``gamma``, ``K0`` and ``K1`` stay
    None until :func:`decay_constants` fills them via
    :func:`complete`.
    """

    roots: np.ndarray
    residuals: np.ndarray
    abscissa: float
    search_box: tuple[float, float, float]
    grid: tuple[int, int]
    gamma: float | None = None
    K0: float | None = None
    K1: float | None = None

    def __post_init__(self):
        self.roots.setflags(write=False)
        self.residuals.setflags(write=False)
        if self.gamma is not None and not self.gamma > 0.0:
            raise ConfigError(f"gamma must be positive, got {self.gamma}")
        if self.K0 is not None and self.K0 < 1.0:
            raise ConfigError(f"K0 must be at least 1, got {self.K0}")


def characteristic_matrix(params: NetworkParams, lam: complex) -> np.ndarray:
    """Delta(lambda) for a single (possibly complex) lambda."""
    return _char_matrices(params, np.asarray([lam], dtype=complex))[0]


def _char_matrices(params: NetworkParams, lam: np.ndarray) -> np.ndarray:
    n = params.n
    BL = params.B @ params.activation.linear_part
    # exp overflows for wandering Newton iterates far left; the callers mask
    # non-finite results, so silence the transient warnings here
    with np.errstate(over="ignore", invalid="ignore"):
        E = np.exp(-lam[:, None] * params.delays[None, :])      # (S, n)
        out = np.zeros((lam.size, n, n), dtype=complex)
        idx = np.arange(n)
        out[:, idx, idx] = lam[:, None] + np.diagonal(params.C)[None, :]
        out -= BL[None, :, :] * E[:, None, :]
    return out


def _char_matrices_deriv(params: NetworkParams, lam: np.ndarray) -> np.ndarray:
    n = params.n
    BL = params.B @ params.activation.linear_part
    with np.errstate(over="ignore", invalid="ignore"):
        E = np.exp(-lam[:, None] * params.delays[None, :])
        out = np.tile(np.eye(n, dtype=complex), (lam.size, 1, 1))
        out += BL[None, :, :] * (params.delays[None, :] * E)[:, None, :]
    return out


def _adjugate(a: np.ndarray) -> np.ndarray:
    n = a.shape[-1]
    if n == 1:
        return np.ones_like(a)
    if n == 2:
        adj = np.empty_like(a)
        adj[..., 0, 0] = a[..., 1, 1]
        adj[..., 1, 1] = a[..., 0, 0]
        adj[..., 0, 1] = -a[..., 0, 1]
        adj[..., 1, 0] = -a[..., 1, 0]
        return adj
    adj = np.empty_like(a)
    rows = np.arange(n)
    for i in range(n):
        for j in range(n):
            minor = a[..., rows != j, :][..., :, rows != i]
            adj[..., i, j] = (-1.0) ** (i + j) * np.linalg.det(minor)
    return adj


def char_det(params: NetworkParams, lam, with_derivative: bool = False):
    """det Delta(lambda), vectorized over lambda.

    With ``with_derivative`` the analytic d/dlambda det Delta is returned as
    well, via the adjugate identity.
    """
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    delta = _char_matrices(params, lam)
    with np.errstate(over="ignore", invalid="ignore"):
        det = np.linalg.det(delta)
        if not with_derivative:
            return det
        ddet = np.einsum("sij,sji->s", _adjugate(delta),
                         _char_matrices_deriv(params, lam))
    return det, ddet


def dominant_roots(params: NetworkParams,
                   box: tuple[float, float, float] | None = None,
                   grid: tuple[int, int] = DEFAULT_GRID,
                   residual_tol: float = RESIDUAL_TOL,
                   max_iter: int = 60) -> SpectralResult:
    """Find the characteristic roots in the search box.

    Newton runs from every point of a coarse grid over the box.  Converged
    points are kept when their determinant residual is below ``residual_tol``;
    duplicates merge within 1e-6.  The box covers Im >= 0 only and conjugates
    of strictly complex roots are appended afterwards.  Roots that converge
    to the right of the box are kept (hiding an unstable root would be
    worse than an untidy listing); clutter far left of the box is dropped.

    Raises:
        EmptySpectrumError: no start converged to an acceptable root.
    """
    require_valid(params)
    if box is None:
        box = default_search_box(params)
    re_lo, re_hi, im_hi = box
    if not (re_lo < re_hi and im_hi > 0.0):
        raise ConfigError(f"degenerate search box {box}")
    n_re, n_im = grid
    res = np.linspace(re_lo, re_hi, n_re)
    ims = np.linspace(0.0, im_hi, n_im)
    lam = (res[:, None] + 1j * ims[None, :]).ravel()

    active = np.ones(lam.shape, dtype=bool)
    for _ in range(max_iter):
        det, ddet = char_det(params, lam[active], with_derivative=True)
        step = np.zeros_like(det)
        ok = (ddet != 0.0) & np.isfinite(ddet) & np.isfinite(det)
        step[ok] = det[ok] / ddet[ok]
        new = lam[active] - step
        moved = np.abs(step) > 1e-13 * np.maximum(1.0, np.abs(new))
        finite = np.isfinite(new)
        lam[active] = np.where(finite, new, lam[active])
        still = active.copy()
        still[active] = moved & finite
        active = still
        if not active.any():
            break

    det = char_det(params, lam)
    keep = (np.abs(det) < residual_tol) & np.isfinite(lam)
    keep &= lam.real >= re_lo - DEDUP_TOL
    keep &= np.abs(lam.imag) <= im_hi + DEDUP_TOL
    cand = lam[keep]
    cand = np.where(np.abs(cand.imag) <= DEDUP_TOL, cand.real + 0j,
                    cand.real + 1j * np.abs(cand.imag))
    if cand.size == 0:
        raise EmptySpectrumError(
            f"no characteristic roots found in box {box}; widen the box or relax tolerances")

    order = np.lexsort((cand.imag, cand.real))
    cand = cand[order]
    roots = []
    for z in cand:
        if all(abs(z - r) > DEDUP_TOL for r in roots):
            roots.append(z)
    full = []
    for z in roots:
        full.append(z)
        if z.imag > 0.0:
            full.append(z.conjugate())
    full = np.asarray(full, dtype=complex)
    residuals = np.abs(char_det(params, full))
    order = np.lexsort((full.imag, -full.real))
    full = full[order]
    residuals = residuals[order]
    return SpectralResult(roots=full, residuals=residuals,
                          abscissa=float(np.max(full.real)),
                          search_box=box, grid=grid)


@dataclass(frozen=True)
class FundamentalSolution:
    """Matrix solution S(t) on a uniform grid: S(0) = I and S = 0 on [-tau, 0)."""

    step: float
    matrices: np.ndarray     # (N+1, n, n)

    def __post_init__(self):
        self.matrices.setflags(write=False)

    @property
    def times(self) -> np.ndarray:
        return self.step * np.arange(self.matrices.shape[0])

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.svd(self.matrices, compute_uv=False)[:, 0]


def fundamental_solution(params: NetworkParams, dt: float, T: float) -> FundamentalSolution:
    """Explicit Euler on dS/dt = -C S + B L S_tau with row-wise delayed reads.

    Row j of the delayed matrix is read at t - tau_j (each state component
    carries its own delay), zero before time 0.
    """
    require_valid(params, dt)
    steps = round(T / dt)
    if steps < 1 or abs(T - steps * dt) > 1e-9 * max(1.0, T):
        raise ConfigError(f"horizon T={T!r} must be a positive multiple of dt")
    n = params.n
    offsets = np.rint(params.delays / dt).astype(int)
    C = params.C
    BL = params.B @ params.activation.linear_part
    mats = np.empty((steps + 1, n, n))
    mats[0] = np.eye(n)
    delayed = np.zeros((n, n))
    for i in range(steps):
        for j in range(n):
            a = i - offsets[j]
            delayed[j] = mats[a][j] if a >= 0 else 0.0
        mats[i + 1] = mats[i] + dt * (-(C @ mats[i]) + BL @ delayed)
    return FundamentalSolution(step=dt, matrices=mats)


def decay_constants(params: NetworkParams, abscissa: float,
                    fundsol: FundamentalSolution,
                    gamma_fraction: float = 0.9) -> tuple[float, float, float]:
    """(gamma, K0, K1) from the sampled fundamental solution.

    gamma = gamma_fraction * (-abscissa) leaves headroom below the true decay
    rate; K1 = max ||S(t)|| exp(-abscissa t / 2) and K0 = max ||S(t)||
    exp(gamma t), floored at 1.  Requires a strictly negative abscissa and a
    horizon of at least 10 / (-abscissa) so the maxima have converged.
    """
    if not 0.0 < gamma_fraction < 1.0:
        raise ConfigError(f"gamma_fraction must be in (0, 1), got {gamma_fraction}")
    if abscissa >= 0.0:
        raise UnstableLinearizationError(
            f"spectral abscissa {abscissa:g} is nonnegative; decay constants undefined")
    horizon = fundsol.step * (fundsol.matrices.shape[0] - 1)
    needed = 10.0 / (-abscissa)
    if horizon < needed - 1e-9:
        raise ConfigError(
            f"fundamental solution horizon {horizon:g} too short; need at least {needed:g}")
    gamma = gamma_fraction * (-abscissa)
    t = fundsol.times
    norms = fundsol.norms
    K1 = float(np.max(norms * np.exp(-abscissa * t / 2.0)))
    K0 = float(max(1.0, np.max(norms * np.exp(gamma * t))))
    return gamma, K0, K1


def complete(result: SpectralResult, gamma: float, K0: float, K1: float) -> SpectralResult:
    from dataclasses import replace
    return replace(result, gamma=gamma, K0=K0, K1=K1)


def analyze_spectrum(params: NetworkParams, dt: float,
                     box: tuple[float, float, float] | None = None,
                     grid: tuple[int, int] = DEFAULT_GRID,
                     gamma_fraction: float = 0.9,
                     horizon: float | None = None) -> SpectralResult:
    """Root search plus decay constants in one call.

    The fundamental solution horizon defaults to max(5, 10 / (-abscissa)),
    rounded up to the grid.
    """
    result = dominant_roots(params, box=box, grid=grid)
    if result.abscissa >= 0.0:
        raise UnstableLinearizationError(
            f"spectral abscissa {result.abscissa:g} is nonnegative")
    if horizon is None:
        horizon = max(5.0, 10.0 / (-result.abscissa))
    horizon = dt * int(np.ceil(horizon / dt - 1e-9))
    S = fundamental_solution(params, dt, horizon)
    gamma, K0, K1 = decay_constants(params, result.abscissa, S,
                                    gamma_fraction=gamma_fraction)
    return complete(result, gamma, K0, K1)
