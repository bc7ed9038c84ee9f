"""Independent reference computations backing the test expectations.

Everything here deliberately avoids the package internals: scalar roots come
from bisection on a monotone bracket, delay ODE solutions from classical RK4
with the method of steps, root inventories from a dense grid scan with
derivative-free polish, and threshold times from brute linear search.
Agreement with the package is then meaningful evidence rather than a
tautology.
"""

import numpy as np


def scalar_dominant_root(c, bl, tau):
    """Rightmost real root of f(lam) = lam + c - bl*exp(-lam*tau), by bisection.

    For bl >= 0, f is strictly increasing, so the unique real root is found
    by expanding a bracket from 0.  For bl < 0, f has a single minimum at
    lam_c = -log(-1/(tau*bl))/tau and increases to the right of it, so the
    rightmost root (if any) lies in [lam_c, inf).
    """
    if bl == 0.0:
        return -c

    def f(lam):
        return lam + c - bl * np.exp(-tau * lam)

    if bl > 0.0:
        lo = hi = 0.0
        while f(lo) > 0.0:
            lo = 2.0 * lo - 1.0
        while f(hi) < 0.0:
            hi = 2.0 * hi + 1.0
    else:
        lo = -np.log(-1.0 / (tau * bl)) / tau
        if f(lo) > 0.0:
            raise RuntimeError("no real root: the minimum sits above zero")
        hi = lo + 1.0
        while f(hi) < 0.0:
            hi += 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def rk4_delay_ode(C, H, B, delays, head, dt, T):
    """Classical RK4 for u' = -Cu + H tanh(u) + B tanh(u_delayed).

    Constant initial history equal to ``head``; component j of the delayed
    argument is read at t - delays[j] by linear interpolation between already
    computed nodes (delays >= dt keeps every stage in the past).  Returns the
    full node array including the history rows, shape (hist+steps+1, n).
    """
    C = np.asarray(C, dtype=float)
    H = np.asarray(H, dtype=float)
    B = np.asarray(B, dtype=float)
    delays = np.asarray(delays, dtype=float)
    head = np.asarray(head, dtype=float)
    n = head.size
    tau = delays.max()
    hist = round(tau / dt)
    steps = round(T / dt)
    d = np.rint(delays / dt).astype(int)
    comp = np.arange(n)
    u = np.empty((hist + steps + 1, n))
    u[:hist + 1] = head

    def rhs(i, frac, ucur):
        pos = i + frac - d
        lo = np.floor(pos + 1e-12).astype(int)
        fr = pos - lo
        # fr == 0 can point lo+1 one row past the filled region; the weight
        # is zero there, so clamp instead of reading garbage
        vals = (1.0 - fr) * u[lo, comp] + fr * u[np.minimum(lo + 1, i), comp]
        return -(C @ ucur) + H @ np.tanh(ucur) + B @ np.tanh(vals)

    for s in range(steps):
        i = hist + s
        y = u[i]
        k1 = rhs(i, 0.0, y)
        k2 = rhs(i, 0.5, y + 0.5 * dt * k1)
        k3 = rhs(i, 0.5, y + 0.5 * dt * k2)
        k4 = rhs(i, 1.0, y + dt * k3)
        u[i + 1] = y + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u


def scan_roots(C_diag, BL, delays, box, n_re=1000, n_im=1000, det_tol=1e-9):
    """Roots of det(lam I + C - BL diag(exp(-lam tau))) inside the box.

    Dense |det| evaluation over the box (mirrored slightly below the real
    axis so real roots are interior minima), then derivative-free polish of
    every strict local minimum with a central-difference Newton step.  Only
    n <= 2 is supported; that is all the oracle is needed for.
    """
    C_diag = np.asarray(C_diag, dtype=float)
    BL = np.asarray(BL, dtype=float)
    delays = np.asarray(delays, dtype=float)
    n = C_diag.size
    if n > 2:
        raise ValueError("scan oracle handles n <= 2 only")
    re_lo, re_hi, im_hi = box

    def detf(lam):
        lam = np.asarray(lam, dtype=complex)
        E = [np.exp(-lam * delays[j]) for j in range(n)]
        if n == 1:
            return lam + C_diag[0] - BL[0, 0] * E[0]
        d00 = lam + C_diag[0] - BL[0, 0] * E[0]
        d11 = lam + C_diag[1] - BL[1, 1] * E[1]
        d01 = -BL[0, 1] * E[1]
        d10 = -BL[1, 0] * E[0]
        return d00 * d11 - d01 * d10

    res = np.linspace(re_lo, re_hi, n_re)
    step_im = im_hi / (n_im - 1)
    ims = np.linspace(-3.0 * step_im, im_hi, n_im + 3)
    lam = res[:, None] + 1j * ims[None, :]
    a = np.abs(detf(lam))
    mins = np.ones_like(a, dtype=bool)
    mins[0, :] = mins[-1, :] = False
    mins[:, 0] = mins[:, -1] = False
    for dx in (-1, 0, 1):
        for dy in (-1, 0, 1):
            if dx == 0 and dy == 0:
                continue
            shifted = np.roll(np.roll(a, dx, 0), dy, 1)
            mins[1:-1, 1:-1] &= a[1:-1, 1:-1] <= shifted[1:-1, 1:-1]

    h = 1e-7
    roots = []
    for z in lam[mins]:
        z = complex(z)
        settled = False
        for _ in range(80):
            dp = (detf(z + h) - detf(z - h)) / (2.0 * h)
            if dp == 0:
                break
            step = detf(z) / dp
            z -= step
            if abs(step) < 1e-12 * max(1.0, abs(z)):
                settled = True
                break
        if not settled or abs(detf(z)) >= det_tol:
            continue
        if z.real < re_lo - 1e-6 or abs(z.imag) > im_hi + 1e-6:
            continue
        z = complex(z.real, 0.0) if abs(z.imag) <= 1e-6 else complex(z.real, abs(z.imag))
        if not any(abs(z - r) < 1e-6 for r in roots):
            roots.append(z)
    return sorted(roots, key=lambda z: (-z.real, z.imag))


def envelope(t, c0, c1, rho, gamma):
    """c0 e^{-gamma t} + c0 c1 (e^{(c1+rho/2)t} - e^{-gamma t}) / (c1+rho/2+gamma)."""
    t = np.asarray(t, dtype=float)
    base = c0 * np.exp(-gamma * t)
    if c1 == 0.0:
        return base
    a = c1 + rho / 2.0
    return base + c0 * c1 * (np.exp(a * t) - np.exp(-gamma * t)) / (a + gamma)


def first_time_below(c0, c1, rho, gamma, level=1.0, t_max=200.0, npts=2_000_001):
    """Brute linear-grid search for the first time the envelope drops below level."""
    t = np.linspace(0.0, t_max, npts)
    below = t[envelope(t, c0, c1, rho, gamma) < level]
    return float(below[0]) if below.size else None
