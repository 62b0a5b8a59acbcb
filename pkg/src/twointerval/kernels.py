"""Hot numerical kernels with a compiled path and a numpy path.

Each kernel exists as ``<name>_loop`` (scalar loops, compiled by numba when
enabled) and ``<name>_numpy`` (vectorized numpy). The public name dispatches
on :data:`twointerval._accel.NUMBA_ENABLED`.
"""

import numpy as np

from ._accel import NUMBA_ENABLED, njit

# ---------------------------------------------------------------------------
# Unpivoted LU pivots (the eta ladder)


def lu_ladder_loop(mat, rel_tol):
    """Doolittle elimination without pivoting, returning the pivots.

    Returns ``(etas, fail)`` where ``fail`` is the 0-based index of the first
    pivot whose modulus falls below ``rel_tol * max|mat|`` (or -1).
    """
    n = mat.shape[0]
    a = mat.copy()
    etas = np.zeros(n, dtype=np.complex128)
    scale = 0.0
    for i in range(n):
        for j in range(n):
            v = abs(a[i, j])
            if v > scale:
                scale = v
    if scale == 0.0:
        scale = 1.0
    for p in range(n):
        piv = a[p, p]
        etas[p] = piv
        if abs(piv) <= rel_tol * scale:
            return etas, p
        for i in range(p + 1, n):
            factor = a[i, p] / piv
            if factor != 0.0:
                for j in range(p + 1, n):
                    a[i, j] -= factor * a[p, j]
    return etas, -1


def lu_ladder_numpy(mat, rel_tol):
    a = np.array(mat, dtype=np.complex128, copy=True)
    n = a.shape[0]
    etas = np.zeros(n, dtype=np.complex128)
    scale = float(np.max(np.abs(a))) if n else 1.0
    if scale == 0.0:
        scale = 1.0
    for p in range(n):
        piv = a[p, p]
        etas[p] = piv
        if abs(piv) <= rel_tol * scale:
            return etas, p
        factors = a[p + 1:, p] / piv
        a[p + 1:, p + 1:] -= np.outer(factors, a[p, p + 1:])
    return etas, -1


# ---------------------------------------------------------------------------
# Dispersion roots: bracketed bisection between the poles of the self energy


def _secular(w, e, poles, c2):
    s = 0.0
    for i in range(poles.shape[0]):
        s += c2[i] / (w - poles[i])
    return w - e - s


def _secular_slope(w, poles, c2):
    s = 0.0
    for i in range(poles.shape[0]):
        d = w - poles[i]
        s += c2[i] / (d * d)
    return 1.0 + s


def dispersion_roots_loop(energies, poles, c2):
    """All roots of ``w - e - sum c2/(w - G) = 0`` for each ``e``.

    ``poles`` must be strictly increasing and ``c2`` strictly positive. The
    function is increasing between consecutive poles, so each of the
    ``len(poles) + 1`` brackets holds exactly one root.
    """
    npts = energies.shape[0]
    nlev = poles.shape[0]
    out = np.empty((npts, nlev + 1))
    for ip in range(npts):
        e = energies[ip]
        for b in range(nlev + 1):
            if b == 0:
                hi = poles[0]
                step = 1.0 + abs(e - hi)
                lo = min(e, hi) - step
                while _secular(lo, e, poles, c2) > 0.0:
                    step *= 2.0
                    lo = hi - step
            elif b == nlev:
                lo = poles[nlev - 1]
                step = 1.0 + abs(e - lo)
                hi = max(e, lo) + step
                while _secular(hi, e, poles, c2) < 0.0:
                    step *= 2.0
                    hi = lo + step
            else:
                lo = poles[b - 1]
                hi = poles[b]
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if mid <= lo or mid >= hi:
                    break
                if _secular(mid, e, poles, c2) < 0.0:
                    lo = mid
                else:
                    hi = mid
            w = 0.5 * (lo + hi)
            # one safeguarded Newton polish, kept only inside the bracket
            cand = w - _secular(w, e, poles, c2) / _secular_slope(w, poles, c2)
            if lo < cand < hi:
                w = cand
            out[ip, b] = w
    return out


def dispersion_roots_numpy(energies, poles, c2):
    energies = np.asarray(energies, dtype=float)
    poles = np.asarray(poles, dtype=float)
    c2 = np.asarray(c2, dtype=float)
    npts, nlev = energies.shape[0], poles.shape[0]

    def secular(w):
        # w has shape (npts, nlev + 1)
        return w - energies[:, None] - np.sum(
            c2 / (w[..., None] - poles), axis=-1)

    lo = np.empty((npts, nlev + 1))
    hi = np.empty((npts, nlev + 1))
    lo[:, 1:] = poles
    hi[:, :-1] = poles

    # outer brackets grow geometrically until the sign is right
    step = 1.0 + np.abs(energies - poles[0])
    lo[:, 0] = np.minimum(energies, poles[0]) - step
    step_hi = 1.0 + np.abs(energies - poles[-1])
    hi[:, -1] = np.maximum(energies, poles[-1]) + step_hi
    for _ in range(200):
        w = np.stack([lo[:, 0], hi[:, -1]], axis=1)
        vals = w - energies[:, None] - np.sum(
            c2 / (w[..., None] - poles), axis=-1)
        bad_lo = vals[:, 0] > 0.0
        bad_hi = vals[:, 1] < 0.0
        if not (bad_lo.any() or bad_hi.any()):
            break
        step = np.where(bad_lo, 2.0 * step, step)
        step_hi = np.where(bad_hi, 2.0 * step_hi, step_hi)
        lo[:, 0] = np.where(bad_lo, poles[0] - step, lo[:, 0])
        hi[:, -1] = np.where(bad_hi, poles[-1] + step_hi, hi[:, -1])

    for _ in range(200):
        mid = 0.5 * (lo + hi)
        active = (mid > lo) & (mid < hi)
        if not active.any():
            break
        neg = secular(mid) < 0.0
        lo = np.where(active & neg, mid, lo)
        hi = np.where(active & ~neg, mid, hi)
    w = 0.5 * (lo + hi)
    slope = 1.0 + np.sum(c2 / (w[..., None] - poles) ** 2, axis=-1)
    cand = w - secular(w) / slope
    return np.where((cand > lo) & (cand < hi), cand, w)


# ---------------------------------------------------------------------------
# Taylor-series continuation of z w'' + (1 - z) w' - a w = 0


def kummer_taylor_walk_loop(a, z_start, w, dw, z_end, max_ratio, max_step):
    """Carry ``(w, w')`` of a solution of the b = 1 Kummer equation along the
    straight segment from ``z_start`` to ``z_end``.

    Each step uses a local Taylor expansion whose step length is at most
    ``max_ratio`` times the distance to the singular point at the origin and
    at most ``max_step``; the cap bounds the growth of rounding errors along
    the ``e^z`` solution within one expansion.
    Returns ``(w, dw, nsteps, ok)``.
    """
    z0 = z_start
    total = z_end - z_start
    dist = abs(total)
    if dist == 0.0:
        return w, dw, 0, True
    direction = total / dist
    travelled = 0.0
    nsteps = 0
    while travelled < dist:
        h_len = min(max_ratio * abs(z0), max_step, dist - travelled)
        if h_len <= 0.0:
            return w, dw, nsteps, False
        h = direction * h_len
        if dist - travelled - h_len < 1e-14 * dist:
            h = z_end - z0
            h_len = dist - travelled
        # scaled coefficients d_n = c_n h^n
        d_prev = w
        d_cur = dw * h
        val = d_prev + d_cur
        der = d_cur
        small = 0
        converged = False
        for n in range(0, 400):
            d_next = -((n + 1) * (n + 1 - z0) * d_cur * h
                       - (n + a) * d_prev * h * h) / (z0 * (n + 2) * (n + 1))
            val += d_next
            der += (n + 2) * d_next
            scale = abs(val) + abs(der)
            if abs(d_next) * (n + 3) <= 1e-17 * scale:
                small += 1
                if small >= 3:
                    converged = True
                    break
            else:
                small = 0
            d_prev = d_cur
            d_cur = d_next
        if not converged:
            return w, dw, nsteps, False
        w = val
        dw = der / h
        z0 = z0 + h
        travelled += h_len
        nsteps += 1
    return w, dw, nsteps, True


kummer_taylor_walk_numpy = kummer_taylor_walk_loop


# ---------------------------------------------------------------------------
# dispatch

if NUMBA_ENABLED:
    lu_ladder_jit = njit(cache=True)(lu_ladder_loop)
    _secular = njit(cache=True)(_secular)
    _secular_slope = njit(cache=True)(_secular_slope)
    dispersion_roots_jit = njit(cache=True)(dispersion_roots_loop)
    kummer_taylor_walk_jit = njit(cache=True)(kummer_taylor_walk_loop)

    def lu_ladder(mat, rel_tol=1e-14):
        return lu_ladder_jit(np.ascontiguousarray(mat, dtype=np.complex128),
                             float(rel_tol))

    def dispersion_roots(energies, poles, c2):
        return dispersion_roots_jit(
            np.ascontiguousarray(energies, dtype=np.float64),
            np.ascontiguousarray(poles, dtype=np.float64),
            np.ascontiguousarray(c2, dtype=np.float64))

    def kummer_taylor_walk(a, z_start, w, dw, z_end, max_ratio=0.35, max_step=2.0):
        return kummer_taylor_walk_jit(complex(a), complex(z_start), complex(w),
                                      complex(dw), complex(z_end),
                                      float(max_ratio), float(max_step))
else:
    def lu_ladder(mat, rel_tol=1e-14):
        return lu_ladder_numpy(mat, rel_tol)

    def dispersion_roots(energies, poles, c2):
        return dispersion_roots_numpy(energies, poles, c2)

    def kummer_taylor_walk(a, z_start, w, dw, z_end, max_ratio=0.35, max_step=2.0):
        return kummer_taylor_walk_numpy(complex(a), complex(z_start), complex(w),
                                        complex(dw), complex(z_end),
                                        float(max_ratio), float(max_step))
