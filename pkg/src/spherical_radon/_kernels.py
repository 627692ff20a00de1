"""Compiled inner loops (numba). Callers in forward/backprojection own the contracts."""
import math

import numba
import numpy as np

# prefer OpenMP: an old system TBB otherwise triggers a warning on first use
numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]

GAUSS = 0
BUMP = 1
# exp(-x) is exactly 0.0 in double precision once x > ~745.2
_GAUSS_CUT = 750.0


@numba.njit(cache=True)
def _component(kind, cx, cy, w, a, px, py):
    dx = px - cx
    dy = py - cy
    d2 = dx * dx + dy * dy
    if kind == GAUSS:
        return a * math.exp(-d2 / (2.0 * w * w))
    t2 = d2 / (w * w)
    if t2 >= 1.0:
        return 0.0
    return a * math.exp(-1.0 / (1.0 - t2))


@numba.njit(cache=True)
def _reach(kind, w):
    if kind == GAUSS:
        return math.sqrt(2.0 * _GAUSS_CUT) * w * 1.0001
    return w * 1.0001


@numba.njit(cache=True)
def _active_intervals(kinds, cxs, cys, ws, x, r, M, starts, stops):
    """Merged, ascending index intervals [start, stop) of nodes that can be nonzero."""
    step = 2.0 * math.pi / M
    n = 0
    for c in range(kinds.size):
        ux = x - cxs[c]
        uy = -cys[c]
        dc = math.hypot(ux, uy)
        D = _reach(kinds[c], ws[c])
        if dc == 0.0 or r == 0.0:
            if abs(r - dc) < D:
                starts[n] = 0
                stops[n] = M
                n += 1
            continue
        c0 = (D * D - dc * dc - r * r) / (2.0 * r * dc)
        if c0 <= -1.0:
            continue
        if c0 >= 1.0:
            starts[n] = 0
            stops[n] = M
            n += 1
            continue
        alpha = math.acos(-c0)
        centre = math.atan2(uy, ux) + math.pi
        lo = int(math.floor((centre - alpha) / step)) - 1
        hi = int(math.ceil((centre + alpha) / step)) + 2
        if hi - lo >= M:
            starts[n] = 0
            stops[n] = M
            n += 1
            continue
        lo_m = lo % M
        hi_m = lo_m + (hi - lo)
        if hi_m <= M:
            starts[n] = lo_m
            stops[n] = hi_m
            n += 1
        else:
            starts[n] = lo_m
            stops[n] = M
            n += 1
            starts[n] = 0
            stops[n] = hi_m - M
            n += 1
    if n == 0:
        return 0
    order = np.argsort(starts[:n])
    s_sorted = starts[:n][order].copy()
    e_sorted = stops[:n][order].copy()
    m = 0
    for i in range(n):
        if m > 0 and s_sorted[i] <= stops[m - 1]:
            if e_sorted[i] > stops[m - 1]:
                stops[m - 1] = e_sorted[i]
        else:
            starts[m] = s_sorted[i]
            stops[m] = e_sorted[i]
            m += 1
    return m


@numba.njit(cache=True)
def circular_means(kinds, cxs, cys, ws, amps, xs, rs, M):
    """(1/M) sum_k f(x + r cos t_k, r sin t_k) for every (x, r) pair of the grid.

    Nodes outside every component's effective support are skipped; their
    terms are exactly 0.0, so the ascending-order sum is unchanged bitwise.
    """
    out = np.zeros((xs.size, rs.size))
    k = np.arange(M) * (2.0 * math.pi / M)
    ct = np.cos(k)
    st = np.sin(k)
    nc = kinds.size
    starts = np.empty(2 * nc + 1, dtype=np.int64)
    stops = np.empty(2 * nc + 1, dtype=np.int64)
    for i in range(xs.size):
        x = xs[i]
        for j in range(rs.size):
            r = rs[j]
            m = _active_intervals(kinds, cxs, cys, ws, x, r, M, starts, stops)
            acc = 0.0
            for q in range(m):
                for kk in range(starts[q], stops[q]):
                    px = x + r * ct[kk]
                    py = r * st[kk]
                    v = 0.0
                    for c in range(nc):
                        v += _component(kinds[c], cxs[c], cys[c], ws[c], amps[c], px, py)
                    acc += v
            out[i, j] = acc / M
    return out


@numba.njit(cache=True, inline="always")
def _radial_lookup(row, h, s, odd):
    """Cubic 4-point interpolation of one sinogram row at radius s.

    Indices below 0 are reflected (even or odd continuation in r); lookups
    past the last sample return (0, True).
    """
    n = row.size
    u = s / h
    if u > n - 1 + 1e-9:
        return 0.0, True
    base = int(math.floor(u))
    start = base - 1
    if start > n - 4:
        start = n - 4
    t = u - (start + 1)
    w0 = -t * (t - 1.0) * (t - 2.0) / 6.0
    w1 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0
    w2 = -(t + 1.0) * t * (t - 2.0) / 2.0
    w3 = (t + 1.0) * t * (t - 1.0) / 6.0
    acc = 0.0
    for k in range(4):
        idx = start + k
        sign = 1.0
        if idx < 0:
            idx = -idx
            if odd:
                sign = -1.0
        wk = w0 if k == 0 else (w1 if k == 1 else (w2 if k == 2 else w3))
        acc += wk * sign * row[idx]
    return acc, False


@numba.njit(cache=True, parallel=True)
def backproject_points(values, z0, dz, h, xs, ys, Z, deriv):
    """Truncated trapezoid z-integrals for every (xs[i], ys[j]) pair.

    Classical: ``int g(z, s) dz``; with ``deriv``: ``int (y / s) dg/dr(z, s) dz``
    (``values`` must then hold dg/dr), ``s = sqrt((x - z)^2 + y^2)``,
    over ``|z - x| <= Z``. Returns (integrals, number of clipped lookups,
    number of lookups).
    """
    nz = values.shape[0]
    out = np.zeros((xs.size, ys.size))
    clipped = np.zeros(xs.size, dtype=np.int64)
    total = np.zeros(xs.size, dtype=np.int64)
    tol = 1e-9 * dz
    for i in numba.prange(xs.size):
        x = xs[i]
        k_lo = int(math.ceil((x - Z - z0 - tol) / dz))
        k_hi = int(math.floor((x + Z - z0 + tol) / dz))
        if k_lo < 0:
            k_lo = 0
        if k_hi > nz - 1:
            k_hi = nz - 1
        for j in range(ys.size):
            y = ys[j]
            acc = 0.0
            for k in range(k_lo, k_hi + 1):
                z = z0 + k * dz
                d = x - z
                s = math.sqrt(d * d + y * y)
                v, c = _radial_lookup(values[k], h, s, deriv)
                total[i] += 1
                if c:
                    clipped[i] += 1
                    continue
                if deriv:
                    if s == 0.0:
                        continue
                    v = v * y / s
                wgt = 0.5 if (k == k_lo or k == k_hi) else 1.0
                acc += wgt * v
            out[i, j] = acc * dz
    return out, clipped.sum(), total.sum()
