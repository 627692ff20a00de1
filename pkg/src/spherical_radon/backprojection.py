"""Backprojection operators on sinograms and the truncation probe.

``backproject`` is the classical adjoint-type integral over the track,
``backproject_deriv`` the modified operator that differentiates the data in
y before integrating. The classical integral diverges like ``ln Z`` on data
from a non-negative scene; the modified one converges.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import interpolate

from ._kernels import backproject_points
from .core import AxisSpec, FieldGrid, Sinogram

log = logging.getLogger(__name__)

__all__ = [
    "DivergenceTable",
    "backproject",
    "backproject_deriv",
    "deriv_truncation_tail",
    "divergence_probe",
    "radial_derivative",
    "ridge_projection",
]

_OPERATORS = ("classical", "modified")


def radial_derivative(g: Sinogram) -> Sinogram:
    """dg/dr by fourth-order differences.

    Interior samples use the central 5-point stencil, with the even
    continuation ``g(x, -r) = g(x, r)`` near r = 0 (so the r = 0 column is
    exactly 0) and one-sided 5-point stencils at the outer edge. All
    stencils are exact for quartics.
    """
    n = g.r_axis.count
    if n < 5:
        raise ValueError("radial derivative needs at least 5 radius samples")
    v = g.values
    h = g.r_axis.spacing
    ext = np.concatenate([v[:, 2:0:-1], v], axis=1)  # columns r_2, r_1, r_0, ...
    d = np.empty_like(v)
    m = n - 2
    d[:, :m] = (ext[:, 0:m] - 8 * ext[:, 1:m + 1] + 8 * ext[:, 3:m + 3] - ext[:, 4:m + 4]) / (12 * h)
    j = n - 2
    d[:, j] = (3 * v[:, j + 1] + 10 * v[:, j] - 18 * v[:, j - 1] + 6 * v[:, j - 2]
               - v[:, j - 3]) / (12 * h)
    j = n - 1
    d[:, j] = (25 * v[:, j] - 48 * v[:, j - 1] + 36 * v[:, j - 2] - 16 * v[:, j - 3]
               + 3 * v[:, j - 4]) / (12 * h)
    d[:, 0] = 0.0
    return Sinogram(g.x_axis, g.r_axis, d)


def _integrate(g: Sinogram, xs, ys, Z, deriv):
    if not Z > 0:
        raise ValueError("truncation half-width must be positive")
    vals = np.ascontiguousarray(g.values, dtype=np.float64)
    out, clipped, total = backproject_points(
        vals, g.x_axis.min, g.x_axis.spacing, g.r_axis.spacing,
        np.ascontiguousarray(xs, dtype=np.float64), np.ascontiguousarray(ys, dtype=np.float64),
        float(Z), deriv)
    frac = clipped / total if total else 0.0
    if frac > 0:
        log.info("backprojection clipped %.3g of radial lookups beyond r_max", frac)
    return out, frac


def _half_grid(y_axis: AxisSpec):
    if not y_axis.is_symmetric:
        raise ValueError("y axis must be symmetric about 0 with an odd count")
    half = y_axis.count // 2
    return y_axis.coords[half:], half


def _mirror(upper, odd):
    lower = upper[:, :0:-1]
    if odd:
        lower = -lower
    return np.concatenate([lower, upper], axis=1)


def backproject(g: Sinogram, x_axis: AxisSpec, y_axis: AxisSpec, Z: float,
                *, return_clipping: bool = False):
    """Classical backprojection ``int_{|z - x| <= Z} g(z, sqrt((x - z)^2 + y^2)) dz``.

    Trapezoid rule over the sinogram's x samples inside the window; radial
    lookups are cubic and 0 beyond r_max. Computed for y >= 0 and mirrored,
    so the output is exactly even in y.
    """
    ys, _ = _half_grid(y_axis)
    upper, frac = _integrate(g, x_axis.coords, ys, Z, False)
    u = FieldGrid(x_axis, y_axis, _mirror(upper, False))
    return (u, frac) if return_clipping else u


def backproject_deriv(g: Sinogram, x_axis: AxisSpec, y_axis: AxisSpec, Z: float,
                      *, return_clipping: bool = False, dg: Sinogram | None = None):
    """Modified backprojection ``int_{|z - x| <= Z} d/dy g(z, sqrt((x - z)^2 + y^2)) dz``.

    The y-derivative is taken by the chain rule, ``(y / s) dg/dr(z, s)``, with
    dg/dr from :func:`radial_derivative` (pass ``dg`` to reuse one). The
    output is exactly odd in y.
    """
    ys, _ = _half_grid(y_axis)
    if dg is None:
        dg = radial_derivative(g)
    upper, frac = _integrate(dg, x_axis.coords, ys, Z, True)
    upper[:, 0] = 0.0
    u = FieldGrid(x_axis, y_axis, _mirror(upper, True))
    return (u, frac) if return_clipping else u


def ridge_projection(g: Sinogram, w_lo: float, w_hi: float):
    """Projection ``P(w) = int f(w, y) dy`` on ``[w_lo, w_hi]`` from the far-field ridges.

    At radius rho, ``g(z, rho) ~ (P(z + rho) + P(z - rho)) / (2 pi rho)``, and
    the circle's curvature shifts the two ridges in opposite directions, so
    ``P(w) ~ pi rho (g(w - rho, rho) + g(w + rho, rho))`` up to O(rho^-2).
    rho is the largest radius sample keeping both lookups inside the x
    window. Returns a cubic spline of P and the radius used.
    """
    xs = g.x_axis.coords
    rs = g.r_axis.coords
    h = g.x_axis.spacing
    limit = min(w_lo - xs[0], xs[-1] - w_hi) + 1e-9 * h
    ok = np.nonzero((rs <= limit) & (rs > 0))[0]
    if ok.size == 0:
        raise ValueError("sinogram x window too narrow for a ridge estimate")
    rho = float(rs[ok[-1]])
    col = interpolate.CubicSpline(xs, g.values[:, ok[-1]])
    n = max(int(math.ceil((w_hi - w_lo) / h)), 3) + 1
    w = np.linspace(w_lo, w_hi, n)
    P = math.pi * rho * (col(w - rho) + col(w + rho))
    return interpolate.CubicSpline(w, P), rho


def deriv_truncation_tail(g: Sinogram, x_axis: AxisSpec, y_axis: AxisSpec, Z: float,
                          *, nodes: int = 32) -> FieldGrid:
    """Far-field estimate of the part of the modified backprojection beyond ``|z - x| > Z``.

    For large |z - x| the data along the integration path sits on a ridge,
    ``g(z, s) ~ P(z -/+ s) / (2 pi s)``. With ``v = s - |z - x|`` the two
    outer pieces become one integral over ``0 < v < v_Z = sqrt(Z^2 + y^2) - Z``:

        (y / pi) int [P'(x + v) - P'(x - v) - 2 v (P(x + v) + P(x - v)) / (y^2 + v^2)]
                     / (y^2 + v^2) dv

    evaluated by Gauss-Legendre quadrature. The truncation error it removes
    grows like ``y^3 P'' / Z^2``, which matters at the top of tall boxes.
    Output is odd in y.
    """
    ys, _ = _half_grid(y_axis)
    vmax = math.hypot(Z, ys[-1]) - Z
    xs = x_axis.coords
    pad = vmax + g.x_axis.spacing
    P, _ = ridge_projection(g, xs[0] - pad, xs[-1] + pad)
    dP = P.derivative()
    t, w = np.polynomial.legendre.leggauss(nodes)
    upper = np.zeros((xs.size, ys.size))
    for jj in range(1, ys.size):
        y = ys[jj]
        vz = math.hypot(Z, y) - Z
        v = 0.5 * vz * (t + 1)
        wv = 0.5 * vz * w
        q = y * y + v * v
        xp = xs[:, None] + v[None, :]
        xm = xs[:, None] - v[None, :]
        f = (dP(xp) - dP(xm) - 2 * v * (P(xp) + P(xm)) / q) / q
        upper[:, jj] = y / math.pi * (f @ wv)
    return FieldGrid(x_axis, y_axis, _mirror(upper, True))


@dataclass(frozen=True)
class DivergenceTable:
    """Truncated backprojection values at one point, with a fit ``a + b ln Z``."""

    operator: str
    point: tuple[float, float]
    Z: tuple[float, ...]
    values: tuple[float, ...]
    slope_b: float
    intercept_a: float
    r_squared: float
    clipped_fraction: float = 0.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.Z, self.Z[1:])):
            raise ValueError("Z values must be strictly increasing")

    @property
    def rows(self):
        return list(zip(self.Z, self.values))

    def last_increment(self) -> float:
        """``|value(Z_last) - value(Z_prev)| / max|value|`` (0 for an all-zero table)."""
        scale = max(abs(v) for v in self.values)
        if scale == 0.0 or len(self.values) < 2:
            return 0.0
        return abs(self.values[-1] - self.values[-2]) / scale


def _log_fit(Z, v):
    """OLS of v on ln Z: (slope, intercept, r^2). r^2 is nan with < 4 rows or flat data."""
    if len(Z) < 2:
        return math.nan, math.nan, math.nan
    X = np.log(np.asarray(Z, dtype=np.float64))
    y = np.asarray(v, dtype=np.float64)
    b, a = np.polyfit(X, y, 1)
    if len(Z) < 4:
        return float(b), float(a), math.nan
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return float(b), float(a), math.nan
    ss_res = float(np.sum((y - (a + b * X)) ** 2))
    return float(b), float(a), 1.0 - ss_res / ss_tot


def divergence_probe(g: Sinogram, x0: float, y0: float, Z_list,
                     operator: str = "classical") -> DivergenceTable:
    """Truncated backprojection of g at (x0, y0) for each half-width in ``Z_list``."""
    if operator not in _OPERATORS:
        raise ValueError(f"operator must be one of {_OPERATORS}")
    Zs = tuple(float(z) for z in Z_list)
    if any(b <= a for a, b in zip(Zs, Zs[1:])):
        raise ValueError("Z values must be strictly increasing")
    need = math.hypot(max(abs(x0 - g.x_axis.min), abs(g.x_axis.max - x0)), y0)
    reach = math.hypot(Zs[-1], y0) if Zs else 0.0
    if min(need, reach) > g.r_axis.max:
        log.warning("probe reaches radius %.1f beyond r_max %.1f", min(need, reach), g.r_axis.max)
    deriv = operator == "modified"
    data = radial_derivative(g) if deriv else g
    vals = []
    worst = 0.0
    for Z in Zs:
        out, frac = _integrate(data, np.array([float(x0)]), np.array([abs(float(y0))]), Z, deriv)
        v = float(out[0, 0])
        if deriv and y0 < 0:
            v = -v
        vals.append(v)
        worst = max(worst, frac)
    b, a, r2 = _log_fit(Zs, vals)
    return DivergenceTable(operator, (float(x0), float(y0)), Zs, tuple(vals), b, a, r2, worst)
