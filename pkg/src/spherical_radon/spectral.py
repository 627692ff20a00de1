"""Fourier-side machinery: transforms, the two-way g^/f^ relations and multipliers.

Convention: forward kernel ``exp(-i<k, x>)`` and inverse kernel ``exp(+i<k, x>)``
with prefactor ``(2 pi)^-d``. Discrete transforms are Riemann sums (multiplied
by the cell measure) so that grid spectra approximate the continuous ones and
the constants of the inversion formulas apply unchanged.

Frequency axes are ascending (fft-shifted). A grid of N samples with spacing
h maps to frequencies ``(k - N//2) * 2 pi / (N h)``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from .core import (AxisSpec, DataSpectrum, DimensionConfig, FieldGrid, FieldSpectrum,
                   Sinogram, make_dimension_config)

log = logging.getLogger(__name__)

__all__ = [
    "NormScanTable",
    "apply_K",
    "cone_limit",
    "data_spectrum_to_sinogram",
    "fhat_from_ghat",
    "fhat_pointwise",
    "field_to_spectrum",
    "fractional_laplacian",
    "forward_transform_1d",
    "frequency_axis",
    "inverse_transform_1d",
    "ghat_from_fhat",
    "ghat_pointwise",
    "sample_cone_interior",
    "hilbert_y",
    "norm_window_scan",
    "sinogram_to_data_spectrum",
    "spectrum_to_field",
    "spatial_axis",
]


def frequency_axis(axis: AxisSpec) -> AxisSpec:
    """Ascending angular-frequency axis conjugate to a spatial axis."""
    n = axis.count
    dk = 2.0 * math.pi / (n * axis.spacing)
    return AxisSpec(n, -(n // 2) * dk, dk)


def spatial_axis(freq: AxisSpec, x_min: float | None = None) -> AxisSpec:
    """Spatial axis whose :func:`frequency_axis` is ``freq`` (centred unless ``x_min`` given)."""
    n = freq.count
    h = 2.0 * math.pi / (n * freq.spacing)
    if x_min is None:
        x_min = -(n // 2) * h
    return AxisSpec(n, x_min, h)


def _check_conjugate(freq: AxisSpec, axis: AxisSpec, name: str):
    want = frequency_axis(axis)
    if freq.count != want.count or not math.isclose(freq.spacing, want.spacing, rel_tol=1e-9):
        raise ValueError(f"{name} frequency axis is not conjugate to the target grid")


def _fwd(values: np.ndarray, axis: AxisSpec, dim: int) -> np.ndarray:
    k = frequency_axis(axis).coords
    out = np.fft.fftshift(np.fft.fft(values, axis=dim), axes=dim)
    shape = [1] * values.ndim
    shape[dim] = -1
    return out * (axis.spacing * np.exp(-1j * k * axis.min)).reshape(shape)


def _inv(values: np.ndarray, axis: AxisSpec, dim: int) -> np.ndarray:
    k = frequency_axis(axis).coords
    shape = [1] * values.ndim
    shape[dim] = -1
    v = values * np.exp(1j * k * axis.min).reshape(shape)
    return np.fft.ifft(np.fft.ifftshift(v, axes=dim), axis=dim) / axis.spacing


def forward_transform_1d(values: np.ndarray, axis: AxisSpec, dim: int = 0) -> np.ndarray:
    """Riemann-sum transform of samples on ``axis`` along array dimension ``dim``."""
    return _fwd(np.asarray(values), axis, dim)


def inverse_transform_1d(values: np.ndarray, axis: AxisSpec, dim: int = 0) -> np.ndarray:
    """Inverse of :func:`forward_transform_1d` back onto ``axis`` (complex result)."""
    return _inv(np.asarray(values), axis, dim)


def field_to_spectrum(u: FieldGrid) -> FieldSpectrum:
    """Riemann-sum 2D transform of a sampled field."""
    vals = _fwd(_fwd(u.values, u.x_axis, 0), u.y_axis, 1)
    if u.y_axis.is_symmetric:
        # an even field has an even spectrum in eta; remove rounding asymmetry
        vals = 0.5 * (vals + vals[:, ::-1])
    return FieldSpectrum(frequency_axis(u.x_axis), frequency_axis(u.y_axis), vals,
                         meta={"x_min": u.x_axis.min, "y_min": u.y_axis.min})


def spectrum_to_field(F: FieldSpectrum, x_axis: AxisSpec, y_axis: AxisSpec,
                      *, residue_tol: float = 1e-8) -> tuple[FieldGrid, float]:
    """Inverse 2D transform onto ``x_axis`` x ``y_axis``; returns (field, imaginary residue).

    The residue is ``max|Im| / max|Re|`` of the inverse before the imaginary
    part is discarded.
    """
    _check_conjugate(F.xi_axis, x_axis, "xi")
    _check_conjugate(F.eta_axis, y_axis, "eta")
    vals = _inv(_inv(F.values, x_axis, 0), y_axis, 1)
    residue = _residue(vals)
    if residue > residue_tol:
        log.warning("inverse transform imaginary residue %.3g", residue)
    return FieldGrid(x_axis, y_axis, vals.real), residue


def _residue(vals: np.ndarray) -> float:
    scale = np.max(np.abs(vals.real)) if vals.size else 0.0
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(vals.imag)) / scale)


# ---------------------------------------------------------------------------
# multipliers on spatial grids

def hilbert_y(u: FieldGrid) -> FieldGrid:
    """Hilbert transform along y: multiplier ``-i sgn(eta)`` with ``sgn(0) = 0``.

    The transform is periodic on the sampled window; for even counts the
    Nyquist bin is also zeroed so that real input gives real output.
    """
    n = u.y_axis.count
    spec = np.fft.fft(u.values, axis=1)
    k = np.fft.fftfreq(n)
    mult = -1j * np.sign(k)
    if n % 2 == 0:
        mult[n // 2] = 0.0
    out = np.fft.ifft(spec * mult[None, :], axis=1).real
    return FieldGrid(u.x_axis, u.y_axis, out)


def fractional_laplacian(u: FieldGrid, cfg: DimensionConfig) -> FieldGrid:
    """Multiplier ``(xi^2 + eta^2)^((n-1)/2)``; the identity (same object) for n = 1."""
    if cfg.n == 1:
        return u
    kx = 2 * math.pi * np.fft.fftfreq(u.x_axis.count, u.x_axis.spacing)
    ky = 2 * math.pi * np.fft.fftfreq(u.y_axis.count, u.y_axis.spacing)
    mult = (kx[:, None] ** 2 + ky[None, :] ** 2) ** ((cfg.n - 1) / 2)
    out = np.fft.ifft2(np.fft.fft2(u.values) * mult).real
    return FieldGrid(u.x_axis, u.y_axis, out)


# ---------------------------------------------------------------------------
# pointwise forms of the g^ <-> f^ relations

def ghat_pointwise(fhat_at, xi, s, cfg: DimensionConfig, *, band: float = 0.0):
    """g^(xi, s) from f^ already evaluated at ``(xi, sqrt(s^2 - |xi|^2))``.

    Zero on and below the cone and wherever ``s^2 - xi^2 < band^2``.
    """
    xi = np.abs(np.asarray(xi, dtype=np.float64))
    s = np.asarray(s, dtype=np.float64)
    t = s * s - xi * xi
    inside = (t > band * band) & (t > 0)
    root = np.sqrt(np.where(inside, t, 1.0))
    sn = np.where(inside, s, 1.0) ** (cfg.n - 1)
    const = (2 * math.pi) ** cfg.n * 2.0 / cfg.sphere_area
    return np.where(inside, const * np.asarray(fhat_at) / (sn * root), 0.0)


def fhat_pointwise(ghat_at, xi, eta, cfg: DimensionConfig):
    """f^(xi, eta) from g^ already evaluated at ``(xi, sqrt(|xi|^2 + eta^2))``."""
    xi = np.asarray(xi, dtype=np.float64)
    eta = np.asarray(eta, dtype=np.float64)
    return (cfg.c_n * np.abs(eta) * (xi * xi + eta * eta) ** ((cfg.n - 1) / 2)
            * np.asarray(ghat_at))


# ---------------------------------------------------------------------------
# cubic interpolation on uniform axes

def _cubic_weights(t: np.ndarray):
    """Lagrange weights for nodes -1, 0, 1, 2 at fractional offset t in [0, 1)."""
    return (-t * (t - 1) * (t - 2) / 6,
            (t + 1) * (t - 1) * (t - 2) / 2,
            -(t + 1) * t * (t - 2) / 2,
            (t + 1) * t * (t - 1) / 6)


def _cubic_rows(values: np.ndarray, axis: AxisSpec, pos: np.ndarray,
                lo: np.ndarray | None = None, even: bool = False):
    """Interpolate each row of ``values`` at positions ``pos`` (same leading shape).

    ``lo[i]`` is the first usable index of row i (stencils are shifted up so
    they never reach below it). ``even`` reflects rows about index 0 instead.
    Positions outside the axis give 0. Returns (values, inside mask).
    """
    n = axis.count
    u = (pos - axis.min) / axis.spacing
    inside = (u >= -1e-12) & (u <= n - 1 + 1e-12)
    u = np.clip(u, 0.0, n - 1)
    base = np.floor(u).astype(np.int64)
    base = np.minimum(base, n - 2) if n > 1 else base
    start = base - 1
    if lo is not None:
        lo_b = np.broadcast_to(lo.reshape(lo.shape + (1,) * (pos.ndim - lo.ndim)), pos.shape)
        start = np.maximum(start, lo_b)
    if not even:
        start = np.maximum(start, 0)
    start = np.minimum(start, n - 4)
    t = u - (start + 1)
    w = _cubic_weights(t)
    rows = np.arange(values.shape[0]).reshape((-1,) + (1,) * (pos.ndim - 1))
    out = np.zeros(pos.shape, dtype=values.dtype)
    for k in range(4):
        idx = start + k
        if even:
            idx = np.abs(idx)
        out = out + w[k] * values[rows, idx]
    return np.where(inside, out, 0.0), inside


def _default_radial_axis(count: int, spacing: float) -> AxisSpec:
    return AxisSpec(count, 0.0, spacing)


def ghat_from_fhat(F: FieldSpectrum, cfg: DimensionConfig,
                   radial_axis: AxisSpec | None = None) -> DataSpectrum:
    """g^ on a (xi, s) grid from a field spectrum that is even in eta.

    f^ is looked up at ``eta = sqrt(s^2 - xi^2)`` by cubic interpolation along
    eta. Bins on or below the cone, and those with ``s^2 - xi^2`` below half
    a radial cell squared, are set to exactly 0.
    """
    if radial_axis is None:
        half = F.eta_axis.count // 2
        radial_axis = _default_radial_axis(F.eta_axis.count - half, F.eta_axis.spacing)
    xi = F.xi_axis.coords[:, None]
    s = radial_axis.coords[None, :]
    band = 0.5 * radial_axis.spacing
    t = s * s - xi * xi
    inside = t > band * band
    eta = np.sqrt(np.where(inside, t, 0.0))
    eta = np.broadcast_to(eta, (F.xi_axis.count, radial_axis.count))
    fvals, covered = _cubic_rows(F.values, F.eta_axis, eta)
    vals = ghat_pointwise(fvals, xi, s, cfg, band=band)
    vals = np.where(inside, vals, 0.0)
    return DataSpectrum(F.xi_axis, radial_axis, vals,
                        meta={**F.meta, "source": "fhat",
                              "coverage": float(np.mean(covered[inside])) if inside.any() else 1.0})


def _interior(G: DataSpectrum):
    """(t = s^2 - xi^2, mask of bins strictly inside the cone by more than half a cell)."""
    xi = G.xi_axis.coords[:, None]
    s = G.eta_radial_axis.coords[None, :]
    t = s * s - xi * xi
    band = 0.5 * G.eta_radial_axis.spacing
    return t, t > band * band


def _first_interior(inside: np.ndarray) -> np.ndarray:
    n = inside.shape[1]
    lo = np.argmax(inside, axis=1)
    return np.where(inside.any(axis=1), lo, n)


def sample_cone_interior(G: DataSpectrum, eta_axis: AxisSpec, *, cone_root: bool = False
                         ) -> tuple[np.ndarray, np.ndarray]:
    """Values of G at ``(xi, sqrt(xi^2 + eta^2))`` on the grid ``G.xi_axis`` x ``eta_axis``.

    Cubic interpolation along the radial axis with stencils kept strictly
    inside the cone (extrapolating towards it where needed), so the
    interpolated function must be smooth above the cone. With
    ``cone_root`` the product ``sqrt(s^2 - xi^2) G`` is interpolated instead,
    which is ``|eta| G`` at the target and is the smooth quantity when G
    carries an inverse-square-root blow-up at the cone (as g^ does).
    Returns (values, covered mask); lookups beyond the radial axis give 0.
    """
    s_axis = G.eta_radial_axis
    t, inside = _interior(G)
    vals = G.values
    if cone_root:
        vals = vals * np.sqrt(np.where(inside, t, 0.0))
    vals = np.where(inside, vals, 0.0)
    lo = np.minimum(_first_interior(inside), max(s_axis.count - 4, 0))
    xi = G.xi_axis.coords
    s_q = np.sqrt(xi[:, None] ** 2 + eta_axis.coords[None, :] ** 2)
    return _cubic_rows(vals, s_axis, s_q, lo=lo)


def cone_limit(G: DataSpectrum) -> np.ndarray:
    """Limit of G at the cone from inside, per xi row.

    Cubic extrapolation to ``t = s^2 - xi^2 = 0`` through the first four
    interior bins (G smooth in t there, as K g^ is). Rows with fewer than
    four interior bins give 0.
    """
    t, inside = _interior(G)
    n = G.eta_radial_axis.count
    lo = _first_interior(inside)
    ok = lo + 4 <= n
    idx = np.clip(lo[:, None] + np.arange(4)[None, :], 0, n - 1)
    rows = np.arange(t.shape[0])[:, None]
    tt = t[rows, idx]
    vv = G.values[rows, idx]
    out = np.zeros(t.shape[0], dtype=np.result_type(G.values, np.float64))
    for a in range(4):
        L = np.ones(t.shape[0])
        for b in range(4):
            if a != b:
                L = L * (0.0 - tt[:, b]) / np.where(ok, tt[:, a] - tt[:, b], 1.0)
        out = out + L * vv[:, a]
    return np.where(ok, out, 0.0)


def fhat_from_ghat(G: DataSpectrum, cfg: DimensionConfig,
                   eta_axis: AxisSpec | None = None) -> FieldSpectrum:
    """f^(xi, eta) from g^, looking g^ up at ``s = sqrt(xi^2 + eta^2)``.

    The smooth product ``sqrt(s^2 - xi^2) g^`` is what gets interpolated
    (see :func:`sample_cone_interior`); times ``s^(n-1)`` it is the formula's
    ``|eta| (xi^2 + eta^2)^((n-1)/2) g^``, so this is the same relation
    without interpolating across the inverse-square-root blow-up at the
    cone. Lookups beyond the radial axis count as 0; the covered fraction
    is stored in ``meta['coverage']``. The eta = 0 row is 0, as the formula
    dictates.
    """
    s_axis = G.eta_radial_axis
    if eta_axis is None:
        m = s_axis.count - 1
        eta_axis = AxisSpec(2 * m + 1, -m * s_axis.spacing, s_axis.spacing)
    hv, covered = sample_cone_interior(G, eta_axis, cone_root=True)
    eta = eta_axis.coords
    xi = G.xi_axis.coords
    if cfg.n != 1:
        hv = hv * (xi[:, None] ** 2 + eta[None, :] ** 2) ** ((cfg.n - 1) / 2)
    vals = cfg.c_n * hv
    vals[:, np.abs(eta) == 0.0] = 0.0
    return FieldSpectrum(G.xi_axis, eta_axis, vals,
                         meta={**G.meta, "coverage": float(np.mean(covered))})


def apply_K(G: DataSpectrum, cfg: DimensionConfig) -> DataSpectrum:
    """Multiplier ``sqrt(s^2 - xi^2) * s^(n-1)`` inside the cone, exactly 0 elsewhere."""
    xi = G.xi_axis.coords[:, None]
    s = G.eta_radial_axis.coords[None, :]
    t = s * s - xi * xi
    inside = t > 0
    mult = np.where(inside, np.sqrt(np.where(inside, t, 0.0)) * s ** (cfg.n - 1), 0.0)
    vals = np.where(inside, G.values * mult, 0.0)
    return DataSpectrum(G.xi_axis, G.eta_radial_axis, vals, meta=dict(G.meta))


# ---------------------------------------------------------------------------
# mixed FFT / Hankel transforms of sinograms

def _trapezoid_weights(axis: AxisSpec) -> np.ndarray:
    w = np.full(axis.count, axis.spacing)
    w[0] *= 0.5
    w[-1] *= 0.5
    return w


_EDGE_TOL = 1e-6


def _last_clear_column(g: Sinogram) -> int:
    """Largest radius index up to which every column is negligible at both x window edges.

    Past it a ridge at ``x -/+ r`` reaches the window edge; the column no
    longer represents the data on the line, even after the ridge has left
    the window completely.
    """
    v = np.abs(g.values)
    peak = v.max(axis=0)
    edge = np.maximum(v[0], v[-1])
    clear = (edge <= _EDGE_TOL * peak) | (peak == 0.0)
    blocked = np.nonzero(~clear)[0]
    if blocked.size == 0:
        return g.r_axis.count - 1
    return max(int(blocked[0]) - 1, 0)


def _ridge_model(g: Sinogram, xi: np.ndarray, j: int, split: float | None = None):
    """Far-field model of the sinogram from its two ridges at radius index j.

    At large radius rho the circle about (x, 0) meets a concentrated scene
    along a nearly straight chord. Expanding the chord to first order in its
    curvature gives, after the transform in x,

        g_xi(rho) ~ P^ cos(xi rho) / (pi rho) + B sin(xi rho) / rho^2

    with P the projection of f onto the x axis (so P^(xi) = f^(xi, 0)) and
    ``B = xi Q^ / (2 pi)``, Q the second y-moment profile. Each ridge alone
    gives P^ up to the curvature term, which has opposite signs on the two
    sides: their mean is P^ and their difference is B.

    The column is split into its two ridges at ``split`` (default: its
    |g|-weighted centre).
    """
    xs = g.x_axis.coords
    rho = g.r_axis.coords[j]
    col = g.values[:, j]
    weight = np.abs(col)
    if rho == 0.0 or weight.sum() == 0.0:
        z = np.zeros_like(xi, dtype=np.complex128)
        return z, z
    xc = float(np.sum(weight * xs) / weight.sum()) if split is None else split
    ax = g.x_axis
    right = _fwd(np.where(xs > xc, col, 0.0), ax, 0)
    left = _fwd(np.where(xs < xc, col, 0.0), ax, 0)
    centre = np.where(xs == xc, col, 0.0)
    if centre.any():
        c = _fwd(centre, ax, 0)
        right, left = right + 0.5 * c, left + 0.5 * c
    a_plus = 2 * math.pi * rho * np.exp(1j * xi * rho) * right
    a_minus = 2 * math.pi * rho * np.exp(-1j * xi * rho) * left
    # the ridges differ at first order by the curvature term -/+ i xi Q^ / (2 rho)
    B = (a_minus - a_plus) * rho / (2j * math.pi)
    return 0.5 * (a_plus + a_minus), B


_CORE_WIDTH = 8.0


def sinogram_to_data_spectrum(g: Sinogram, cfg: DimensionConfig,
                              radial_axis: AxisSpec | None = None,
                              *, tail_correction: bool = True,
                              support: tuple[float, float] | None = None) -> DataSpectrum:
    """g^(xi, s): transform in x, then order-0 Hankel transform in r.

    ``g^(xi, s) = 2 pi int_0^inf g_xi(rho) J0(s rho) rho drho`` by the trapezoid
    rule over the radius axis, after removing ``g_xi(0)`` times a narrow
    Gaussian (transformed exactly) so the rule keeps its order at rho = 0.

    Data from a scene decays only like 1/rho. With ``tail_correction`` the
    far-field ridge model (see :func:`_ridge_model`) is subtracted before the
    quadrature and its exact transform, ``2 P^ / sqrt(s^2 - xi^2)`` inside
    the cone plus ``2 pi B arcsin(xi / s)``, added back. Bins
    within half a radial cell of the cone receive no singular term. The
    quadrature then ends at the last radius whose ridges are still inside
    the x window. If the scene's x extent ``support = (lo, hi)`` is given,
    that radius and the split between the two ridges follow from the
    geometry alone and the transform is linear in g; otherwise both are read
    off the data.

    The default radial axis has ``count = r_axis.count`` and spacing
    ``pi / r_max``.
    """
    if cfg.n != 1:
        raise ValueError("the sinogram transform is implemented for n = 1 only")
    if radial_axis is None:
        r_max = g.r_axis.max
        radial_axis = _default_radial_axis(g.r_axis.count, math.pi / r_max)
    xi_axis = frequency_axis(g.x_axis)
    xi = xi_axis.coords
    s = radial_axis.coords
    meta = {"x_min": g.x_axis.min, "r_max": g.r_axis.max, "source": "sinogram",
            "tail_correction": bool(tail_correction)}
    j_end = g.r_axis.count - 1
    if tail_correction and support is not None:
        lo, hi = support
        reach = min(lo - g.x_axis.min, g.x_axis.max - hi)
        j_end = min(max(int(math.floor(reach / g.r_axis.spacing + 1e-9)), 0), j_end)
    elif tail_correction:
        j_end = _last_clear_column(g)
        if j_end < g.r_axis.count - 1:
            log.info("ridges leave the x window beyond r = %.4g; quadrature ends there",
                     g.r_axis.coords[j_end])
    r_axis = AxisSpec(j_end + 1, 0.0, g.r_axis.spacing)
    r = r_axis.coords
    wts = _trapezoid_weights(r_axis) if j_end > 0 else np.zeros(1)
    gx = _fwd(g.values[:, :j_end + 1], g.x_axis, 0)
    integrand = gx * (r * wts)[None, :]
    P = None
    if tail_correction and j_end > 0:
        split = None if support is None else 0.5 * (support[0] + support[1])
        P, B = _ridge_model(g, xi, j_end, split)
        meta["ridge_radius"] = float(r[-1])
        # model times rho; sin(xi rho) / rho is continued by xi at rho = 0
        sinc = xi[:, None] * np.sinc(xi[:, None] * r[None, :] / math.pi)
        model = (P[:, None] * np.cos(xi[:, None] * r[None, :]) / math.pi
                 + B[:, None] * sinc)
        integrand = integrand - model * wts[None, :]
    # rho g(rho) is odd at rho = 0, which costs the trapezoid rule an O(h^2)
    # endpoint error at every s; removing g_xi(0) times a Gaussian whose
    # transform is known restores high order.
    a = _CORE_WIDTH * r_axis.spacing
    core = np.exp(-0.5 * (r / a) ** 2)
    g0 = gx[:, 0]
    integrand = integrand - g0[:, None] * (core * r * wts)[None, :]
    J = special.j0(np.outer(r, s))
    vals = 2 * math.pi * (integrand @ J)
    vals = vals + 2 * math.pi * a * a * g0[:, None] * np.exp(-0.5 * (a * s[None, :]) ** 2)
    if P is not None:
        t = s[None, :] ** 2 - xi[:, None] ** 2
        band = 0.5 * radial_axis.spacing
        inside = t > band * band
        vals = vals + np.where(inside, 2 * P[:, None] / np.sqrt(np.where(inside, t, 1.0)), 0.0)
        # int_0^inf sin(a rho) J0(s rho) / rho drho = arcsin(a / s) (|a| < s), sgn(a) pi/2 else
        ratio = np.divide(xi[:, None], s[None, :], out=np.full(t.shape, np.inf),
                          where=s[None, :] > 0)
        asin = np.where(np.abs(ratio) < 1, np.arcsin(np.clip(ratio, -1, 1)),
                        0.5 * math.pi * np.sign(xi[:, None]))
        vals = vals + 2 * math.pi * B[:, None] * asin
    return DataSpectrum(xi_axis, radial_axis, vals, meta=meta)


def data_spectrum_to_sinogram(G: DataSpectrum, r_axis: AxisSpec,
                              x_axis: AxisSpec | None = None,
                              *, residue_tol: float = 1e-8) -> Sinogram:
    """Inverse of :func:`sinogram_to_data_spectrum` (without its tail model).

    Inverse Hankel ``(1/2 pi) int g^(xi, s) J0(s rho) s ds`` by the trapezoid
    rule over the radial axis, then the inverse transform in x. The x grid
    defaults to the one recorded in ``G.meta`` (or a centred grid).
    """
    if r_axis.min != 0.0:
        raise ValueError("radius axis must start at r = 0")
    if x_axis is None:
        x_axis = spatial_axis(G.xi_axis, G.meta.get("x_min"))
    _check_conjugate(G.xi_axis, x_axis, "xi")
    s = G.eta_radial_axis.coords
    rho = r_axis.coords
    w = _trapezoid_weights(G.eta_radial_axis) * s
    # same endpoint treatment as the forward transform: the s = 0 value
    # rides on a Gaussian whose inverse transform is exact
    a = _CORE_WIDTH * G.eta_radial_axis.spacing
    g0 = G.values[:, 0]
    vals = G.values - g0[:, None] * np.exp(-0.5 * (s / a) ** 2)[None, :]
    J = special.j0(np.outer(s, rho))
    gx = (vals * w[None, :]) @ J / (2 * math.pi)
    gx = gx + (a * a / (2 * math.pi)) * g0[:, None] * np.exp(-0.5 * (a * rho[None, :]) ** 2)
    vals = _inv(gx, x_axis, 0)
    residue = _residue(vals)
    if residue > residue_tol:
        log.warning("inverse data transform imaginary residue %.3g", residue)
    else:
        log.debug("inverse data transform imaginary residue %.3g", residue)
    return Sinogram(x_axis, r_axis, vals.real)


# ---------------------------------------------------------------------------
# windowed norms

@dataclass(frozen=True)
class NormScanTable:
    p: int
    window_halfwidths: tuple[float, ...]
    norms: tuple[float, ...]
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        w = self.window_halfwidths
        if any(b <= a for a, b in zip(w, w[1:])):
            raise ValueError("window half-widths must be strictly increasing")

    @property
    def rows(self):
        return list(zip(self.window_halfwidths, self.norms))


def _cone_cell_weights(G: DataSpectrum, p: int, cfg: DimensionConfig) -> np.ndarray:
    """Product-integration weights for ``|g^|^p = (|g^| sqrt(t))^p t^(-p/2)``, t = s^2 - xi^2.

    Over each radial cell (clipped to ``t >= (ds / 2)^2``, the band the
    g^ maps leave empty, with the first interior cell stretched down to it) ``int s^n t^(-p/2) ds`` is taken in closed form
    with ``s^(n-1)`` frozen at the node: ``sqrt(t)`` for p = 1 and
    ``ln(t) / 2`` for p = 2.
    """
    xi = G.xi_axis.coords[:, None]
    s = G.eta_radial_axis.coords[None, :]
    ds = G.eta_radial_axis.spacing
    band2 = (0.5 * ds) ** 2
    ok = np.broadcast_to(s * s - xi * xi > band2, (xi.shape[0], s.shape[1]))
    first = ok & ~np.pad(ok, ((0, 0), (1, 0)))[:, :-1]
    # the first node inside the cone also covers the part of the cell below
    # it, since the cone-side node itself carries no value
    lo = np.where(first, band2, np.maximum(np.maximum(s - 0.5 * ds, 0.0) ** 2 - xi * xi, band2))
    hi = (s + 0.5 * ds) ** 2 - xi * xi
    ok = ok & (hi > lo)
    lo = np.where(ok, lo, 1.0)
    hi = np.where(ok, hi, 1.0)
    if p == 1:
        part = np.sqrt(hi) - np.sqrt(lo)
    else:
        part = 0.5 * np.log(hi / lo)
    w = np.where(ok, part, 0.0) * np.where(s > 0, s, 1.0) ** (cfg.n - 1)
    return cfg.sphere_area * G.xi_axis.spacing * w


def norm_window_scan(G: DataSpectrum, p: int, windows, cfg: DimensionConfig | None = None,
                     *, cone_weights: bool = True) -> NormScanTable:
    """Discrete L^p norms of g^ over the windows ``|xi| <= W, s <= W``.

    Radial bins carry the (n+1)-dimensional shell measure ``|S^n| s^n ds``
    and xi bins their width. With ``cone_weights`` (the default, meant for
    g^ itself) the inverse-square-root cone factor of g^ is integrated
    exactly over each radial cell instead of being sampled at the node
    (see :func:`_cone_cell_weights`); sampling it makes the p = 1 sum
    converge only like ``sqrt(ds)``.
    """
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    if cfg is None:
        cfg = make_dimension_config(1)
    windows = tuple(float(w) for w in windows)
    xi = G.xi_axis.coords
    s = G.eta_radial_axis.coords
    if cone_weights:
        t = np.maximum(s[None, :] ** 2 - xi[:, None] ** 2, 0.0)
        integrand = (np.abs(G.values) * np.sqrt(t)) ** p
        cell = _cone_cell_weights(G, p, cfg)
    else:
        integrand = np.abs(G.values) ** p
        ds = _trapezoid_weights(G.eta_radial_axis)
        cell = np.broadcast_to(G.xi_axis.spacing * cfg.sphere_area * s ** cfg.n * ds,
                               integrand.shape)
    out = []
    for W in windows:
        if W > s[-1] + 1e-12 or W > max(abs(xi[0]), abs(xi[-1])) + 1e-12:
            raise ValueError(f"window {W} exceeds the spectrum grid")
        sel_x = np.abs(xi) <= W
        sel_s = s <= W
        block = np.ix_(sel_x, sel_s)
        out.append(float(np.sum(integrand[block] * cell[block])) ** (1.0 / p))
    return NormScanTable(p, windows, tuple(out))
