"""End-to-end inversions of sinograms and their error reports.

Three routes share one set of grids:

* ``fourier``: transform the data, map g^ to f^ on the field's frequency
  grid, transform back.
* ``mfbp``: modified backprojection, then the Hilbert transform in y and
  the constant c_n.
* ``rstar_k``: filter the data with K in the frequency domain, return to
  sinogram space, classical backprojection, then c_n.
"""
from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .backprojection import backproject, backproject_deriv, deriv_truncation_tail
from .core import (AxisSpec, DataSpectrum, DimensionConfig, FieldGrid, FieldSpectrum, Phantom,
                   Sinogram,
                   make_dimension_config, sample_field)
from .spectral import (apply_K, cone_limit, data_spectrum_to_sinogram, fhat_from_ghat,
                       fractional_laplacian, frequency_axis, hilbert_y,
                       inverse_transform_1d, sample_cone_interior, sinogram_to_data_spectrum,
                       spectrum_to_field)

log = logging.getLogger(__name__)

__all__ = [
    "FieldComparison",
    "ReconConfig",
    "ReconReport",
    "compare_fields",
    "hilbert_y_farfield",
    "kg_sinogram",
    "odd_field_spectrum",
    "recon_fourier",
    "recon_mfbp",
    "recon_rstar_k",
    "reconstruct",
    "roi_mask",
]

METHODS = ("fourier", "mfbp", "rstar_k")


@dataclass(frozen=True)
class ReconConfig:
    """Pipeline choice and its knobs.

    ``tail_correction`` switches on the far-field corrections of the
    truncated integrals (the ridge model of the data in the Hankel
    transform, the truncated-backprojection tail in mfbp and the 1/y model
    of R*_d g ahead of the Hilbert transform).
    """

    method: str = "mfbp"
    dimension: DimensionConfig = field(default_factory=lambda: make_dimension_config(1))
    Z: float = 48.0
    roi_margin: float = 0.1
    tail_correction: bool = True

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if not 0.0 <= self.roi_margin < 0.5:
            raise ValueError("roi margin must lie in [0, 0.5)")
        if not self.Z > 0:
            raise ValueError("truncation half-width must be positive")


@dataclass(frozen=True)
class FieldComparison:
    rel_l2_error: float
    linf_error: float
    roi_shape: tuple[int, int]


@dataclass(frozen=True)
class ReconReport:
    method: str
    rel_l2_error: float
    linf_error: float
    clipped_fraction: float
    eta_zero_row_excluded: bool
    runtime_seconds: float
    grid: dict
    meta: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "method": self.method,
            "rel_l2_error": self.rel_l2_error,
            "linf_error": self.linf_error,
            "clipped_fraction": self.clipped_fraction,
            "eta_zero_row_excluded": self.eta_zero_row_excluded,
            "runtime_seconds": self.runtime_seconds,
            "grid": dict(self.grid),
            **{k: v for k, v in self.meta.items()},
        }


def _roi_1d(axis: AxisSpec, margin: float) -> np.ndarray:
    c = axis.coords
    centre = 0.5 * (axis.min + axis.max)
    half = 0.5 * (axis.max - axis.min)
    return np.abs(c - centre) <= (1.0 - 2.0 * margin) * half + 1e-9 * axis.spacing


def roi_mask(x_axis: AxisSpec, y_axis: AxisSpec, margin: float) -> np.ndarray:
    """Samples inside the central ``1 - 2 margin`` fraction of both axes."""
    return _roi_1d(x_axis, margin)[:, None] & _roi_1d(y_axis, margin)[None, :]


def compare_fields(a: FieldGrid, b: FieldGrid, roi_margin: float = 0.1) -> FieldComparison:
    """Relative L2 and max error of ``a`` against the reference ``b`` over the ROI.

    If ``b`` vanishes on the ROI the relative error is ``||a||_2`` instead.
    """
    if a.x_axis != b.x_axis or a.y_axis != b.y_axis:
        raise ValueError("fields live on different grids")
    sx = _roi_1d(a.x_axis, roi_margin)
    sy = _roi_1d(a.y_axis, roi_margin)
    da = a.values[np.ix_(sx, sy)]
    db = b.values[np.ix_(sx, sy)]
    nb = float(np.linalg.norm(db))
    diff = da - db
    rel = float(np.linalg.norm(diff)) / nb if nb > 0 else float(np.linalg.norm(da))
    linf = float(np.max(np.abs(diff))) if diff.size else 0.0
    return FieldComparison(rel, linf, (int(sx.sum()), int(sy.sum())))


def _truth_field(truth, x_axis, y_axis):
    if truth is None:
        return None
    if isinstance(truth, Phantom):
        return sample_field(truth, x_axis, y_axis)
    return truth


def _report(method, rec, truth, cfg, t0, clipped, meta, eta_excluded=False):
    t = _truth_field(truth, rec.x_axis, rec.y_axis)
    if t is None:
        rel = linf = math.nan
    else:
        cmp = compare_fields(rec, t, cfg.roi_margin)
        rel, linf = cmp.rel_l2_error, cmp.linf_error
    grid = {"x": _axis_tuple(rec.x_axis), "y": _axis_tuple(rec.y_axis), "Z": cfg.Z,
            "roi_margin": cfg.roi_margin}
    return ReconReport(method, rel, linf, float(clipped), eta_excluded,
                       time.perf_counter() - t0, grid, meta)


def _axis_tuple(a: AxisSpec):
    return (a.count, a.min, a.spacing)


def _require_n1(cfg: ReconConfig):
    if cfg.dimension.n != 1:
        raise ValueError("spatial reconstructions are implemented for n = 1 only")


# ---------------------------------------------------------------------------

def _x_offset(g: Sinogram, x_axis: AxisSpec) -> int:
    """Index of ``x_axis.min`` on the sinogram x grid (the grids must nest)."""
    if not math.isclose(g.x_axis.spacing, x_axis.spacing, rel_tol=1e-12):
        raise ValueError("field x spacing must equal the sinogram x spacing")
    off = (x_axis.min - g.x_axis.min) / g.x_axis.spacing
    k = int(round(off))
    if abs(off - k) > 1e-6 or k < 0 or k + x_axis.count > g.x_axis.count:
        raise ValueError("field x grid must be a sub-grid of the sinogram x grid")
    return k


def recon_fourier(g: Sinogram, axes: tuple[AxisSpec, AxisSpec], cfg: ReconConfig,
                  truth=None) -> tuple[FieldGrid, ReconReport]:
    """Fourier route: g^ from the data, f^ from g^, inverse transform.

    f^ is built on (sinogram xi grid) x (eta grid of the field), inverted
    over the full sinogram x window and cropped to the field. The relation
    for f^ vanishes on the eta = 0 row because of its ``|eta|`` factor, yet
    that row carries each column's mean; it is filled with the limit
    ``eta -> 0+`` of the relation instead, i.e. c_n times the smooth product
    ``sqrt(s^2 - xi^2) g^`` extrapolated to the cone. The output is
    symmetrized in y after its asymmetry is logged.
    """
    _require_n1(cfg)
    t0 = time.perf_counter()
    x_axis, y_axis = axes
    k = _x_offset(g, x_axis)
    G = sinogram_to_data_spectrum(g, cfg.dimension, tail_correction=cfg.tail_correction,
                                  support=(x_axis.min, x_axis.max))
    eta_axis = frequency_axis(y_axis)
    F = fhat_from_ghat(G, cfg.dimension, eta_axis)
    vals = np.array(F.values)
    eta = eta_axis.coords
    zero = np.nonzero(eta == 0.0)[0]
    if zero.size:
        limit, _ = sample_cone_interior(G, AxisSpec(1, 0.0, 1.0), cone_root=True)
        xi = G.xi_axis.coords
        vals[:, zero[0]] = cfg.dimension.c_n * limit[:, 0] * np.abs(xi) ** (cfg.dimension.n - 1)
    F = FieldSpectrum(F.xi_axis, F.eta_axis, vals, meta=F.meta)
    full, residue = spectrum_to_field(F, g.x_axis, y_axis)
    v = full.values[k:k + x_axis.count]
    scale = float(np.max(np.abs(v))) if v.size else 0.0
    asym = float(np.max(np.abs(v - v[:, ::-1]))) / scale if scale > 0 else 0.0
    log.info("fourier recon: y-asymmetry before symmetrizing %.3g", asym)
    v = 0.5 * (v + v[:, ::-1])
    rec = FieldGrid(x_axis, y_axis, v)
    meta = {"imag_residue": residue, "asymmetry": asym,
            "coverage": F.meta.get("coverage", 1.0), "eta_zero_row": "cone limit"}
    return rec, _report("fourier", rec, truth, cfg, t0, 0.0, meta, eta_excluded=True)


def _farfield_fit(u: FieldGrid, band: float, width: float):
    """Least-squares fit of ``c1 y / q + c3 y / q^2`` (``q = y^2 + b^2``) on the outer rows."""
    y = u.y_axis.coords
    ymax = float(np.max(np.abs(y)))
    b = width * ymax
    q = y * y + b * b
    basis = np.stack([y / q, y / q ** 2])
    sel = np.abs(y) >= band * ymax
    coef, *_ = np.linalg.lstsq(basis[:, sel].T, u.values[:, sel].T, rcond=None)
    return coef, b, basis


def hilbert_y_farfield(u: FieldGrid, *, band: float = 0.5, width: float = 0.125,
                       pad: int = 1) -> FieldGrid:
    """Hilbert transform in y of an odd field that decays like 1/y.

    On each x row the model ``c1 y / (y^2 + b^2) + c3 y / (y^2 + b^2)^2`` is
    fitted by least squares over ``|y| >= band * y_max`` (``b = width * y_max``)
    and subtracted. The remainder decays fast enough for a zero-padded FFT
    (``pad`` window lengths on each side); the model's transform is added
    back in closed form: ``-b / (y^2 + b^2)`` and
    ``(y^2 - b^2) / (2 b (y^2 + b^2)^2)`` respectively.
    """
    coef, b, basis = _farfield_fit(u, band, width)
    y = u.y_axis.coords
    q = y * y + b * b
    images = np.stack([-b / q, (y * y - b * b) / (2 * b * q * q)])
    rest = u.values - coef.T @ basis
    n = y.size
    P = pad * n
    ext = np.zeros((rest.shape[0], n + 2 * P))
    ext[:, P:P + n] = rest
    k = np.fft.fftfreq(ext.shape[1])
    h = np.fft.ifft(np.fft.fft(ext, axis=1) * (-1j * np.sign(k)), axis=1).real[:, P:P + n]
    return FieldGrid(u.x_axis, u.y_axis, h + coef.T @ images)


def odd_field_spectrum(u: FieldGrid, x_axis: AxisSpec, *, band: float = 0.5,
                       width: float = 0.125) -> FieldSpectrum:
    """2D transform of an odd-in-y field with a 1/y far field, on a wider x grid.

    ``u`` is zero-padded in x onto ``x_axis`` (it must nest in it). In y the
    far-field model of :func:`hilbert_y_farfield` is transformed in closed
    form, ``y / q -> -i pi sgn(eta) exp(-b |eta|)`` and
    ``y / q^2 -> -i pi eta exp(-b |eta|) / (2 b)``, and the remainder by a
    Riemann sum on the window.
    """
    from .spectral import forward_transform_1d
    coef, b, basis = _farfield_fit(u, band, width)
    rest = u.values - coef.T @ basis
    off = (u.x_axis.min - x_axis.min) / x_axis.spacing
    k = int(round(off))
    if (abs(off - k) > 1e-6 or k < 0 or k + u.x_axis.count > x_axis.count
            or not math.isclose(u.x_axis.spacing, x_axis.spacing, rel_tol=1e-12)):
        raise ValueError("field x grid must be a sub-grid of the target x grid")

    def widen(a):
        out = np.zeros((x_axis.count,) + a.shape[1:], dtype=a.dtype)
        out[k:k + a.shape[0]] = a
        return out

    xi_axis = frequency_axis(x_axis)
    eta_axis = frequency_axis(u.y_axis)
    eta = eta_axis.coords
    R = forward_transform_1d(forward_transform_1d(widen(rest), x_axis, 0), u.y_axis, 1)
    C = forward_transform_1d(widen(coef.T), x_axis, 0)
    decay = np.exp(-b * np.abs(eta))
    model = (C[:, :1] * (-1j * math.pi * np.sign(eta) * decay)[None, :]
             + C[:, 1:2] * (-1j * math.pi * eta * decay / (2 * b))[None, :])
    return FieldSpectrum(xi_axis, eta_axis, R + model)


def recon_mfbp(g: Sinogram, axes: tuple[AxisSpec, AxisSpec], cfg: ReconConfig,
               truth=None) -> tuple[FieldGrid, ReconReport]:
    """Modified filtered backprojection ``f = c_n H_y Lap^((n-1)/2) R*_d g``.

    With ``tail_correction`` the part of R*_d beyond the truncation window
    is estimated from the far-field ridges and the Hilbert transform uses
    the 1/y far-field model (:func:`hilbert_y_farfield`); without it the
    plain periodic transform on the field window is used.
    """
    _require_n1(cfg)
    t0 = time.perf_counter()
    x_axis, y_axis = axes
    u, clipped = backproject_deriv(g, x_axis, y_axis, cfg.Z, return_clipping=True)
    meta = {}
    if cfg.tail_correction:
        tail = deriv_truncation_tail(g, x_axis, y_axis, cfg.Z)
        u = FieldGrid(x_axis, y_axis, u.values + tail.values)
    odd = float(np.max(np.abs(u.values + u.values[:, ::-1])))
    meta["deriv_parity_defect"] = odd
    u = fractional_laplacian(u, cfg.dimension)
    if cfg.tail_correction:
        h = hilbert_y_farfield(u)
    else:
        h = hilbert_y(u)
    v = cfg.dimension.c_n * h.values
    scale = float(np.max(np.abs(v))) if v.size else 0.0
    meta["asymmetry"] = float(np.max(np.abs(v - v[:, ::-1]))) / scale if scale > 0 else 0.0
    rec = FieldGrid(x_axis, y_axis, v)
    return rec, _report("mfbp", rec, truth, cfg, t0, clipped, meta)


_CONE_MODEL_WIDTH = 0.125


def kg_sinogram(g: Sinogram, cfg: ReconConfig, support=None) -> Sinogram:
    """The filtered data Kg on the sinogram's own grid (no cone model)."""
    G = sinogram_to_data_spectrum(g, cfg.dimension, tail_correction=cfg.tail_correction,
                                  support=support)
    KG = apply_K(G, cfg.dimension)
    return data_spectrum_to_sinogram(KG, g.r_axis, g.x_axis)


def _split_cone_jump(KG: DataSpectrum, b: float):
    """Split K g^ into a cone-jump model and a remainder that vanishes at the cone.

    K g^ equals ``2 f^(xi, sqrt(s^2 - xi^2))`` above the cone and 0 below: a
    jump of height ``c(xi) = 2 f^(xi, 0)``. The model
    ``c(xi) exp(-b^2 (s^2 - xi^2) / 2)`` carries the same jump; the remainder
    is continuous there, so its Kg decays quickly and both the radial
    quadrature and the truncated backprojection converge fast. Bins within
    half a cell of the cone are treated as being on it (remainder 0).
    """
    xi = KG.xi_axis.coords[:, None]
    s = KG.eta_radial_axis.coords[None, :]
    t = s * s - xi * xi
    inside = t > (0.5 * KG.eta_radial_axis.spacing) ** 2
    c = cone_limit(KG)
    model = c[:, None] * np.exp(-0.5 * b * b * np.where(inside, t, 0.0))
    rest = np.where(inside, KG.values - model, 0.0)
    return c, DataSpectrum(KG.xi_axis, KG.eta_radial_axis, rest, meta=dict(KG.meta))


def recon_rstar_k(g: Sinogram, axes: tuple[AxisSpec, AxisSpec], cfg: ReconConfig,
                  truth=None) -> tuple[FieldGrid, ReconReport]:
    """Second formula ``f = c_n R* K g`` with Kg formed explicitly in sinogram space.

    Kg is obtained by applying K to g^ and inverting the mixed transform,
    then backprojected with the truncated classical operator. With
    ``tail_correction`` the cone jump of K g^ is split off first (see
    :func:`_split_cone_jump`); its backprojection is known in closed form
    because the transform of R*Kg is ``K g^(xi, sqrt(xi^2 + eta^2))``: for
    the model that is ``c(xi) exp(-b^2 eta^2 / 2)``, i.e. ``C(x) times a
    Gaussian in y`` with C the inverse transform of c.
    """
    _require_n1(cfg)
    t0 = time.perf_counter()
    x_axis, y_axis = axes
    G = sinogram_to_data_spectrum(g, cfg.dimension, tail_correction=cfg.tail_correction,
                                  support=(x_axis.min, x_axis.max))
    KG = apply_K(G, cfg.dimension)
    meta = {}
    if cfg.tail_correction:
        k = _x_offset(g, x_axis)
        b = _CONE_MODEL_WIDTH * float(np.max(np.abs(y_axis.coords)))
        c, rest = _split_cone_jump(KG, b)
        kg = data_spectrum_to_sinogram(rest, g.r_axis, g.x_axis)
        Cx = inverse_transform_1d(c, g.x_axis)[k:k + x_axis.count]
        y = y_axis.coords
        model = Cx.real[:, None] * (np.exp(-0.5 * (y / b) ** 2) / (b * math.sqrt(2 * math.pi)))[None, :]
        meta["cone_model_width"] = b
    else:
        kg = data_spectrum_to_sinogram(KG, g.r_axis, g.x_axis)
        model = 0.0
    bp, clipped = backproject(kg, x_axis, y_axis, cfg.Z, return_clipping=True)
    rec = FieldGrid(x_axis, y_axis, cfg.dimension.c_n * (bp.values + model))
    return rec, _report("rstar_k", rec, truth, cfg, t0, clipped, meta)


def reconstruct(g: Sinogram, axes, cfg: ReconConfig, truth=None):
    """Dispatch on ``cfg.method``."""
    fn = {"fourier": recon_fourier, "mfbp": recon_mfbp, "rstar_k": recon_rstar_k}[cfg.method]
    return fn(g, axes, cfg, truth)
