"""Numerical checks of the spectral identities behind the two backprojection formulas.

Each check computes a field in space with one of the backprojection
pipelines, transforms it, and compares with the data spectrum looked up at
``(xi, sqrt(xi^2 + eta^2))``:

* modified backprojection: ``transform(R*_d g) = i eta g^(xi, sqrt(xi^2 + eta^2))``
* second formula: ``transform(R* K g) = K g^(xi, sqrt(xi^2 + eta^2))``
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .backprojection import backproject_deriv, deriv_truncation_tail
from .core import AxisSpec, FieldGrid, Sinogram
from .reconstruct import ReconConfig, odd_field_spectrum, recon_rstar_k
from .spectral import (apply_K, field_to_spectrum, frequency_axis, sample_cone_interior,
                       sinogram_to_data_spectrum)

__all__ = ["IdentityCheck", "deriv_identity", "rstar_k_identity"]


@dataclass(frozen=True)
class IdentityCheck:
    rel_l2_error: float
    bins: int
    lhs: np.ndarray
    rhs: np.ndarray
    mask: np.ndarray


def _interior_mask(G, eta, fraction):
    xi = G.xi_axis.coords[:, None]
    s = np.sqrt(xi ** 2 + eta[None, :] ** 2)
    return (eta[None, :] != 0.0) & (s <= fraction * G.eta_radial_axis.max)


def _compare(lhs, rhs, mask) -> IdentityCheck:
    den = float(np.linalg.norm(rhs[mask]))
    num = float(np.linalg.norm((lhs - rhs)[mask]))
    rel = num / den if den > 0 else num
    return IdentityCheck(rel, int(mask.sum()), lhs, rhs, mask)


def _pad_x(u: FieldGrid, x_axis: AxisSpec) -> FieldGrid:
    k = int(round((u.x_axis.min - x_axis.min) / x_axis.spacing))
    vals = np.zeros((x_axis.count, u.y_axis.count))
    vals[k:k + u.x_axis.count] = u.values
    return FieldGrid(x_axis, u.y_axis, vals)


def deriv_identity(g: Sinogram, axes: tuple[AxisSpec, AxisSpec], cfg: ReconConfig,
                   *, fraction: float = 0.9) -> IdentityCheck:
    """``transform(R*_d g)`` against ``i eta g^(xi, sqrt(xi^2 + eta^2))``.

    Interior bins: eta != 0 and ``sqrt(xi^2 + eta^2)`` within ``fraction``
    of the radial axis. ``i eta g^`` is looked up as ``i sgn(eta)`` times the
    smooth product ``|eta| g^``.
    """
    x_axis, y_axis = axes
    u = backproject_deriv(g, x_axis, y_axis, cfg.Z)
    if cfg.tail_correction:
        u = FieldGrid(x_axis, y_axis,
                      u.values + deriv_truncation_tail(g, x_axis, y_axis, cfg.Z).values)
    lhs = odd_field_spectrum(u, g.x_axis)
    G = sinogram_to_data_spectrum(g, cfg.dimension, tail_correction=cfg.tail_correction,
                                  support=(x_axis.min, x_axis.max))
    eta = lhs.eta_axis.coords
    h, covered = sample_cone_interior(G, lhs.eta_axis, cone_root=True)
    rhs = 1j * np.sign(eta)[None, :] * h
    mask = _interior_mask(G, eta, fraction) & covered
    return _compare(lhs.values, rhs, mask)


def rstar_k_identity(g: Sinogram, axes: tuple[AxisSpec, AxisSpec], cfg: ReconConfig,
                     *, fraction: float = 0.9) -> IdentityCheck:
    """``transform(R* K g)`` (spatial route) against ``K g^(xi, sqrt(xi^2 + eta^2))``."""
    x_axis, y_axis = axes
    rec, _ = recon_rstar_k(g, axes, cfg)
    field = FieldGrid(x_axis, y_axis, rec.values / cfg.dimension.c_n)
    lhs = field_to_spectrum(_pad_x(field, g.x_axis))
    G = sinogram_to_data_spectrum(g, cfg.dimension, tail_correction=cfg.tail_correction,
                                  support=(x_axis.min, x_axis.max))
    KG = apply_K(G, cfg.dimension)
    eta = lhs.eta_axis.coords
    rhs, covered = sample_cone_interior(KG, lhs.eta_axis)
    mask = _interior_mask(G, eta, fraction) & covered
    return _compare(lhs.values, rhs, mask)
