"""Circular means of analytic phantoms (the forward operator for n = 1)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from ._kernels import circular_means
from .core import AxisSpec, Phantom, PhantomComponent, Sinogram, eval_phantom

__all__ = [
    "AngularQuadrature",
    "forward_project",
    "gaussian_forward_oracle",
    "spherical_mean",
]


@dataclass(frozen=True)
class AngularQuadrature:
    """Uniform periodic rule on M angles ``2*pi*k/M``; M even and >= 16."""

    node_count: int = 4096

    def __post_init__(self):
        M = self.node_count
        if int(M) != M or M < 16 or M % 2:
            raise ValueError(f"node count must be an even integer >= 16, got {M!r}")


def _tables(p: Phantom):
    if not p.components:
        z = np.zeros(0)
        return np.zeros(0, dtype=np.int64), z, z, z, z
    return p.as_arrays()


def spherical_mean(p: Phantom, x: float, r: float,
                   q: AngularQuadrature = AngularQuadrature()) -> float:
    """Average of the phantom over the circle of radius ``r`` about ``(x, 0)``."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    if r == 0:
        return float(eval_phantom(p, x, 0.0))
    out = circular_means(*_tables(p), np.array([float(x)]), np.array([float(r)]),
                         q.node_count)
    return float(out[0, 0])


def forward_project(p: Phantom, x_axis: AxisSpec, r_axis: AxisSpec,
                    q: AngularQuadrature = AngularQuadrature()) -> Sinogram:
    """Sinogram ``g[i, j] = spherical_mean(p, x_i, r_j)`` on the given grid."""
    if r_axis.min != 0.0:
        raise ValueError("radius axis must start at r = 0")
    xs = x_axis.coords
    vals = circular_means(*_tables(p), xs, r_axis.coords, q.node_count)
    vals[:, 0] = eval_phantom(p, xs, 0.0)
    return Sinogram(x_axis, r_axis, vals)


def gaussian_forward_oracle(center_x: float, center_y: float, sigma: float,
                            amplitude: float, x: float, r: float) -> float:
    """Circular mean of one (mirrored) gaussian component, computed independently.

    On-axis components use the closed form
    ``exp(-(d^2 + r^2) / 2 sigma^2) * I0(d r / sigma^2)`` with ``d = x - center_x``
    (through the exponentially scaled ``i0e`` to avoid overflow). Off-axis
    components are integrated adaptively over the angle.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    if r < 0:
        raise ValueError("radius must be non-negative")
    d = x - center_x
    if center_y == 0.0:
        z = abs(d) * r / sigma ** 2
        return float(amplitude * math.exp(-(abs(d) - r) ** 2 / (2 * sigma ** 2)) * special.i0e(z))
    comps = Phantom.from_components(
        [PhantomComponent("gaussian", center_x, center_y, sigma, amplitude)]).components
    if r == 0.0:
        return float(sum(c.amplitude * math.exp(-(d ** 2 + c.center_y ** 2) / (2 * sigma ** 2))
                         for c in comps))

    def integrand(t):
        px, py = x + r * math.cos(t), r * math.sin(t)
        return sum(c.amplitude * math.exp(-((px - c.center_x) ** 2 + (py - c.center_y) ** 2)
                                          / (2 * sigma ** 2)) for c in comps)

    val, _ = integrate.quad(integrand, 0.0, 2 * math.pi, epsabs=1e-13, epsrel=1e-11, limit=400)
    return val / (2 * math.pi)
