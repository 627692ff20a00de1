"""Grid geometry, dimension constants and analytic even phantoms.

Everything here is an immutable value type. Arrays stored on the grid
classes are flagged read-only at construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

__all__ = [
    "AxisSpec",
    "DataSpectrum",
    "DimensionConfig",
    "FieldGrid",
    "FieldSpectrum",
    "Phantom",
    "PhantomComponent",
    "Sinogram",
    "bump_phantom",
    "eval_phantom",
    "gaussian_phantom",
    "make_dimension_config",
    "sample_field",
    "symmetric_axis",
]


@dataclass(frozen=True)
class DimensionConfig:
    """Ground dimension ``n`` and the constants derived from it."""

    n: int
    sphere_area: float
    c_n: float


def make_dimension_config(n: int) -> DimensionConfig:
    """Return |S^n| (area of the unit sphere in R^(n+1)) and the inversion constant.

    >>> round(make_dimension_config(1).c_n, 15)
    0.5
    """
    if int(n) != n or n < 1:
        raise ValueError(f"ground dimension must be a positive integer, got {n!r}")
    n = int(n)
    area = 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)
    c_n = area / 2.0 / (2.0 * math.pi) ** n
    return DimensionConfig(n=n, sphere_area=area, c_n=c_n)


@dataclass(frozen=True)
class AxisSpec:
    """Uniform axis ``min + i*spacing`` for ``0 <= i < count``."""

    count: int
    min: float
    spacing: float

    def __post_init__(self):
        if int(self.count) != self.count or self.count < 1:
            raise ValueError(f"axis count must be a positive integer, got {self.count!r}")
        if not self.spacing > 0:
            raise ValueError(f"axis spacing must be positive, got {self.spacing!r}")
        object.__setattr__(self, "count", int(self.count))
        object.__setattr__(self, "min", float(self.min))
        object.__setattr__(self, "spacing", float(self.spacing))

    def coordinate(self, i: int) -> float:
        return self.min + i * self.spacing

    @property
    def coords(self) -> np.ndarray:
        return self.min + np.arange(self.count) * self.spacing

    @property
    def max(self) -> float:
        return self.coordinate(self.count - 1)

    @property
    def is_symmetric(self) -> bool:
        """True for an odd count centred on zero, so that 0 is a sample."""
        half = (self.count - 1) // 2
        return self.count % 2 == 1 and math.isclose(
            self.min, -half * self.spacing, rel_tol=0, abs_tol=1e-12 * self.spacing
        )


def symmetric_axis(half_width: float, spacing: float) -> AxisSpec:
    """Odd-count axis from ``-half_width`` to ``+half_width`` through 0."""
    half = int(round(half_width / spacing))
    return AxisSpec(2 * half + 1, -half * spacing, spacing)


def _frozen(values, dtype) -> np.ndarray:
    arr = np.array(values, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


def _check_shape(values: np.ndarray, *axes: AxisSpec):
    shape = tuple(a.count for a in axes)
    if values.shape != shape:
        raise ValueError(f"values shape {values.shape} does not match axes {shape}")


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Sampled f(x, y); ``values[i, j] = f(x_i, y_j)``."""

    x_axis: AxisSpec
    y_axis: AxisSpec
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, np.float64))
        _check_shape(self.values, self.x_axis, self.y_axis)


@dataclass(frozen=True, eq=False)
class Sinogram:
    """Circular-mean data g(x, r) on a radius axis starting at 0."""

    x_axis: AxisSpec
    r_axis: AxisSpec
    values: np.ndarray

    def __post_init__(self):
        if self.r_axis.min != 0.0:
            raise ValueError("sinogram radius axis must start at r = 0")
        object.__setattr__(self, "values", _frozen(self.values, np.float64))
        _check_shape(self.values, self.x_axis, self.r_axis)


@dataclass(frozen=True, eq=False)
class FieldSpectrum:
    """Complex f^(xi, eta) on ascending frequency axes (eta over the full line)."""

    xi_axis: AxisSpec
    eta_axis: AxisSpec
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, np.complex128))
        _check_shape(self.values, self.xi_axis, self.eta_axis)


@dataclass(frozen=True, eq=False)
class DataSpectrum:
    """Complex g^(xi, s) where ``s = |eta| >= 0`` is the radial frequency."""

    xi_axis: AxisSpec
    eta_radial_axis: AxisSpec
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.eta_radial_axis.min != 0.0:
            raise ValueError("radial frequency axis must start at 0")
        object.__setattr__(self, "values", _frozen(self.values, np.complex128))
        _check_shape(self.values, self.xi_axis, self.eta_radial_axis)


# ---------------------------------------------------------------------------
# phantoms

KINDS = ("gaussian", "smooth_bump")


@dataclass(frozen=True)
class PhantomComponent:
    kind: str
    center_x: float
    center_y: float
    width: float
    amplitude: float

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown component kind {self.kind!r}; expected one of {KINDS}")
        if not self.width > 0:
            raise ValueError("component width must be positive")


@dataclass(frozen=True)
class Phantom:
    """Sum of gaussian / smooth-bump components, even in y by construction.

    Build through :meth:`from_components`, which stores every off-axis
    component together with its mirror image at half amplitude each.
    """

    components: tuple[PhantomComponent, ...] = ()

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        for c in comps:
            if c.center_y != 0.0:
                mirror = PhantomComponent(c.kind, c.center_x, -c.center_y, c.width, c.amplitude)
                if mirror not in comps:
                    raise ValueError("off-axis component stored without its y-mirror; "
                                     "use Phantom.from_components")

    @classmethod
    def from_components(cls, components: Sequence[PhantomComponent]) -> "Phantom":
        stored = []
        for c in components:
            if c.center_y == 0.0:
                stored.append(c)
            else:
                half = 0.5 * c.amplitude
                y = abs(c.center_y)
                stored.append(PhantomComponent(c.kind, c.center_x, y, c.width, half))
                stored.append(PhantomComponent(c.kind, c.center_x, -y, c.width, half))
        return cls(tuple(stored))

    @property
    def is_compact(self) -> bool:
        """True when every component is a smooth bump (member of D_e)."""
        return all(c.kind == "smooth_bump" for c in self.components)

    def support_radius(self, x0: float = 0.0) -> float:
        """Radius about (x0, 0) outside which the phantom is negligible.

        Bumps contribute their exact support, gaussians 8.5 sigma (1e-16 decay).
        """
        rad = 0.0
        for c in self.components:
            reach = c.width if c.kind == "smooth_bump" else 8.5 * c.width
            rad = max(rad, math.hypot(c.center_x - x0, c.center_y) + reach)
        return rad

    def as_arrays(self):
        """Component table as parallel arrays (kind code, cx, cy, width, amplitude)."""
        kinds = np.array([KINDS.index(c.kind) for c in self.components], dtype=np.int64)
        cols = [np.array([getattr(c, k) for c in self.components], dtype=np.float64)
                for k in ("center_x", "center_y", "width", "amplitude")]
        return (kinds, *cols)


def _component_values(c: PhantomComponent, x, y):
    d2 = (x - c.center_x) ** 2 + (y - c.center_y) ** 2
    if c.kind == "gaussian":
        return c.amplitude * np.exp(-d2 / (2.0 * c.width ** 2))
    t2 = d2 / c.width ** 2
    inside = t2 < 1.0
    out = np.zeros(np.broadcast(x, y).shape)
    with np.errstate(divide="ignore"):
        out[inside] = c.amplitude * np.exp(-1.0 / (1.0 - np.broadcast_to(t2, out.shape)[inside]))
    return out


def eval_phantom(p: Phantom, x, y):
    """Evaluate the phantom at scalar or array points.

    Components are evaluated at ``|y|``, so with the mirrored storage of
    off-axis components the result is even in y bitwise.
    """
    x = np.asarray(x, dtype=np.float64)
    ay = np.abs(np.asarray(y, dtype=np.float64))
    total = np.zeros(np.broadcast(x, ay).shape)
    for c in p.components:
        total = total + _component_values(c, x, ay)
    return float(total) if total.ndim == 0 else total


def sample_field(p: Phantom, x_axis: AxisSpec, y_axis: AxisSpec) -> FieldGrid:
    """Evaluate ``p`` on the tensor grid; ``y_axis`` must be symmetric about 0."""
    if not y_axis.is_symmetric:
        raise ValueError("y axis must have an odd count and be centred on y = 0")
    X, Y = np.meshgrid(x_axis.coords, y_axis.coords, indexing="ij")
    vals = eval_phantom(p, X, Y)
    # exact mirror: y_j and y_{N-1-j} differ only by rounding of the axis formula
    vals = np.where(Y >= 0, vals, vals[:, ::-1])
    return FieldGrid(x_axis, y_axis, vals)


def gaussian_phantom(sigma: float = 0.7, amplitude: float = 1.0,
                     center: tuple[float, float] = (0.0, 0.0)) -> Phantom:
    return Phantom.from_components(
        [PhantomComponent("gaussian", center[0], center[1], sigma, amplitude)])


def bump_phantom() -> Phantom:
    """Two-bump test scene: a central bump plus an off-axis (mirrored) one.

    Non-negative, infinitely smooth and compactly supported inside |x|, |y| < 4.
    """
    return Phantom.from_components([
        PhantomComponent("smooth_bump", -0.5, 0.0, 2.0, 1.0),
        PhantomComponent("smooth_bump", 1.5, 1.5, 1.5, 1.2),
    ])
