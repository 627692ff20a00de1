import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spherical_radon.backprojection import (backproject, backproject_deriv, divergence_probe,
                                            radial_derivative, ridge_projection)
from spherical_radon.core import AxisSpec, Sinogram, symmetric_axis

XA = symmetric_axis(4.0, 0.25)
RA = AxisSpec(33, 0.0, 0.25)
FX = symmetric_axis(1.0, 0.25)


def sino(values, x_axis=XA, r_axis=RA):
    return Sinogram(x_axis, r_axis, values)


def test_radial_derivative_examples():
    r = RA.coords
    const = radial_derivative(sino(np.full((XA.count, RA.count), 2.5))).values
    assert np.max(np.abs(const)) < 1e-12
    sq = radial_derivative(sino(np.tile(r ** 2, (XA.count, 1)))).values
    np.testing.assert_allclose(sq, np.tile(2 * r, (XA.count, 1)), atol=1e-10, rtol=0)
    assert not sq[:, 0].any()
    quart = radial_derivative(sino(np.tile(r ** 4, (XA.count, 1)))).values
    np.testing.assert_allclose(quart, np.tile(4 * r ** 3, (XA.count, 1)), atol=1e-9, rtol=0)
    with pytest.raises(ValueError):
        radial_derivative(Sinogram(XA, AxisSpec(4, 0.0, 0.25), np.zeros((XA.count, 4))))


def test_radial_derivative_of_smooth_even_data():
    r = RA.coords
    d = radial_derivative(sino(np.tile(np.cos(0.7 * r), (XA.count, 1)))).values
    np.testing.assert_allclose(d[0], -0.7 * np.sin(0.7 * r), atol=5e-4, rtol=0)


def test_zero_data():
    z = sino(np.zeros((XA.count, RA.count)))
    assert not backproject(z, FX, FX, 2.0).values.any()
    assert not backproject_deriv(z, FX, FX, 2.0).values.any()
    t = divergence_probe(z, 0.0, 0.5, [1, 2, 3])
    assert t.values == (0.0, 0.0, 0.0)
    assert t.slope_b == 0.0
    assert t.last_increment() == 0.0


@given(st.integers(0, 2 ** 32 - 1))
def test_parity_bitwise(seed):
    v = np.random.default_rng(seed).standard_normal((XA.count, RA.count))
    g = sino(v)
    b = backproject(g, FX, FX, 2.0).values
    np.testing.assert_array_equal(b, b[:, ::-1])
    d = backproject_deriv(g, FX, FX, 2.0).values
    np.testing.assert_array_equal(d, -d[:, ::-1])
    assert not d[:, FX.count // 2].any()


@given(st.integers(0, 2 ** 32 - 1), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(seed, a, b):
    rng = np.random.default_rng(seed)
    v1, v2 = rng.standard_normal((2, XA.count, RA.count))
    for op in (backproject, backproject_deriv):
        lhs = op(sino(a * v1 + b * v2), FX, FX, 2.0).values
        rhs = a * op(sino(v1), FX, FX, 2.0).values + b * op(sino(v2), FX, FX, 2.0).values
        np.testing.assert_allclose(lhs, rhs, atol=1e-11 * (1 + abs(a) + abs(b)), rtol=0)


def test_constant_data_backprojects_to_window_length():
    # g = 1 everywhere inside the radius grid: the trapezoid over |z - x| <= Z gives 2Z
    g = sino(np.ones((XA.count, RA.count)))
    u = backproject(g, FX, FX, 2.0).values
    np.testing.assert_allclose(u, 4.0, rtol=1e-12)


def test_probe_validation():
    g = sino(np.zeros((XA.count, RA.count)))
    with pytest.raises(ValueError):
        divergence_probe(g, 0.0, 0.5, [2, 1])
    with pytest.raises(ValueError):
        divergence_probe(g, 0.0, 0.5, [1, 2], operator="other")
    with pytest.raises(ValueError):
        backproject(g, FX, FX, 0.0)


def test_classical_growth_on_gaussian(gaussian_sino):
    # far from the scene the integrand is ~ P(x0) / (pi |z - x0|): growth b ln(Z2 / Z1)
    u8 = divergence_probe(gaussian_sino, 0.0, 0.5, [8.0, 63.0])
    P0 = 0.7 * math.sqrt(2 * math.pi)
    gain = u8.values[1] - u8.values[0]
    assert gain > 0
    assert gain == pytest.approx(P0 / math.pi * math.log(63 / 8), rel=2e-2)


def test_ridge_projection_of_gaussian(gaussian_sino):
    P, rho = ridge_projection(gaussian_sino, -3.0, 3.0)
    w = np.linspace(-3, 3, 61)
    ref = 0.7 * math.sqrt(2 * math.pi) * np.exp(-0.5 * (w / 0.7) ** 2)
    assert rho > 50
    assert np.max(np.abs(P(w) - ref)) < 1e-3 * ref.max()
