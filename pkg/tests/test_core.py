import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spherical_radon.core import (AxisSpec, DataSpectrum, FieldGrid, Phantom, PhantomComponent,
                                  Sinogram, eval_phantom, make_dimension_config, sample_field,
                                  symmetric_axis)


def test_dimension_constants():
    c1 = make_dimension_config(1)
    assert c1.sphere_area == pytest.approx(2 * math.pi, rel=1e-15)
    assert c1.c_n == 0.5
    c2 = make_dimension_config(2)
    assert c2.sphere_area == pytest.approx(4 * math.pi, rel=1e-14)
    # c_n = |S^n| / 2 / (2 pi)^n
    assert c2.c_n == pytest.approx(1 / (2 * math.pi), rel=1e-14)


@pytest.mark.parametrize("n", [0, -1, 1.5])
def test_dimension_rejects_bad_n(n):
    with pytest.raises(ValueError):
        make_dimension_config(n)


def test_axis_coordinates():
    ax = AxisSpec(5, -1.0, 0.5)
    assert ax.coordinate(3) == 0.5
    np.testing.assert_array_equal(ax.coords, [-1.0, -0.5, 0.0, 0.5, 1.0])
    assert ax.is_symmetric
    assert not AxisSpec(4, -1.0, 0.5).is_symmetric
    with pytest.raises(ValueError):
        AxisSpec(0, 0.0, 1.0)
    with pytest.raises(ValueError):
        AxisSpec(3, 0.0, 0.0)


def test_phantom_examples():
    assert eval_phantom(Phantom(), 0.3, -2.0) == 0.0
    g = Phantom.from_components([PhantomComponent("gaussian", 0, 0, 1.0, 1.0)])
    assert eval_phantom(g, 0.0, 0.0) == 1.0
    b = Phantom.from_components([PhantomComponent("smooth_bump", 0, 0, 1.0, 1.0)])
    assert eval_phantom(b, 0.999, 0.0) > 0.0
    assert eval_phantom(b, 1.001, 0.0) == 0.0
    assert b.is_compact and not g.is_compact


def test_mirror_required():
    with pytest.raises(ValueError):
        Phantom((PhantomComponent("gaussian", 0.0, 1.0, 1.0, 1.0),))
    p = Phantom.from_components([PhantomComponent("gaussian", 0.0, 1.0, 1.0, 2.0)])
    assert len(p.components) == 2
    assert {c.amplitude for c in p.components} == {1.0}


def test_unknown_kind():
    with pytest.raises(ValueError):
        PhantomComponent("disk", 0, 0, 1, 1)


def test_sample_field_examples():
    ax = symmetric_axis(2.0, 0.25)
    assert not sample_field(Phantom(), ax, ax).values.any()
    g = Phantom.from_components([PhantomComponent("gaussian", 0, 0, 1.0, 1.0)])
    u = sample_field(g, ax, ax)
    i, j = np.unravel_index(np.argmax(u.values), u.values.shape)
    assert (ax.coords[i], ax.coords[j]) == (0.0, 0.0)
    pair = Phantom.from_components([PhantomComponent("gaussian", 0.3, 1.0, 0.5, 1.0)])
    v = sample_field(pair, ax, ax).values
    jp = int(np.argmin(np.abs(ax.coords - 1.0)))
    jm = int(np.argmin(np.abs(ax.coords + 1.0)))
    np.testing.assert_array_equal(v[:, jp], v[:, jm])
    with pytest.raises(ValueError):
        sample_field(g, ax, AxisSpec(8, -1.0, 0.25))


component = st.builds(
    PhantomComponent,
    st.sampled_from(["gaussian", "smooth_bump"]),
    st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 2.0), st.floats(-2, 2))


@given(st.lists(component, max_size=4))
def test_sampled_field_is_even_bitwise(comps):
    p = Phantom.from_components(comps)
    ax = symmetric_axis(4.0, 0.25)
    v = sample_field(p, ax, ax).values
    np.testing.assert_array_equal(v, v[:, ::-1])


@given(st.lists(component, max_size=4), st.floats(-5, 5), st.floats(-5, 5))
def test_eval_even_in_y(comps, x, y):
    p = Phantom.from_components(comps)
    assert eval_phantom(p, x, y) == eval_phantom(p, x, -y)


def test_bump_vanishes_outside_support():
    p = Phantom.from_components([PhantomComponent("smooth_bump", 1.0, 0.5, 1.5, 1.0)])
    ax = symmetric_axis(6.0, 0.125)
    v = sample_field(p, ax, ax).values
    assert v.min() >= 0.0
    X, Y = np.meshgrid(ax.coords, ax.coords, indexing="ij")
    outside = (np.hypot(X - 1.0, Y - 0.5) >= 1.5) & (np.hypot(X - 1.0, Y + 0.5) >= 1.5)
    assert not v[outside].any()
    assert p.support_radius(1.0) == pytest.approx(2.0)


def test_grid_values_read_only():
    ax = symmetric_axis(1.0, 0.5)
    u = FieldGrid(ax, ax, np.zeros((5, 5)))
    with pytest.raises(ValueError):
        u.values[0, 0] = 1.0
    with pytest.raises(ValueError):
        Sinogram(ax, AxisSpec(3, 0.5, 0.5), np.zeros((5, 3)))
    with pytest.raises(ValueError):
        DataSpectrum(ax, AxisSpec(3, 0.5, 0.5), np.zeros((5, 3)))
    with pytest.raises(ValueError):
        FieldGrid(ax, ax, np.zeros((5, 4)))
