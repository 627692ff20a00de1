import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spherical_radon.core import (AxisSpec, Phantom, PhantomComponent, eval_phantom,
                                  gaussian_phantom, symmetric_axis)
from spherical_radon.forward import (AngularQuadrature, forward_project,
                                     gaussian_forward_oracle, spherical_mean)

UNIT = gaussian_phantom(1.0)


def test_quadrature_validation():
    for M in (8, 17, 0):
        with pytest.raises(ValueError):
            AngularQuadrature(M)
    assert AngularQuadrature(16).node_count == 16


def test_spherical_mean_examples():
    q = AngularQuadrature(1024)
    # e^-1 I0(1)
    assert spherical_mean(UNIT, 1.0, 1.0, q) == pytest.approx(0.46575960759364043, rel=1e-12)
    assert spherical_mean(UNIT, 0.7, 0.0, q) == eval_phantom(UNIT, 0.7, 0.0)
    with pytest.raises(ValueError):
        spherical_mean(UNIT, 0.0, -1.0, q)


def test_mean_of_a_plateau():
    # a very wide bump is flat to ~1e-7 relative near its centre
    wide = Phantom.from_components([PhantomComponent("smooth_bump", 0, 0, 1e4, 1.0)])
    c = eval_phantom(wide, 0.0, 0.0)
    for x, r in [(0.0, 0.5), (1.0, 2.0), (-3.0, 1.0)]:
        assert spherical_mean(wide, x, r) == pytest.approx(c, rel=1e-6)


def test_oracle_examples():
    assert gaussian_forward_oracle(0, 0, 1, 1, 0, 0) == 1.0
    assert gaussian_forward_oracle(0, 0, 1, 1, 0, 2) == pytest.approx(math.exp(-2), rel=1e-15)
    assert gaussian_forward_oracle(0, 0, 1, 1, 1, 1) == pytest.approx(0.46575960759364043,
                                                                      rel=1e-14)


def test_off_axis_oracle_matches_quadrature():
    p = Phantom.from_components([PhantomComponent("gaussian", 0.4, 1.2, 0.8, 1.5)])
    q = AngularQuadrature(4096)
    for x, r in [(0.0, 0.5), (1.0, 1.3), (-2.0, 3.0)]:
        ref = gaussian_forward_oracle(0.4, 1.2, 0.8, 1.5, x, r)
        assert spherical_mean(p, x, r, q) == pytest.approx(ref, rel=1e-10)


def test_forward_examples():
    xa = symmetric_axis(4.0, 0.25)
    ra = AxisSpec(17, 0.0, 0.25)
    assert not forward_project(Phantom(), xa, ra).values.any()
    g = forward_project(UNIT, xa, ra, AngularQuadrature(256))
    np.testing.assert_array_equal(g.values[:, 0], eval_phantom(UNIT, xa.coords, 0.0))
    with pytest.raises(ValueError):
        forward_project(UNIT, xa, AxisSpec(4, 0.25, 0.25))


def test_forward_matches_closed_form_small():
    xa = symmetric_axis(4.0, 0.25)
    ra = AxisSpec(25, 0.0, 0.25)
    g = forward_project(UNIT, xa, ra, AngularQuadrature(2048))
    ref = np.array([[gaussian_forward_oracle(0, 0, 1, 1, x, r) for r in ra.coords]
                    for x in xa.coords])
    assert np.max(np.abs(g.values - ref) / ref) < 1e-9


def test_angular_convergence():
    # spectral convergence of the periodic rule: a narrow gaussian seen
    # from a small circle needs a few nodes per width, then the error collapses
    p = gaussian_phantom(0.05)
    x, r = 0.3, 0.4
    ref = spherical_mean(p, x, r, AngularQuadrature(8192))
    err = {M: abs(spherical_mean(p, x, r, AngularQuadrature(M)) - ref) / ref for M in (16, 32, 64)}
    assert err[32] / err[16] < 1e-3
    assert err[64] < 1e-14
    # on the unit gaussian M = 256 and M = 512 agree to rounding
    a = spherical_mean(UNIT, 1.0, 2.0, AngularQuadrature(256))
    b = spherical_mean(UNIT, 1.0, 2.0, AngularQuadrature(512))
    assert abs(a - b) <= 1e-14 * b


def test_decay_at_large_radius():
    diag = math.hypot(8, 8)
    assert spherical_mean(UNIT, 0.0, diag + 6.0) < 1e-12


comp = st.builds(PhantomComponent, st.sampled_from(["gaussian", "smooth_bump"]),
                 st.floats(-2, 2), st.floats(-2, 2), st.floats(0.3, 1.5), st.floats(-1, 1))


@given(st.lists(comp, min_size=1, max_size=2), st.lists(comp, min_size=1, max_size=2),
       st.floats(-2, 2), st.floats(-2, 2))
def test_linearity(c1, c2, a, b):
    xa = symmetric_axis(2.0, 0.5)
    ra = AxisSpec(5, 0.0, 0.5)
    q = AngularQuadrature(64)
    p1, p2 = Phantom.from_components(c1), Phantom.from_components(c2)
    scaled = [PhantomComponent(c.kind, c.center_x, c.center_y, c.width, a * c.amplitude)
              for c in c1] + [PhantomComponent(c.kind, c.center_x, c.center_y, c.width,
                                               b * c.amplitude) for c in c2]
    lhs = forward_project(Phantom.from_components(scaled), xa, ra, q).values
    rhs = a * forward_project(p1, xa, ra, q).values + b * forward_project(p2, xa, ra, q).values
    scale = max(1.0, np.max(np.abs(rhs)))
    np.testing.assert_allclose(lhs, rhs, atol=1e-13 * scale, rtol=0)
