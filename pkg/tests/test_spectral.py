import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate, special

from conftest import gaussian_fhat
from spherical_radon.core import (AxisSpec, DataSpectrum, FieldGrid, FieldSpectrum, Sinogram,
                                  gaussian_phantom, make_dimension_config, sample_field,
                                  symmetric_axis)
from spherical_radon.spectral import (apply_K, cone_limit, data_spectrum_to_sinogram,
                                      fhat_from_ghat, fhat_pointwise, field_to_spectrum,
                                      fractional_laplacian, frequency_axis, ghat_from_fhat,
                                      ghat_pointwise, hilbert_y, norm_window_scan,
                                      sinogram_to_data_spectrum, spectrum_to_field)

CFG1 = make_dimension_config(1)


def field(values, h=0.25):
    ax_x = AxisSpec(values.shape[0], -(values.shape[0] // 2) * h, h)
    ax_y = AxisSpec(values.shape[1], -(values.shape[1] // 2) * h, h)
    return FieldGrid(ax_x, ax_y, values)


# ---------------------------------------------------------------------------
# 2D transform

def test_field_spectrum_examples():
    ax = symmetric_axis(8.0, 1 / 16)
    zero = field_to_spectrum(FieldGrid(ax, ax, np.zeros((257, 257))))
    assert not zero.values.any()
    u = sample_field(gaussian_phantom(1.0), ax, ax)
    F = field_to_spectrum(u)
    i0 = int(np.argmin(np.abs(F.xi_axis.coords)))
    j0 = int(np.argmin(np.abs(F.eta_axis.coords)))
    assert F.values[i0, j0].real == pytest.approx(2 * math.pi, rel=1e-10)
    assert np.max(np.abs(F.values[i0].imag)) <= 1e-10 * np.max(np.abs(F.values))
    np.testing.assert_allclose(F.values, F.values[:, ::-1], rtol=0,
                               atol=1e-10 * np.max(np.abs(F.values)))
    X, Y = np.meshgrid(F.xi_axis.coords, F.eta_axis.coords, indexing="ij")
    np.testing.assert_allclose(F.values, gaussian_fhat(X, Y), atol=1e-10, rtol=0)


def test_field_spectrum_round_trip():
    ax = symmetric_axis(4.0, 1 / 8)
    u = sample_field(gaussian_phantom(0.6, center=(0.5, 0.7)), ax, ax)
    back, residue = spectrum_to_field(field_to_spectrum(u), ax, ax)
    assert residue < 1e-12
    assert np.linalg.norm(back.values - u.values) <= 1e-12 * np.linalg.norm(u.values)


# ---------------------------------------------------------------------------
# multipliers

def _periodic_axis(n, k, omega):
    """Symmetric axis of n samples on which omega is the k-th periodic harmonic."""
    h = 2 * math.pi * k / (n * omega)
    return symmetric_axis((n - 1) / 2 * h, h)


def test_hilbert_examples():
    ax = symmetric_axis(4.0, 0.25)
    const = FieldGrid(ax, ax, np.full((33, 33), 3.0))
    assert np.max(np.abs(hilbert_y(const).values)) < 1e-15
    y_ax = _periodic_axis(65, 5, 1.7)
    y = y_ax.coords
    u = FieldGrid(ax, y_ax, np.tile(np.cos(1.7 * y), (33, 1)))
    np.testing.assert_allclose(hilbert_y(u).values, np.tile(np.sin(1.7 * y), (33, 1)),
                               atol=1e-10, rtol=0)


@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([31, 32, 33]))
def test_hilbert_squared_and_isometry(seed, n):
    rng = np.random.default_rng(seed)
    v = rng.standard_normal((5, n))
    u = field(v)
    hh = hilbert_y(hilbert_y(u)).values
    dc = v.mean(axis=1, keepdims=True)
    nyq = 0.0
    if n % 2 == 0:
        # the Nyquist mode is annihilated along with DC
        nyq = (v * (-1.0) ** np.arange(n)).mean(axis=1, keepdims=True) * (-1.0) ** np.arange(n)
    np.testing.assert_allclose(hh, -v + dc + nyq, atol=1e-10, rtol=0)
    w = v - dc - nyq
    hw = hilbert_y(field(w)).values
    assert abs(np.linalg.norm(hw) - np.linalg.norm(w)) <= 1e-12 * np.linalg.norm(w)


@given(st.integers(0, 2 ** 32 - 1))
def test_hilbert_even_to_odd(seed):
    v = np.random.default_rng(seed).standard_normal((4, 17))
    v = v + v[:, ::-1]
    h = hilbert_y(field(v)).values
    np.testing.assert_allclose(h, -h[:, ::-1], atol=1e-12, rtol=0)


def test_fractional_laplacian():
    ax = symmetric_axis(2.0, 0.25)
    u = FieldGrid(ax, ax, np.random.default_rng(0).standard_normal((17, 17)))
    assert fractional_laplacian(u, CFG1) is u
    # single mode cos(xi0 x) cos(eta0 y) on periodic grids
    x_ax = _periodic_axis(33, 3, math.sqrt(2.0))
    y_ax = _periodic_axis(35, 4, math.sqrt(2.0))
    mode = np.outer(np.cos(math.sqrt(2.0) * x_ax.coords), np.cos(math.sqrt(2.0) * y_ax.coords))
    m = FieldGrid(x_ax, y_ax, mode)
    np.testing.assert_allclose(fractional_laplacian(m, make_dimension_config(2)).values,
                               2.0 * mode, atol=1e-12, rtol=0)
    np.testing.assert_allclose(fractional_laplacian(m, make_dimension_config(3)).values,
                               4.0 * mode, atol=1e-12, rtol=0)


def test_apply_K_examples():
    xi_ax = AxisSpec(7, -3.0, 1.0)
    s_ax = AxisSpec(6, 0.0, 1.0)
    ones = DataSpectrum(xi_ax, s_ax, np.ones((7, 6)))
    K = apply_K(ones, CFG1).values
    assert K[6, 5] == 4.0          # xi = 3, s = 5
    assert K[6, 3] == 0.0          # s = |xi|
    assert not K[np.abs(xi_ax.coords)[:, None] >= s_ax.coords[None, :]].any()
    assert not apply_K(DataSpectrum(xi_ax, s_ax, np.zeros((7, 6))), CFG1).values.any()


# ---------------------------------------------------------------------------
# g^ <-> f^

def test_ghat_example():
    # f^ = 1 at xi = 0, s = 2 gives g^ = 2 f^ / s = 1
    assert ghat_pointwise(1.0, 0.0, 2.0, CFG1) == 1.0
    xi_ax = AxisSpec(5, -2.0, 1.0)
    eta_ax = AxisSpec(9, -4.0, 1.0)
    F = FieldSpectrum(xi_ax, eta_ax, np.ones((5, 9)))
    G = ghat_from_fhat(F, CFG1, AxisSpec(5, 0.0, 1.0))
    assert G.values[2, 2] == pytest.approx(1.0, rel=1e-15)
    below = np.abs(xi_ax.coords)[:, None] >= G.eta_radial_axis.coords[None, :]
    assert not G.values[below].any()
    assert not ghat_from_fhat(FieldSpectrum(xi_ax, eta_ax, np.zeros((5, 9))), CFG1).values.any()


@given(st.floats(-20, 20), st.floats(-20, 20).filter(lambda e: abs(e) > 1e-3),
       st.sampled_from([1, 2, 3]), st.complex_numbers(max_magnitude=1e3))
def test_relations_are_mutual_inverses(xi, eta, n, fval):
    cfg = make_dimension_config(n)
    s = math.hypot(xi, eta)
    g = ghat_pointwise(fval, xi, s, cfg)
    back = fhat_pointwise(g, xi, eta, cfg)
    assert abs(back - fval) <= 1e-10 * max(abs(fval), 1e-300)


def test_fhat_examples():
    xi_ax = AxisSpec(9, -4.0, 1.0)
    s_ax = AxisSpec(9, 0.0, 0.5)
    F = fhat_from_ghat(DataSpectrum(xi_ax, s_ax, np.zeros((9, 9))), CFG1)
    assert not F.values.any()
    rng = np.random.default_rng(1)
    G = DataSpectrum(xi_ax, s_ax, rng.standard_normal((9, 9)))
    F = fhat_from_ghat(G, CFG1)
    assert not F.values[:, F.eta_axis.coords == 0.0].any()
    np.testing.assert_array_equal(F.values, F.values[:, ::-1])
    assert 0.0 < F.meta["coverage"] <= 1.0


def test_grid_round_trip_on_smooth_spectrum():
    xi_ax = AxisSpec(41, -2.0, 0.1)
    eta_ax = AxisSpec(801, -8.0, 0.02)
    X, Y = np.meshgrid(xi_ax.coords, eta_ax.coords, indexing="ij")
    F = FieldSpectrum(xi_ax, eta_ax, gaussian_fhat(X, Y))
    G = ghat_from_fhat(F, CFG1, AxisSpec(201, 0.0, 0.02))
    back = fhat_from_ghat(G, CFG1, AxisSpec(61, -3.0, 0.1))
    Xb, Yb = np.meshgrid(xi_ax.coords, back.eta_axis.coords, indexing="ij")
    sel = (Yb != 0) & (np.hypot(Xb, Yb) < 3.8)
    err = np.abs(back.values - gaussian_fhat(Xb, Yb))[sel]
    assert err.max() < 1e-5


def test_cone_limit_of_a_polynomial_in_t():
    xi_ax = AxisSpec(5, -1.0, 0.5)
    s_ax = AxisSpec(40, 0.0, 0.1)
    t = s_ax.coords[None, :] ** 2 - xi_ax.coords[:, None] ** 2
    G = DataSpectrum(xi_ax, s_ax, np.where(t > 0, 2.0 + 3.0 * t - t ** 3, 0.0))
    np.testing.assert_allclose(cone_limit(G), 2.0, rtol=1e-12)


# ---------------------------------------------------------------------------
# mixed transform of sinograms

def test_j0_matches_integral_representation():
    for x in (0.0, 0.3, 2.0, 7.5, 31.0, 120.0):
        ref, _ = integrate.quad(lambda th: math.cos(x * math.sin(th)), 0, math.pi,
                                epsabs=1e-14, limit=400)
        assert abs(special.j0(x) - ref / math.pi) < 1e-12


def _radial_sino(h=1 / 16, R=16.0, x_half=16.0):
    x_ax = symmetric_axis(x_half, h)
    r_ax = AxisSpec(int(round(R / h)) + 1, 0.0, h)
    vals = np.zeros((x_ax.count, r_ax.count))
    vals[x_ax.count // 2] = np.exp(-0.5 * r_ax.coords ** 2) / h
    return Sinogram(x_ax, r_ax, vals)


@pytest.mark.parametrize("tail", [False, True])
def test_hankel_of_radial_gaussian(tail):
    g = _radial_sino()
    G = sinogram_to_data_spectrum(g, CFG1, tail_correction=tail)
    s = G.eta_radial_axis.coords
    # a centred delta in x has a flat transform in xi; the leftover
    # quadrature error is the h^4 Euler-Maclaurin term (~2e-7 * 2 pi here)
    np.testing.assert_allclose(G.values, np.tile(2 * math.pi * np.exp(-0.5 * s ** 2),
                                                 (G.xi_axis.count, 1)), atol=5e-6, rtol=0)


def test_sinogram_spectrum_examples():
    g = _radial_sino()
    zero = Sinogram(g.x_axis, g.r_axis, np.zeros(g.values.shape))
    assert not sinogram_to_data_spectrum(zero, CFG1).values.any()
    with pytest.raises(ValueError):
        sinogram_to_data_spectrum(g, make_dimension_config(2))
    G = sinogram_to_data_spectrum(g, CFG1)
    assert G.eta_radial_axis.spacing == pytest.approx(math.pi / g.r_axis.max)
    assert G.xi_axis == frequency_axis(g.x_axis)


def test_inverse_hankel_of_radial_gaussian():
    xi_ax = frequency_axis(symmetric_axis(16.0, 1 / 16))
    s_ax = AxisSpec(257, 0.0, 1 / 16)
    s = s_ax.coords
    G = DataSpectrum(xi_ax, s_ax, np.tile(2 * math.pi * np.exp(-0.5 * s ** 2), (xi_ax.count, 1)))
    r_ax = AxisSpec(129, 0.0, 1 / 16)
    g = data_spectrum_to_sinogram(G, r_ax, symmetric_axis(16.0, 1 / 16))
    i0 = g.x_axis.count // 2
    np.testing.assert_allclose(g.values[i0] * g.x_axis.spacing, np.exp(-0.5 * r_ax.coords ** 2),
                               atol=1e-6, rtol=0)
    zero = DataSpectrum(xi_ax, s_ax, np.zeros(G.values.shape))
    assert not data_spectrum_to_sinogram(zero, r_ax).values.any()


def test_mixed_transform_round_trip():
    # smooth, decaying data: a gaussian in x times a gaussian in rho
    x_ax = symmetric_axis(16.0, 1 / 8)
    r_ax = AxisSpec(129, 0.0, 1 / 8)
    X, Rr = np.meshgrid(x_ax.coords, r_ax.coords, indexing="ij")
    vals = np.exp(-0.5 * (X / 1.3) ** 2 - 0.5 * (Rr / 1.1) ** 2)
    g = Sinogram(x_ax, r_ax, vals)
    G = sinogram_to_data_spectrum(g, CFG1, tail_correction=False)
    back = data_spectrum_to_sinogram(G, r_ax)
    inner = r_ax.coords <= 0.8 * r_ax.max
    d = (back.values - vals)[:, inner]
    assert np.linalg.norm(d) <= 1e-3 * np.linalg.norm(vals[:, inner])


def test_K_magnitude_identity(gaussian_sino):
    G = sinogram_to_data_spectrum(gaussian_sino, CFG1)
    K = apply_K(G, CFG1)
    xi = G.xi_axis.coords[:, None]
    s = G.eta_radial_axis.coords[None, :]
    ds = G.eta_radial_axis.spacing
    sel = (s > np.abs(xi) + 3 * ds) & (s < 10.0)
    eta = np.sqrt(np.maximum(s * s - xi * xi, 0.0))
    ref = 2.0 * np.abs(gaussian_fhat(xi, eta, 0.7))
    ref = np.broadcast_to(ref, K.values.shape)
    err = np.linalg.norm((np.abs(K.values) - ref)[sel]) / np.linalg.norm(ref[sel])
    assert err <= 1e-2


# ---------------------------------------------------------------------------
# windowed norms

def test_norm_scan_examples():
    xi_ax = AxisSpec(33, -4.0, 0.25)
    s_ax = AxisSpec(17, 0.0, 0.25)
    zero = DataSpectrum(xi_ax, s_ax, np.zeros((33, 17)))
    for p in (1, 2):
        assert norm_window_scan(zero, p, [1, 2, 4]).norms == (0.0, 0.0, 0.0)
    with pytest.raises(ValueError):
        norm_window_scan(zero, 3, [1])
    with pytest.raises(ValueError):
        norm_window_scan(zero, 1, [2, 1])
    with pytest.raises(ValueError):
        norm_window_scan(zero, 1, [8])


def test_norm_scan_l1_of_gaussian_ghat():
    # ||g^||_1 over (xi, eta in R^2) is 8 pi^3 for the unit gaussian scene
    xi_ax = AxisSpec(1025, -512 * 2 * math.pi / 128, 2 * math.pi / 128)
    s_ax = AxisSpec(int(12 / (math.pi / 1024)) + 1, 0.0, math.pi / 1024)
    xi = xi_ax.coords[:, None]
    s = s_ax.coords[None, :]
    t = s * s - xi * xi
    ghat = ghat_pointwise(gaussian_fhat(xi, np.sqrt(np.maximum(t, 0.0))), xi, s, CFG1,
                          band=0.5 * s_ax.spacing)
    G = DataSpectrum(xi_ax, s_ax, ghat)
    table = norm_window_scan(G, 1, [4, 8, 11])
    assert table.norms[-1] == pytest.approx(8 * math.pi ** 3, rel=3e-3)
    assert abs(table.norms[-1] - table.norms[-2]) < 1e-6 * table.norms[-1]
