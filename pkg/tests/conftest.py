"""Shared grids and cached sinograms.

Forward projections of the test scenes are the expensive part of the
suite, so each one is computed once per session.
"""
import math

import numpy as np
import pytest
from hypothesis import settings

from spherical_radon.core import AxisSpec, bump_phantom, gaussian_phantom, symmetric_axis
from spherical_radon.forward import AngularQuadrature, forward_project

settings.register_profile("ci", deadline=None, max_examples=40)
settings.load_profile("ci")

# refinement ladder: (spacing, angular nodes, truncation Z, r_max = x half-width)
LADDER = ((1 / 4, 1024, 12.0, 16.0), (1 / 8, 2048, 24.0, 32.0), (1 / 16, 4096, 48.0, 64.0))


def sinogram_for(phantom, h, M, R):
    x_axis = symmetric_axis(R, h)
    r_axis = AxisSpec(int(round(R / h)) + 1, 0.0, h)
    return forward_project(phantom, x_axis, r_axis, AngularQuadrature(M))


def field_axes(h, half_width=8.0):
    ax = symmetric_axis(half_width, h)
    return ax, ax


class Ladder:
    """Sinograms of one scene at the three refinement levels, built lazily."""

    def __init__(self, phantom, M0):
        self.phantom = phantom
        self.levels = [(h, M0 * 2 ** i, Z, R) for i, (h, _, Z, R) in enumerate(LADDER)]
        self._cache = {}

    def sinogram(self, level):
        if level not in self._cache:
            h, M, _, R = self.levels[level]
            self._cache[level] = sinogram_for(self.phantom, h, M, R)
        return self._cache[level]

    def Z(self, level):
        return self.levels[level][2]

    def axes(self, level):
        return field_axes(self.levels[level][0])


@pytest.fixture(scope="session")
def bump():
    return bump_phantom()


@pytest.fixture(scope="session")
def gaussian():
    return gaussian_phantom(0.7)


@pytest.fixture(scope="session")
def bump_ladder(bump):
    return Ladder(bump, 1024)


@pytest.fixture(scope="session")
def gaussian_ladder(gaussian):
    return Ladder(gaussian, 512)


@pytest.fixture(scope="session")
def bump_sino(bump_ladder):
    """Bump scene on the default grid: x in [-64, 64], r in [0, 64], spacing 1/16, M = 4096."""
    return bump_ladder.sinogram(2)


@pytest.fixture(scope="session")
def gaussian_sino(gaussian_ladder):
    """Gaussian (sigma 0.7) on the default grid with M = 2048."""
    return gaussian_ladder.sinogram(2)


@pytest.fixture(scope="session")
def small_bump_sino(bump_ladder):
    return bump_ladder.sinogram(0)


@pytest.fixture(scope="session")
def default_axes():
    return field_axes(1 / 16)


def gaussian_fhat(xi, eta, sigma=1.0):
    return 2 * math.pi * sigma ** 2 * np.exp(-0.5 * sigma ** 2 * (xi ** 2 + eta ** 2))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, 11):
        terminalreporter.write_line(mod.RESULTS.get(n, f"criterion {n:2d}: FAIL  (not run or "
                                                       "stopped before its check)"))
