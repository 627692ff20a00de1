"""g^ is integrable but not square integrable.

g^ carries the factor 1 / sqrt(s^2 - xi^2), singular on the cone s = |xi|.
The windowed L^1 norm settles as the window grows and barely moves when
the radial grid is refined, while the L^2 norm picks up a logarithm of the
cone resolution: it keeps climbing under refinement.

    python demos/integrability.py
"""
import math

import numpy as np

from spherical_radon import AxisSpec, FieldSpectrum, ghat_from_fhat, make_dimension_config
from spherical_radon import norm_window_scan

cfg = make_dimension_config(1)
xi_ax = AxisSpec(2049, -1024 * 2 * math.pi / 128, 2 * math.pi / 128)
eta_ax = AxisSpec(4001, -20.0, 0.01)
xi = xi_ax.coords[:, None]
eta = eta_ax.coords[None, :]
# unit gaussian scene
F = FieldSpectrum(xi_ax, eta_ax, 2 * math.pi * np.exp(-0.5 * (xi ** 2 + eta ** 2)))
windows = [1, 2, 4, 8, 16]

print("exact L1 norm 8 pi^3 =", round(8 * math.pi ** 3, 4))
for k in (64, 256, 1024):
    G = ghat_from_fhat(F, cfg, AxisSpec(int(20.0 * k / math.pi) + 1, 0.0, math.pi / k))
    l1 = norm_window_scan(G, 1, windows, cfg).norms
    l2 = norm_window_scan(G, 2, windows, cfg).norms
    print(f"ds = pi/{k:<5d} L1 {' '.join(f'{v:9.4f}' for v in l1)}")
    print(f"{'':13s} L2 {' '.join(f'{v:9.4f}' for v in l2)}")
