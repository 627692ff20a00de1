"""Why the classical backprojection cannot invert circular means.

A non-negative scene gives data that decays only like 1/r, so the
classical backprojection at a fixed point grows like ln Z as the
truncation window Z widens. The modified backprojection (the y-derivative
of the radially looked-up data) settles instead.

    python demos/divergence.py
"""
import numpy as np

from spherical_radon import (AngularQuadrature, AxisSpec, bump_phantom, divergence_probe,
                             eval_phantom, forward_project, symmetric_axis)

h, R = 1 / 8, 140.0
scene = bump_phantom()
g = forward_project(scene, symmetric_axis(R, h), AxisSpec(int(R / h) + 1, 0.0, h),
                    AngularQuadrature(8192))

Zs = [8, 16, 32, 64, 128]
classical = divergence_probe(g, 0.0, 0.5, Zs, "classical")
modified = divergence_probe(g, 0.0, 0.5, Zs, "modified")

print(f"{'Z':>6} {'classical':>12} {'modified':>12}")
for Z, a, b in zip(Zs, classical.values, modified.values):
    print(f"{Z:6d} {a:12.6f} {b:12.6f}")
print(f"classical fit a + b ln Z: b = {classical.slope_b:.4f}, r^2 = {classical.r_squared:.6f}")
print(f"modified: last doubling moves the value by {modified.last_increment():.1e} of its size")
# the slope is the projection of the scene through x0 over pi
y = np.linspace(-4, 4, 801)
print(f"predicted slope P(0) / pi = {eval_phantom(scene, 0.0, y).sum() * 0.01 / np.pi:.4f}")
