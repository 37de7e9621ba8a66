"""Minimal time to a disk along a fixed direction.

Run with ``python3 demos/disk_walkthrough.py``. Evaluates T, the projection,
directional derivatives (exact and finite-difference), the subdifferential
slices and the conjugate for the disk of radius sqrt(8) with v = (1, 1).
"""
import math

import numpy as np

from dirtime import geometry as geo
from dirtime import mintime, oracle, subdiff

disk = geo.Ball([0, 0], math.sqrt(8))
v = np.array([1.0, 1.0])

# %% values along the diagonal
for x in ([-3, -3], [-2, -2], [0, 0], [2, 2], [3, 3]):
    T = mintime.min_time(disk, v, x)
    phi = mintime.scalarization(disk, v, x)
    print(f"x={x!s:10} T={T:8.4f} phi={phi:8.4f}")

# %% projection and derivatives at (-3, -3)
x = np.array([-3.0, -3.0])
pr = mintime.projection_pi(disk, v, x)
print("projection", pr.point, "after time", pr.t)
for u in ([1, 0], [0, 1], v, [-1, 1]):
    dd = mintime.directional_derivative(disk, v, x, u)
    fd = oracle.fd_directional(disk, v, x, u)
    print(f"u={u!s:12} exact={dd.value:+.6f} fd={fd:+.6f}")

# %% subdifferentials
print("at (-3,-3):", subdiff.convex_subdifferential(disk, v, x).polyhedra[0].vertices)
sl = subdiff.convex_subdifferential(disk, v, [-2, -2])
print("at (-2,-2): segment with vertices", sl.polyhedra[0].vertices.tolist())
sl = subdiff.singular_subdifferential(disk, v, [-2, -2])
print("singular slice at (-2,-2):", sl.constraint, sl.polyhedra[0].vertices.tolist())

# %% conjugate
for y in ([-0.5, -0.5], [0, 0], [-1, -1]):
    print("T*", y, "=", subdiff.conjugate(disk, v, y))
