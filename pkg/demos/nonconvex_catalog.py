"""Nonconvex targets from the plane catalog.

Compares Frechet and limiting subdifferentials and Lipschitz verdicts at the
vertex of the abs-cone set, the sqrt-cusp set and the axis cross.
"""
import numpy as np

from dirtime import cones, lipschitz, mintime, subdiff
from dirtime import geometry as geo

v = np.array([0.0, 1.0])
origin = np.zeros(2)

for name in ("abs-cone", "sqrt-cusp", "axis-cross"):
    s = geo.Implicit2D(name)
    print(f"--- {name}")
    print("  recession cone generators:", geo.recession_cone(s).generators.tolist())
    F = subdiff.frechet_subdifferential(s, v, origin)
    L = subdiff.limiting_subdifferential(s, v, origin)
    print("  Frechet pieces :", [P.vertices.tolist() for P in F.polyhedra], F.exactness)
    print("  limiting pieces:", [P.vertices.tolist() for P in L.polyhedra], L.exactness)
    rep = lipschitz.local_lipschitz(s, v, origin, seed=1)
    print("  local Lipschitz:", rep.verdict, f"(sampled ratio {rep.empirical_ratio:.3g})")

# %% the cusp: below the vertex, a sideways shift of h saves time sqrt(h)
s = geo.Implicit2D("sqrt-cusp")
for h in (1e-2, 1e-4, 1e-6):
    a = mintime.min_time(s, v, [0, -np.sqrt(h)])
    b = mintime.min_time(s, v, [h, -np.sqrt(h)])
    print(f"h={h:g}: |T(a) - T(b)| / |a - b| = {abs(a - b) / h:.3g}")

# %% limiting normal cone of the abs-cone vertex is a union of two rays
print(cones.limiting_normal_cone(geo.Implicit2D("abs-cone"), origin))
