"""A two-target location problem.

Each target is a unit ball reached along its own direction; the sum of the
two minimal times is minimized over a box. The solver result is checked
against a brute-force grid and the multiplier certificate.
"""
import math

import numpy as np

from dirtime import geometry as geo
from dirtime import solver
from dirtime.oracle import GridSpec, oracle_grid_min
from dirtime.solver import ProblemSpec, SolveOptions, Step, Target

p = ProblemSpec(
    2,
    geo.Box([-5, -5], [5, 5]),
    (Target(geo.Ball([4, 0], 1), [1, 0]), Target(geo.Ball([0, 4], 1), [0, 1])),
)

print("existence:", solver.existence_precheck(p).to_dict())
print("uniqueness:", solver.uniqueness_precheck(p))

rep = solver.solve(p, SolveOptions(np.zeros(2), trace=True))
print(f"solver: x={rep.best_x} S={rep.best_value:.6f} after {rep.iterations_used} steps ({rep.status})")
print("closed form:", 8 - 2 * math.sqrt(2))

node, val = oracle_grid_min(p, GridSpec([0, 0], [1.5, 1.5], 1500))
print(f"grid: x={node} S={val:.6f}")

cert = solver.certify(p, rep.best_x, tol=1e-4)
print("multipliers:", [np.round(m, 4).tolist() for m in cert.multipliers], "residual", f"{cert.residual:.2e}")
print("perturbed point residual:", f"{solver.certify(p, [0.8, 0.6]).residual:.3f}")

# %% minimax version: same targets, worst time minimized
pm = ProblemSpec(2, p.constraint, p.targets, "max")
rm = solver.solve(pm, SolveOptions(np.zeros(2), step=Step("diminishing", 0.03)))
print(f"max objective: x={rm.best_x} value={rm.best_value:.6f}")

# %% convergence of the best value
best = np.minimum.accumulate([f for _, _, f in rep.trace])
for k in (1, 10, 50, len(best) - 1):
    print(f"k={k:4d} best value {best[k]:.10f}")
