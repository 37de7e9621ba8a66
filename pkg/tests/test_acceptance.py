"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` or directly with
``python tests/test_acceptance.py``.
"""

import math
import sys
import time

import numpy as np
import pytest

from dirtime import geometry as geo
from dirtime import lipschitz, mintime, oracle, solver, subdiff
from dirtime.catalog import CATALOG
from dirtime.polyhedral import Polyhedron, _sort_unique, _unit_rows

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from instances import SQRT8, point_near, random_convex, random_direction, random_polyhedral_with_recession  # noqa: E402

R2 = math.sqrt(2.0)
X_OPT = np.array([1 / R2, 1 / R2])


def two_balls(objective="sum", gamma0=1.0):
    p = solver.ProblemSpec(
        2,
        geo.Box([-5, -5], [5, 5]),
        (
            solver.Target(geo.Ball([4, 0], 1), np.array([1.0, 0.0])),
            solver.Target(geo.Ball([0, 4], 1), np.array([0.0, 1.0])),
        ),
        objective,
    )
    o = solver.SolveOptions(np.zeros(2), max_iters=5000, step=solver.Step("diminishing", gamma0), tol=1e-6, seed=0)
    return p, o


def _in_domain_draw(rng, max_t=4.0):
    """Random convex set, direction and a point with finite positive T."""
    while True:
        s = random_convex(rng)
        v = random_direction(rng, s.dim)
        w = geo.euclid_project(s, point_near(rng, s))
        x = w - rng.uniform(0.05, max_t) * v
        T = mintime.min_time(s, v, x)
        if 0 < T < math.inf:
            return s, v, x, T


def _same_poly(P: Polyhedron, vertices=(), rays=(), lineality=(), tol=1e-9):
    d = P.dim
    Q = Polyhedron(_sort_unique(np.array(vertices, float).reshape(-1, d)),
                   _sort_unique(_unit_rows(np.array(rays, float).reshape(-1, d))),
                   np.array(lineality, float).reshape(-1, d))
    return P.same_as(Q, tol)


# -- criteria -----------------------------------------------------------------


def criterion_1():
    s, v = geo.Ball([0, 0], SQRT8), np.array([1.0, 1.0])
    a = subdiff.convex_subdifferential(s, v, [-2, -2])
    b = subdiff.convex_subdifferential(s, v, [2, 2])
    c = subdiff.convex_subdifferential(s, v, [-3, -3])
    ok = (
        len(a.polyhedra) == 1 and _same_poly(a.polyhedra[0], [[-0.5, -0.5], [0, 0]])
        and len(b.polyhedra) == 1 and _same_poly(b.polyhedra[0], [[0, 0]], [[1 / R2, 1 / R2]])
        and len(c.polyhedra) == 1 and _same_poly(c.polyhedra[0], [[-0.5, -0.5]])
    )
    return ok, f"at (-2,-2) {a.polyhedra[0].to_dict()}; at (2,2) {b.polyhedra[0].to_dict()}; at (-3,-3) {c.polyhedra[0].to_dict()}"


def criterion_2():
    v = np.array([1.0, 0.0])
    sq = geo.Box([-1, -1], [1, 1])
    ext = geo.Box([-1, -1], [np.inf, 1])
    t1, t2 = mintime.min_time(sq, v, [2, 0]), mintime.min_time(ext, v, [2, 0])
    rng = np.random.default_rng(2)
    X = rng.uniform(-4, 4, size=(50, 2))
    p1, p2 = mintime.scalarization_many(sq, v, X), mintime.scalarization_many(ext, v, X)
    fin = np.isfinite(p1)
    same = np.array_equal(fin, np.isfinite(p2)) and np.all(p1[~fin] == p2[~fin])
    err = float(np.max(np.abs(p1[fin] - p2[fin]), initial=0.0))
    ok = t1 == math.inf and t2 == 0.0 and same and err <= 1e-9
    return ok, f"T1={t1} T2={t2} max|phi1-phi2|={err:.2e} over 50 points"


def criterion_3():
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(1000):
        s, v, x, T = _in_domain_draw(rng)
        lam = np.concatenate([[0.0, T], rng.uniform(0, T, 3)])
        vals = mintime.min_time_many(s, v, x[None, :] + lam[:, None] * v[None, :])
        worst = max(worst, float(np.max(np.abs(vals - T + lam))))
    return worst <= 1e-9, f"max |T(x+lv)-T(x)+l| = {worst:.2e} over 1000 instances"


def criterion_4():
    rng = np.random.default_rng(4)
    worst, n = 0.0, 0
    while n < 1000:
        s, v = random_polyhedral_with_recession(rng)
        inside, exact = lipschitz.v_in_recession(s, v)
        if not (inside and exact):
            continue
        X = 3 * rng.normal(size=(5, s.dim))
        T = mintime.min_time_many(s, v, X)
        phi = mintime.scalarization_many(s, v, X)
        ref = np.maximum(phi, 0.0)
        fin = np.isfinite(T)
        if not np.array_equal(fin, np.isfinite(ref)):
            return False, "finiteness of T and max(phi, 0) differ"
        worst = max(worst, float(np.max(np.abs(T[fin] - ref[fin]), initial=0.0)))
        n += 1
    return worst <= 1e-9, f"max |T - max(phi,0)| = {worst:.2e} over 1000 instances"


def _fy_gap(s, v, x, T, y):
    return T + subdiff.conjugate(s, v, y) - float(y @ x)


def criterion_5():
    rng = np.random.default_rng(5)
    worst_ineq, worst_member, min_nonmember = 0.0, 0.0, math.inf
    misclassified = 0
    for k in range(500):
        s, v, x, T = _in_domain_draw(rng)
        if k % 5 == 0:
            # in-set points exercise the ge-1 and band slices
            x, T = x + T * v, 0.0
        sl = subdiff.convex_subdifferential(s, v, x)
        members = sl.sample(rng, 4)
        for y in members:
            g = _fy_gap(s, v, x, T, y)
            worst_member = max(worst_member, abs(g))
            worst_ineq = max(worst_ineq, -g)
        # non-members: random vectors and members pushed out of the slice
        cands = list(2 * rng.normal(size=(4, s.dim)))
        cands += [y - 0.5 * v / (v @ v) for y in members[:2]]
        cands += [y + rng.normal(size=s.dim) for y in members[:2]]
        for y in cands:
            g = _fy_gap(s, v, x, T, y)
            worst_ineq = max(worst_ineq, -g)
            if sl.contains(y, tol=1e-7):
                worst_member = max(worst_member, abs(g))
                continue
            min_nonmember = min(min_nonmember, g)
            if g <= 1e-9:
                misclassified += 1
    ok = worst_ineq <= 1e-9 and worst_member <= 1e-9 and misclassified == 0
    return ok, (f"max violation {worst_ineq:.2e}, max member gap {worst_member:.2e}, "
                f"min non-member gap {min_nonmember:.2e}, misclassified {misclassified}")


def _grazing(s, v, x, bound=3.0):
    """Ray meets the set at a shallow angle (subgradient norm above ``bound``).

    There the second derivative of T is large and the smallest difference
    step of the oracle is too coarse for a 1e-3 comparison.
    """
    if mintime.min_time(s, v, x) == 0.0:
        return False
    y = subdiff.select_subgradient(subdiff.frechet_subdifferential(s, v, x))
    return y is None or np.linalg.norm(y) > bound


def criterion_6():
    rng = np.random.default_rng(6)
    s, v = geo.Ball([0, 0], SQRT8), np.array([1.0, 1.0])
    dd = mintime.directional_derivative(s, v, [-3, -3], [1, 0])
    fd = oracle.fd_directional(s, v, [-3, -3], [1, 0])
    worst = abs(dd.value - fd)
    example_ok = dd.valid and abs(dd.value + 0.5) <= 1e-12 and worst <= 1e-3
    n = 1
    while n < 200:
        if n % 4 == 0:
            name = ("abs-cone", "cone", "sqrt-cusp")[n % 3]
            s, v = geo.Implicit2D(name), np.array([0.0, 1.0])
            x = rng.uniform(-2, 2, size=2)
            if mintime.min_time(s, v, x) in (0.0, math.inf):
                continue
        else:
            s, v, x, _ = _in_domain_draw(rng)
            if rng.uniform() < 0.2:
                x = x + mintime.min_time(s, v, x) * v
        u = rng.normal(size=s.dim)
        dd = mintime.directional_derivative(s, v, x, u)
        if not dd.valid or _grazing(s, v, x):
            continue
        fd = oracle.fd_directional(s, v, x, u, seed=n)
        if not (math.isfinite(dd.value) and math.isfinite(fd)):
            continue
        worst = max(worst, abs(dd.value - fd))
        n += 1
    ok = example_ok and worst <= 1e-3
    return ok, f"example value {-0.5 if example_ok else 'wrong'}; max |exact - fd| = {worst:.2e} at 200 points"


def criterion_7():
    rep = lipschitz.global_lipschitz(geo.Implicit2D("cone"), [0, 1], n_pairs=10_000, seed=7)
    ok = (rep.verdict == "lipschitz" and abs(rep.constant - R2) <= 1e-12
          and R2 - 1e-2 <= rep.empirical_ratio <= R2 + 1e-9)
    return ok, f"constant {rep.constant!r}, empirical ratio {rep.empirical_ratio!r}"


def criterion_8():
    v = np.array([0.0, 1.0])
    a = lipschitz.local_lipschitz(geo.Implicit2D("abs-cone"), v, [0, 0], seed=8)
    b = lipschitz.local_lipschitz(geo.Implicit2D("sqrt-cusp"), v, [0, 0], seed=8)
    s = geo.Implicit2D("axis-cross")
    c = lipschitz.local_lipschitz(s, v, [0, -2], seed=8)
    sl = subdiff.singular_subdifferential(s, v, [0, -2], seed=8)
    slice_ok = len(sl.polyhedra) == 1 and _same_poly(sl.polyhedra[0], [[0, 0]], lineality=[[1, 0]])
    ok = a.verdict == "lipschitz" and b.verdict == "not_lipschitz" and slice_ok and c.empirical_ratio <= 1.05
    return ok, (f"abs-cone {a.verdict}, sqrt-cusp {b.verdict}, axis-cross {c.verdict} "
                f"slice {sl.polyhedra[0].to_dict() if sl.polyhedra else None} ({sl.exactness}), "
                f"ratio {c.empirical_ratio:.4f}")


def criterion_9():
    p, o = two_balls()
    t0 = time.perf_counter()
    rep = solver.solve(p, o)
    elapsed = time.perf_counter() - t0
    cert = solver.certify(p, X_OPT)
    m_err = max(np.max(np.abs(cert.multipliers[0] - [-1, 1])), np.max(np.abs(cert.multipliers[1] - [1, -1])))
    ok = (abs(rep.best_value - (8 - 2 * R2)) <= 1e-3 and np.max(np.abs(rep.best_x - X_OPT)) <= 2e-3
          and rep.iterations_used <= 5000 and elapsed < 1.0 and m_err <= 1e-3 and cert.residual <= 1e-3)
    return ok, (f"value {rep.best_value:.7f}, x {np.round(rep.best_x, 6).tolist()}, {rep.iterations_used} its, "
                f"{elapsed:.3f}s, multiplier error {m_err:.1e}, residual {cert.residual:.1e}")


def criterion_10():
    p, o = two_balls("max", gamma0=0.03)
    rep = solver.solve(p, o)
    err = abs(rep.best_value - (4 - R2))
    return err <= 1e-3, f"value {rep.best_value:.7f} (error {err:.1e}), {rep.iterations_used} its"


def criterion_11():
    rng = np.random.default_rng(11)
    worst = 0.0
    n_inf = 0
    for k in range(1000):
        s = random_convex(rng)
        v = random_direction(rng, s.dim)
        if k % 2:
            x = 3 * rng.normal(size=s.dim)
        else:
            w = geo.euclid_project(s, point_near(rng, s))
            x = w - rng.uniform(0, 5) * v
        T = mintime.min_time(s, v, x)
        To = oracle.oracle_min_time(s, v, x, t_max=50.0, tol=1e-8)
        if math.isinf(T) and math.isinf(To):
            n_inf += 1
            continue
        if T > 50.0 and math.isinf(To):
            continue
        worst = max(worst, abs(T - To))
    cat_pts = []
    for name in sorted(CATALOG):
        s = geo.Implicit2D(name)
        for v in ([0, 1], [1, 0], [1, 1], [-1, 2]):
            for x in rng.uniform(-2, 2, size=(6, 2)):
                T = mintime.min_time(s, v, x)
                To = oracle.oracle_min_time(s, v, x, t_max=50.0, tol=1e-8)
                if math.isinf(T) and math.isinf(To):
                    continue
                cat_pts.append(abs(T - To))
    worst = max(worst, max(cat_pts))
    return worst <= 1e-6, f"max |T - oracle| = {worst:.2e} ({n_inf} draws with T = inf, {len(cat_pts)} catalog points)"


def criterion_12():
    rng = np.random.default_rng(12)
    bad = 0
    for _ in range(300):
        s, v, x, T = _in_domain_draw(rng)
        if rng.uniform() < 0.3:
            x = x + T * v
        ref = subdiff.convex_subdifferential(s, v, x)
        others = [
            subdiff.frechet_subdifferential(s, v, x),
            subdiff.dini_subdifferential(s, v, x),
            subdiff.limiting_subdifferential(s, v, x),
        ] + [subdiff.holder_subdifferential(s, v, x, e) for e in (0.5, 1.0, 2.0)]
        if not all(ref.same_set(o) for o in others):
            bad += 1
    return bad == 0, f"{bad} of 300 pairs differ"


def criterion_13():
    rng = np.random.default_rng(13)
    worst, count = 0.0, 0
    ops = (
        subdiff.convex_subdifferential,
        subdiff.frechet_subdifferential,
        subdiff.dini_subdifferential,
        subdiff.limiting_subdifferential,
        lambda s, v, x: subdiff.holder_subdifferential(s, v, x, 1.0),
    )
    for k in range(300):
        if k % 3 == 0:
            name = ("abs-cone", "cone", "sqrt-cusp", "axis-cross")[k % 4]
            s, v = geo.Implicit2D(name), np.array([0.0, 1.0])
            x = rng.uniform(-2, 2, size=2)
            if mintime.min_time(s, v, x) in (0.0, math.inf):
                continue
        else:
            s, v, x, _ = _in_domain_draw(rng)
        for op in ops:
            try:
                sl = op(s, v, x)
            except Exception:
                continue
            Y = sl.sample(rng, 8)
            if Y.shape[0]:
                worst = max(worst, float(np.max(np.abs(Y @ v + 1))))
                count += Y.shape[0]
    return worst <= 1e-9, f"max |<x*,v> + 1| = {worst:.2e} over {count} sampled members"


CRITERIA = [globals()[f"criterion_{i}"] for i in range(1, 14)]


def run(i):
    ok, detail = CRITERIA[i - 1]()
    return bool(ok), f"criterion {i:2d}: {'PASS' if ok else 'FAIL'} | {detail}"


@pytest.mark.parametrize("i", range(1, 14))
def test_criterion(i, capsys):
    ok, line = run(i)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    failed = 0
    for i in range(1, 14):
        t0 = time.perf_counter()
        ok, line = run(i)
        failed += not ok
        print(f"{line} [{time.perf_counter() - t0:.1f}s]", flush=True)
    sys.exit(1 if failed else 0)
