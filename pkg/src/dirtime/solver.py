"""Projected subgradient method for directional location problems.

Minimizes ``S(x) = sum_i T_{v_i}(x; Omega_i)`` (or the max of the terms) over a
convex constraint set, and checks optimality of a candidate through the
multiplier rule: pick ``x_i*`` in each subdifferential so that ``-sum x_i*``
is a normal to the constraint at the candidate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import cones
from . import geometry as geo
from . import subdiff
from .errors import NotInDomain, PreconditionError, UnsupportedVariant
from .mintime import check_direction, min_time
from .polyhedral import block_min_norm

WINDOW = 100
MAX_HALVINGS = 30


@dataclass(frozen=True)
class Target:
    set: geo.SetExpr
    direction: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "direction", check_direction(self.set, self.direction))


@dataclass(frozen=True)
class ProblemSpec:
    dimension: int
    constraint: geo.SetExpr
    targets: tuple
    objective: str = "sum"

    def __post_init__(self):
        targets = tuple(t if isinstance(t, Target) else Target(*t) for t in self.targets)
        if not targets:
            raise ValueError("at least one target is required")
        if self.objective not in ("sum", "max"):
            raise ValueError("objective must be 'sum' or 'max'")
        for t in targets:
            if t.set.dim != self.dimension:
                raise geo.DimensionMismatch("target dimension differs from problem dimension")
        if self.constraint.dim != self.dimension:
            raise geo.DimensionMismatch("constraint dimension differs from problem dimension")
        geo.require_convex(self.constraint, "the constraint set")
        object.__setattr__(self, "targets", targets)

    @property
    def convex(self) -> bool:
        return all(geo.is_convex(t.set) for t in self.targets)


@dataclass(frozen=True)
class Step:
    kind: str = "diminishing"  # diminishing | constant | polyak
    gamma: float = 1.0
    target_value: float | None = None

    def __post_init__(self):
        if self.kind not in ("diminishing", "constant", "polyak"):
            raise ValueError(f"unknown step kind {self.kind!r}")
        if self.kind == "polyak":
            if self.target_value is None:
                raise ValueError("Polyak steps need a target value")
        elif not self.gamma > 0:
            raise ValueError("step size must be positive")

    def size(self, k: int, f: float, g: np.ndarray) -> float:
        if self.kind == "diminishing":
            return self.gamma / math.sqrt(k)
        if self.kind == "constant":
            return self.gamma
        gg = float(g @ g)
        return max(f - self.target_value, 0.0) / gg if gg > 0 else 0.0


@dataclass(frozen=True)
class SolveOptions:
    x0: np.ndarray
    max_iters: int = 5000
    step: Step = field(default_factory=Step)
    tol: float = 1e-6
    seed: int = 0
    trace: bool = False
    heuristic: bool = False

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        object.__setattr__(self, "x0", np.asarray(self.x0, float).reshape(-1))


@dataclass
class SolveReport:
    best_x: np.ndarray
    best_value: float
    iterations_used: int
    status: str
    trace: list | None = None

    def to_dict(self):
        out = {
            "best_x": self.best_x.tolist(),
            "best_value": self.best_value,
            "iterations_used": self.iterations_used,
            "status": self.status,
        }
        if self.trace is not None:
            out["trace"] = [{"k": k, "x": x.tolist(), "value": f} for k, x, f in self.trace]
        return out


def evaluate_objective(p: ProblemSpec, x) -> float:
    x = geo.as_point(x, p.dimension)
    vals = [min_time(t.set, t.direction, x) for t in p.targets]
    return float(sum(vals)) if p.objective == "sum" else float(max(vals))


def _term_subgradient(t: Target, x, heuristic: bool):
    if geo.is_convex(t.set):
        d = subdiff.convex_subdifferential(t.set, t.direction, x)
    else:
        d = subdiff.limiting_subdifferential(t.set, t.direction, x)
    return subdiff.select_subgradient(d)


def _subgradient(p: ProblemSpec, x, heuristic: bool):
    """Objective value and one subgradient, or ``(value, None)`` on an empty slice."""
    vals = [min_time(t.set, t.direction, x) for t in p.targets]
    if p.objective == "sum":
        f = float(sum(vals))
        if not math.isfinite(f):
            return f, None
        g = np.zeros(p.dimension)
        for t in p.targets:
            gi = _term_subgradient(t, x, heuristic)
            if gi is None:
                return f, None
            g += gi
        return f, g
    f = float(max(vals))
    if not math.isfinite(f):
        return f, None
    i = min(j for j, val in enumerate(vals) if val >= f - 1e-12)
    return f, _term_subgradient(p.targets[i], x, heuristic)


def solve(p: ProblemSpec, o: SolveOptions) -> SolveReport:
    """Projected subgradient iteration with best-so-far tracking."""
    if not p.convex and not o.heuristic:
        raise UnsupportedVariant("nonconvex targets need the heuristic option")
    x = geo.euclid_project(p.constraint, geo.as_point(o.x0, p.dimension, "x0"))
    f, g = _subgradient(p, x, o.heuristic)
    trace = [] if o.trace else None
    if not math.isfinite(f):
        return SolveReport(x, f, 0, "infeasible_start", trace)
    best_x, best_f = x.copy(), f
    history = [best_f]
    if trace is not None:
        trace.append((0, x.copy(), f))
    status = "iteration_cap"
    k = 0
    for k in range(1, o.max_iters + 1):
        if g is None:
            status = "stalled_empty_subdifferential"
            k -= 1
            break
        if not np.any(g):
            status = "converged"
            k -= 1
            break
        gamma = o.step.size(k, f, g)
        for _ in range(MAX_HALVINGS + 1):
            x_new = geo.euclid_project(p.constraint, x - gamma * g)
            f_new, g_new = _subgradient(p, x_new, o.heuristic)
            if math.isfinite(f_new) and g_new is not None:
                break
            gamma *= 0.5
        else:
            status = "stalled_empty_subdifferential"
            break
        x, f, g = x_new, f_new, g_new
        if f < best_f:
            best_x, best_f = x.copy(), f
        history.append(best_f)
        if trace is not None:
            trace.append((k, x.copy(), f))
        if k >= WINDOW and history[k - WINDOW] - best_f < o.tol:
            status = "converged"
            break
    return SolveReport(best_x, best_f, k, status, trace)


# -- optimality certificate ---------------------------------------------------


@dataclass
class CertificateReport:
    multipliers: list
    in_set_indices: list
    out_set_indices: list
    residual: float
    per_target_checks: list
    certified: bool
    tol: float

    def to_dict(self):
        return {
            "multipliers": [m.tolist() for m in self.multipliers],
            "in_set_indices": self.in_set_indices,
            "out_set_indices": self.out_set_indices,
            "residual": self.residual,
            "per_target_checks": self.per_target_checks,
            "certified": self.certified,
            "tol": self.tol,
        }


def certify(p: ProblemSpec, x, tol: float = 1e-6) -> CertificateReport:
    """Search multipliers satisfying the optimality conditions at ``x``.

    Minimizes ``|sum_i x_i* + n_0|`` over ``x_i*`` in the subdifferential slices
    and ``n_0`` in the normal cone of the constraint; the attained norm is the
    residual and ``residual <= tol`` certifies optimality (sum objective).
    """
    if not p.convex:
        raise UnsupportedVariant("certify needs convex targets")
    x = geo.require_member(p.constraint, x)
    I, J, polys = [], [], []
    for i, t in enumerate(p.targets):
        T = min_time(t.set, t.direction, x)
        if not math.isfinite(T):
            raise NotInDomain(f"target {i} has infinite minimal time at x")
        (I if T == 0.0 else J).append(i)
        d = subdiff.convex_subdifferential(t.set, t.direction, x)
        if d.is_empty():
            polys.append(None)
        else:
            polys.append(d.polyhedra[0])
    if any(P is None for P in polys):
        n = len(p.targets)
        return CertificateReport(
            [np.full(p.dimension, np.nan)] * n, I, J, math.inf,
            [{"cone_membership": False, "v_constraint_error": math.inf}] * n, False, tol,
        )
    cols, blocks, spans = [], [], []
    pos = 0
    for P in polys:
        start = pos
        for M, kind in ((P.vertices, "simplex"), (P.rays, "nonneg"), (P.lineality, "free")):
            if M.shape[0]:
                cols.append(M.T)
                blocks.append((pos, pos + M.shape[0], kind))
                pos += M.shape[0]
        spans.append((start, pos))
    N0 = cones._convex_normal(p.constraint, x)
    n0_start = pos
    for M, kind in ((N0.generators, "nonneg"), (N0.lineality, "free")):
        if M.shape[0]:
            cols.append(M.T)
            blocks.append((pos, pos + M.shape[0], kind))
            pos += M.shape[0]
    Mat = np.hstack(cols)
    z, residual = block_min_norm(Mat, blocks, iters=20_000, tol=1e-12)
    multipliers = [Mat[:, a:b] @ z[a:b] for a, b in spans]
    checks = []
    for i, (t, y) in enumerate(zip(p.targets, multipliers)):
        T = min_time(t.set, t.direction, x)
        xt = x + T * t.direction
        member = bool(cones.frechet_normal_cone(t.set, xt).contains(y, 1e-7))
        a = float(y @ t.direction)
        err = abs(a + 1.0) if i in J else max(0.0, -a - 1.0)
        checks.append({"cone_membership": member, "v_constraint_error": err})
    return CertificateReport(multipliers, I, J, float(residual), checks, bool(residual <= tol), tol)


# -- prechecks ----------------------------------------------------------------


@dataclass
class ExistenceReport:
    conditions: list
    warnings: list

    def to_dict(self):
        return {"conditions": self.conditions, "warnings": self.warnings}


def _probe_box(s: geo.SetExpr, d: int):
    if isinstance(s, geo.Ball):
        return s.c - s.r, s.c + s.r
    if isinstance(s, geo.Box):
        return np.where(np.isfinite(s.lo), s.lo, -10.0), np.where(np.isfinite(s.hi), s.hi, 10.0)
    return -10.0 * np.ones(d), 10.0 * np.ones(d)


def existence_precheck(p: ProblemSpec, cells: int = 20) -> ExistenceReport:
    """Which sufficient condition for a minimizer is detected, plus warnings."""
    from .oracle import objective_many

    conditions, warnings = [], []
    compact = [i for i, t in enumerate(p.targets) if geo.recession_cone(t.set).is_zero and geo.recession_cone(t.set).exact]
    if compact:
        conditions.append(f"target {compact[0]} is compact")
    elif p.convex and geo.recession_cone(p.constraint).is_zero:
        conditions.append("all sets convex and the constraint is bounded")
    if not conditions:
        warnings.append("no sufficient condition for existence detected")
    lo, hi = _probe_box(p.constraint, p.dimension)
    per = max(2, int(round(min(cells, 2e5 ** (1.0 / p.dimension)))))
    axes = [np.linspace(a, b, per) for a, b in zip(lo, hi)]
    X = np.column_stack([m.ravel() for m in np.meshgrid(*axes, indexing="ij")])
    X = X[p.constraint.contains_many(X)]
    if X.shape[0] == 0 or not np.any(np.isfinite(objective_many(p, X))):
        warnings.append("grid probe found no feasible point with finite objective")
    return ExistenceReport(conditions, warnings)


def uniqueness_precheck(p: ProblemSpec) -> str:
    """Best-effort check of the uniqueness hypotheses (segment condition unchecked)."""
    if p.objective != "sum":
        raise PreconditionError("uniqueness hypotheses concern the sum objective")
    if len(p.targets) < 2:
        return "hypotheses_fail"
    if not all(isinstance(t.set, geo.Ball) for t in p.targets):
        return "hypotheses_fail"
    V = np.array([t.direction for t in p.targets])
    for i in range(len(V)):
        for j in range(i + 1, len(V)):
            pair = np.vstack([V[i], V[j]])
            s = np.linalg.svd(pair, compute_uv=False)
            if s[-1] <= 1e-10 * max(1.0, s[0]):
                return "hypotheses_fail"
    return "partially_checked"
