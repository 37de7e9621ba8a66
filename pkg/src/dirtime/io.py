"""JSON problem files.

One document format serves every command::

    {
      "dimension": 2,
      "constraint": {"type": "box", "lo": [-5, -5], "hi": [5, 5]},
      "targets": [{"set": {"type": "ball", "c": [4, 0], "r": 1}, "direction": [1, 0]}],
      "objective": "sum",
      "solver": {"x0": [0, 0], "max_iters": 5000,
                 "step": {"kind": "diminishing", "gamma0": 1.0},
                 "tol": 1e-6, "seed": 0, "trace": false}
    }

``constraint`` defaults to the whole space. Errors raise
:class:`~dirtime.errors.SchemaError` with a path such as ``targets[1].set.r``.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import geometry as geo
from .errors import SchemaError
from .extreal import from_json
from .solver import ProblemSpec, SolveOptions, Step, Target

SET_FIELDS = {
    "halfspace": {"a", "b"},
    "ball": {"c", "r"},
    "box": {"lo", "hi"},
    "polytope": {"rows"},
    "union": {"members"},
    "implicit2d": {"catalog_id", "params"},
}


def _require(obj, key, path):
    if not isinstance(obj, dict):
        raise SchemaError(path, "expected an object")
    if key not in obj:
        raise SchemaError(f"{path}.{key}" if path else key, "missing field")
    return obj[key]


def _vector(val, path, allow_inf=False):
    if not isinstance(val, list) or not val:
        raise SchemaError(path, "expected a nonempty list of numbers")
    out = []
    for i, x in enumerate(val):
        if isinstance(x, bool):
            raise SchemaError(f"{path}[{i}]", "expected a number")
        try:
            y = from_json(x) if allow_inf else float(x)
        except (TypeError, ValueError):
            raise SchemaError(f"{path}[{i}]", f"expected a number, got {x!r}") from None
        if not allow_inf and not math.isfinite(y):
            raise SchemaError(f"{path}[{i}]", "must be finite")
        out.append(y)
    return np.array(out)


def _number(val, path):
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise SchemaError(path, f"expected a number, got {val!r}")
    return float(val)


def parse_set(obj, path: str = "set") -> geo.SetExpr:
    kind = _require(obj, "type", path)
    if kind not in SET_FIELDS:
        raise SchemaError(f"{path}.type", f"unknown set type {kind!r}")
    extra = set(obj) - SET_FIELDS[kind] - {"type"}
    if extra:
        raise SchemaError(f"{path}", f"unexpected fields {sorted(extra)}")
    try:
        if kind == "halfspace":
            a = _vector(_require(obj, "a", path), f"{path}.a")
            return geo.Halfspace(a, _number(_require(obj, "b", path), f"{path}.b"))
        if kind == "ball":
            c = _vector(_require(obj, "c", path), f"{path}.c")
            return geo.Ball(c, _number(_require(obj, "r", path), f"{path}.r"))
        if kind == "box":
            lo = _vector(_require(obj, "lo", path), f"{path}.lo", allow_inf=True)
            hi = _vector(_require(obj, "hi", path), f"{path}.hi", allow_inf=True)
            return geo.Box(lo, hi)
        if kind == "polytope":
            rows = _require(obj, "rows", path)
            if not isinstance(rows, list) or not rows:
                raise SchemaError(f"{path}.rows", "expected a nonempty list of rows")
            A, b = [], []
            for i, row in enumerate(rows):
                rp = f"{path}.rows[{i}]"
                A.append(_vector(_require(row, "a", rp), f"{rp}.a"))
                b.append(_number(_require(row, "b", rp), f"{rp}.b"))
            if len({a.size for a in A}) != 1:
                raise SchemaError(f"{path}.rows", "rows have different dimensions")
            return geo.Polytope(np.array(A), np.array(b))
        if kind == "union":
            members = _require(obj, "members", path)
            if not isinstance(members, list):
                raise SchemaError(f"{path}.members", "expected a list")
            return geo.Union(tuple(parse_set(m, f"{path}.members[{i}]") for i, m in enumerate(members)))
        cid = _require(obj, "catalog_id", path)
        params = obj.get("params", {}) or {}
        if not isinstance(params, dict):
            raise SchemaError(f"{path}.params", "expected an object")
        return geo.Implicit2D(cid, params)
    except SchemaError:
        raise
    except (ValueError, TypeError) as exc:
        raise SchemaError(path, str(exc)) from None


def parse_problem(doc: dict):
    """Return ``(ProblemSpec, SolveOptions)`` from a parsed JSON document."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "expected a JSON object")
    dim = _require(doc, "dimension", "")
    if isinstance(dim, bool) or not isinstance(dim, int) or not 1 <= dim <= geo.MAX_DIM:
        raise SchemaError("dimension", f"expected an integer in 1..{geo.MAX_DIM}")
    if "constraint" in doc:
        constraint = parse_set(doc["constraint"], "constraint")
    else:
        constraint = geo.Box(np.full(dim, -np.inf), np.full(dim, np.inf))
    raw_targets = _require(doc, "targets", "")
    if not isinstance(raw_targets, list) or not raw_targets:
        raise SchemaError("targets", "expected a nonempty list")
    targets = []
    for i, t in enumerate(raw_targets):
        tp = f"targets[{i}]"
        s = parse_set(_require(t, "set", tp), f"{tp}.set")
        v = _vector(_require(t, "direction", tp), f"{tp}.direction")
        if s.dim != dim:
            raise SchemaError(f"{tp}.set", f"dimension {s.dim} differs from {dim}")
        if v.size != dim:
            raise SchemaError(f"{tp}.direction", f"dimension {v.size} differs from {dim}")
        if not np.any(v):
            raise SchemaError(f"{tp}.direction", "must be nonzero")
        targets.append(Target(s, v))
    if constraint.dim != dim:
        raise SchemaError("constraint", f"dimension {constraint.dim} differs from {dim}")
    objective = doc.get("objective", "sum")
    if objective not in ("sum", "max"):
        raise SchemaError("objective", "expected 'sum' or 'max'")
    try:
        problem = ProblemSpec(dim, constraint, tuple(targets), objective)
    except (ValueError, TypeError) as exc:
        raise SchemaError("constraint", str(exc)) from None
    return problem, parse_solver(doc.get("solver", {}), dim)


def parse_solver(obj, dim: int) -> SolveOptions:
    if not isinstance(obj, dict):
        raise SchemaError("solver", "expected an object")
    known = {"x0", "max_iters", "step", "tol", "seed", "trace", "heuristic"}
    extra = set(obj) - known
    if extra:
        raise SchemaError("solver", f"unexpected fields {sorted(extra)}")
    x0 = _vector(obj["x0"], "solver.x0") if "x0" in obj else np.zeros(dim)
    if x0.size != dim:
        raise SchemaError("solver.x0", f"dimension {x0.size} differs from {dim}")
    step_obj = obj.get("step", {"kind": "diminishing", "gamma0": 1.0})
    kind = _require(step_obj, "kind", "solver.step")
    try:
        if kind == "diminishing":
            step = Step("diminishing", _number(step_obj.get("gamma0", 1.0), "solver.step.gamma0"))
        elif kind == "constant":
            step = Step("constant", _number(_require(step_obj, "gamma", "solver.step"), "solver.step.gamma"))
        elif kind == "polyak":
            fstar = _number(_require(step_obj, "target_value", "solver.step"), "solver.step.target_value")
            step = Step("polyak", 1.0, fstar)
        else:
            raise SchemaError("solver.step.kind", f"unknown step kind {kind!r}")
        max_iters = obj.get("max_iters", 5000)
        if isinstance(max_iters, bool) or not isinstance(max_iters, int):
            raise SchemaError("solver.max_iters", "expected an integer")
        return SolveOptions(
            x0,
            max_iters=max_iters,
            step=step,
            tol=_number(obj.get("tol", 1e-6), "solver.tol"),
            seed=int(obj.get("seed", 0)),
            trace=bool(obj.get("trace", False)),
            heuristic=bool(obj.get("heuristic", False)),
        )
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError("solver", str(exc)) from None


def load_problem(path: str):
    """Parse a problem file; returns ``(problem, options, raw_bytes)``."""
    with open(path, "rb") as fh:
        raw = fh.read()
    try:
        doc = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    problem, options = parse_problem(doc)
    return problem, options, raw


def problem_to_dict(p: ProblemSpec, o: SolveOptions | None = None) -> dict:
    out = {
        "dimension": p.dimension,
        "constraint": p.constraint.to_dict(),
        "targets": [{"set": t.set.to_dict(), "direction": t.direction.tolist()} for t in p.targets],
        "objective": p.objective,
    }
    if o is not None:
        step = {"kind": o.step.kind}
        if o.step.kind == "diminishing":
            step["gamma0"] = o.step.gamma
        elif o.step.kind == "constant":
            step["gamma"] = o.step.gamma
        else:
            step["target_value"] = o.step.target_value
        out["solver"] = {
            "x0": o.x0.tolist(), "max_iters": o.max_iters, "step": step,
            "tol": o.tol, "seed": o.seed, "trace": o.trace,
        }
    return out
