"""Command-line front end.

Usage: ``dirtime COMMAND PROBLEM.json [options]``. Output goes to stdout as
CSV (default) or JSON. Exit status is 0 on success, 2 on invalid input and 3
when a computation cannot be carried out (for instance a point outside the
domain of T).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io as _io
import json
import math
import sys

import numpy as np

from . import __version__
from . import geometry as geo
from . import lipschitz, mintime, oracle, solver, subdiff
from .errors import (
    DimensionMismatch,
    InvalidDirection,
    NotComputable,
    NotInDomain,
    PointNotInSet,
    PreconditionError,
    SchemaError,
    UnsupportedVariant,
)
from .extreal import fmt, jsonify
from .io import load_problem

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

KINDS = ("convex", "frechet", "dini", "limiting", "singular", "holder")


class UsageError(Exception):
    pass


def _floats(text: str, name: str) -> np.ndarray:
    try:
        return np.array([float(t) for t in text.split(",") if t.strip()])
    except ValueError:
        raise UsageError(f"--{name}: expected comma-separated numbers, got {text!r}") from None


def _point(args, dim, name="point", required=True):
    raw = getattr(args, name.replace("-", "_"))
    if raw is None:
        if required:
            raise UsageError(f"--{name} is required for this command")
        return None
    p = _floats(raw, name)
    if p.size != dim:
        raise UsageError(f"--{name}: expected {dim} coordinates, got {p.size}")
    return p


def _target(args, problem):
    i = args.direction_index
    if not 0 <= i < len(problem.targets):
        raise UsageError(f"--direction-index {i} out of range 0..{len(problem.targets) - 1}")
    return i, problem.targets[i]


# -- commands -----------------------------------------------------------------
# Each returns (json_result, csv_header, csv_rows).


def cmd_eval(args, problem, options):
    x = _point(args, problem.dimension)
    d = problem.dimension
    rows, res = [], []
    for i, t in enumerate(problem.targets):
        T = mintime.min_time(t.set, t.direction, x)
        phi = mintime.scalarization(t.set, t.direction, x)
        proj = x + T * t.direction if math.isfinite(T) else np.full(d, math.nan)
        dom = math.isfinite(T)
        rows.append([i, fmt(T), fmt(phi)] + [fmt(c) if dom else "" for c in proj] + [str(dom).lower()])
        res.append({"target_index": i, "T": T, "phi": phi, "projection": proj.tolist() if dom else None, "in_domain": dom})
    header = ["target_index", "T", "phi"] + [f"proj_x{k + 1}" for k in range(d)] + ["in_domain"]
    value = solver.evaluate_objective(problem, x)
    return {"point": x.tolist(), "targets": res, "objective": value}, header, rows


def _slice_rows(sl):
    rows = []
    for j, P in enumerate(sl.polyhedra):
        for role, M in (("vertex", P.vertices), ("ray", P.rays), ("lineality", P.lineality)):
            for r in M:
                rows.append([j, role] + [fmt(c) for c in r] + [sl.constraint, sl.exactness])
    return rows


def cmd_grad(args, problem, options):
    x = _point(args, problem.dimension)
    i, t = _target(args, problem)
    kind = args.kind
    if kind == "convex":
        sl = subdiff.convex_subdifferential(t.set, t.direction, x)
    elif kind == "frechet":
        sl = subdiff.frechet_subdifferential(t.set, t.direction, x)
    elif kind == "dini":
        sl = subdiff.dini_subdifferential(t.set, t.direction, x)
    elif kind == "limiting":
        sl = subdiff.limiting_subdifferential(t.set, t.direction, x, seed=args.seed)
    elif kind == "singular":
        sl = subdiff.singular_subdifferential(t.set, t.direction, x, seed=args.seed)
    else:
        if args.s is None:
            raise UsageError("--s is required for --kind holder")
        sl = subdiff.holder_subdifferential(t.set, t.direction, x, args.s)
    sel = subdiff.select_subgradient(sl)
    header = ["piece", "role"] + [f"x{k + 1}" for k in range(problem.dimension)] + ["constraint", "exactness"]
    result = {
        "target_index": i,
        "kind": kind,
        "slice": sl.to_dict(),
        "empty": sl.is_empty(),
        "min_norm_element": None if sel is None else sel.tolist(),
    }
    return result, header, _slice_rows(sl)


def cmd_ddir(args, problem, options):
    x = _point(args, problem.dimension)
    u = _point(args, problem.dimension, "direction")
    i, t = _target(args, problem)
    dd = mintime.directional_derivative(t.set, t.direction, x, u)
    fd = oracle.fd_directional(t.set, t.direction, x, u, seed=args.seed)
    delta = abs(dd.value - fd) if math.isfinite(dd.value) and math.isfinite(fd) else math.inf
    header = ["target_index", "value", "valid", "base", "oracle_fd", "abs_delta"]
    row = [i, fmt(dd.value), str(dd.valid).lower(), dd.base, fmt(fd), fmt(delta)]
    return {"target_index": i, **dd.to_dict(), "oracle_fd": fd, "abs_delta": delta}, header, [row]


def cmd_solve(args, problem, options):
    rep = solver.solve(problem, options)
    d = problem.dimension
    header = [f"best_x{k + 1}" for k in range(d)] + ["best_value", "iterations_used", "status"]
    row = [fmt(c) for c in rep.best_x] + [fmt(rep.best_value), rep.iterations_used, rep.status]
    return rep.to_dict(), header, [row]


def cmd_certify(args, problem, options):
    x = _point(args, problem.dimension, required=False)
    if x is None:
        x = solver.solve(problem, options).best_x
    rep = solver.certify(problem, x, tol=args.tol)
    d = problem.dimension
    header = ["target_index", "set_role"] + [f"mult_x{k + 1}" for k in range(d)] + [
        "cone_membership", "v_constraint_error", "residual", "certified"]
    rows = []
    for i, (m, chk) in enumerate(zip(rep.multipliers, rep.per_target_checks)):
        role = "in" if i in rep.in_set_indices else "out"
        rows.append([i, role] + [fmt(c) for c in m] + [
            str(chk["cone_membership"]).lower(), fmt(chk["v_constraint_error"]),
            fmt(rep.residual), str(rep.certified).lower()])
    return {"point": x.tolist(), **rep.to_dict()}, header, rows


def cmd_lipschitz(args, problem, options):
    x = _point(args, problem.dimension, required=False)
    header = ["target_index", "scope", "verdict", "constant", "empirical_ratio", "evidence"]
    rows, res = [], []
    for i, t in enumerate(problem.targets):
        g = lipschitz.global_lipschitz(t.set, t.direction, seed=args.seed)
        rows.append([i, "global", g.verdict, fmt(g.constant), fmt(g.empirical_ratio), g.evidence])
        entry = {"target_index": i, "global": g.to_dict()}
        if x is not None:
            loc = lipschitz.local_lipschitz(t.set, t.direction, x, seed=args.seed)
            rows.append([i, "local", loc.verdict, "", fmt(loc.empirical_ratio), loc.evidence])
            entry["local"] = loc.to_dict()
        res.append(entry)
    return {"point": None if x is None else x.tolist(), "targets": res}, header, rows


def cmd_conjugate(args, problem, options):
    y = _point(args, problem.dimension)
    i, t = _target(args, problem)
    val = subdiff.conjugate(t.set, t.direction, y)
    return {"target_index": i, "xstar": y.tolist(), "value": val}, ["target_index", "value"], [[i, fmt(val)]]


def cmd_oracle_check(args, problem, options):
    x = _point(args, problem.dimension)
    header = ["target_index", "T_exact", "T_oracle", "abs_delta"]
    rows, res = [], []
    for i, t in enumerate(problem.targets):
        T = mintime.min_time(t.set, t.direction, x)
        To = oracle.oracle_min_time(t.set, t.direction, x, tol=min(args.tol, 1e-6))
        if math.isinf(T) and math.isinf(To):
            delta = 0.0
        else:
            delta = abs(T - To)
        rows.append([i, fmt(T), fmt(To), fmt(delta)])
        res.append({"target_index": i, "T_exact": T, "T_oracle": To, "abs_delta": delta})
    out = {"point": x.tolist(), "targets": res}
    if args.grid:
        parts = args.grid.split(",")
        if len(parts) != 3:
            raise UsageError('--grid expects "lo,hi,n"')
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        d = problem.dimension
        grid = oracle.GridSpec(np.full(d, lo), np.full(d, hi), n)
        found = oracle.oracle_grid_min(problem, grid)
        out["grid"] = grid.to_dict()
        out["grid_min"] = None if found is None else {"point": found[0].tolist(), "value": found[1]}
        if found is not None:
            rows.append(["grid_min", "", fmt(found[1]), ""])
    return out, header, rows


COMMANDS = {
    "eval": cmd_eval,
    "grad": cmd_grad,
    "ddir": cmd_ddir,
    "solve": cmd_solve,
    "certify": cmd_certify,
    "lipschitz": cmd_lipschitz,
    "conjugate": cmd_conjugate,
    "oracle-check": cmd_oracle_check,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dirtime", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"dirtime {__version__}")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("input", help="problem file (JSON)")
    ap.add_argument("--point", help="query point, comma separated (x* for conjugate)")
    ap.add_argument("--direction", help="derivative direction u for ddir")
    ap.add_argument("--direction-index", type=int, default=0, help="target index (default 0)")
    ap.add_argument("--kind", choices=KINDS, default="convex")
    ap.add_argument("--s", type=float, help="Hölder exponent for --kind holder")
    ap.add_argument("--tol", type=float, default=1e-6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--grid", help='oracle grid "lo,hi,n" for oracle-check')
    return ap


def _render(args, digest, result, header, rows) -> str:
    meta = {"tool": "dirtime", "version": __version__, "command": args.command,
            "seed": args.seed, "input_sha256": digest}
    if args.format == "json":
        return json.dumps(jsonify({**meta, "result": result}), indent=2, sort_keys=True) + "\n"
    buf = _io.StringIO()
    buf.write(f"# dirtime {__version__} command={args.command} seed={args.seed} input_sha256={digest}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        problem, options, raw = load_problem(args.input)
        digest = hashlib.sha256(raw).hexdigest()
        result, header, rows = COMMANDS[args.command](args, problem, options)
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    except (SchemaError, UsageError, DimensionMismatch, InvalidDirection, PointNotInSet,
            UnsupportedVariant, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (NotInDomain, NotComputable, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    sys.stdout.write(_render(args, digest, result, header, rows))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
