"""Set primitives: membership, support function, projection, recession cone.

Sets are immutable dataclasses. Halfspace rows are normalized to unit length
at construction, so the membership tolerance ``eps`` has the same geometric
meaning for every row.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linprog

from . import catalog as _catalog
from .errors import DimensionMismatch, PointNotInSet, SchemaError, UnsupportedVariant
from .intervals import ball_interval, rows_interval
from .polyhedral import GeneratedCone

EPS = 1e-9
MAX_DIM = 8

DYKSTRA_SWEEPS = 10_000
DYKSTRA_TOL = 1e-12


def as_point(x, dim: int | None = None, name: str = "point") -> np.ndarray:
    p = np.asarray(x, dtype=float).reshape(-1)
    if dim is not None and p.size != dim:
        raise DimensionMismatch(f"{name} has dimension {p.size}, expected {dim}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"{name} has non-finite coordinates")
    return p


def _normalize_rows(A, b):
    A = np.atleast_2d(np.asarray(A, float))
    b = np.asarray(b, float).reshape(-1)
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms == 0):
        raise ValueError("halfspace normal must be nonzero")
    return A / norms[:, None], b / norms


class SetExpr:
    """Common interface of all set variants."""

    kind = ""
    dim: int
    convex = True
    polyhedral = True
    bounded = False

    def contains_many(self, X, eps: float = EPS) -> np.ndarray:
        raise NotImplementedError

    def pieces(self, X, v) -> list:
        """One ``(lo, hi)`` time interval per convex piece for each row of ``X``."""
        raise NotImplementedError

    def to_dict(self) -> dict:
        raise NotImplementedError


class _RowSet(SetExpr):
    """Convex polyhedral sets given by unit rows ``A x <= b``."""

    A: np.ndarray
    rhs: np.ndarray

    def contains_many(self, X, eps=EPS):
        X = np.atleast_2d(X)
        if self.A.shape[0] == 0:
            return np.ones(X.shape[0], dtype=bool)
        return np.all(X @ self.A.T <= self.rhs[None, :] + eps, axis=1)

    def pieces(self, X, v):
        return [rows_interval(self.A, self.rhs, X, v)]

    def active(self, x, eps=EPS) -> np.ndarray:
        if self.A.shape[0] == 0:
            return np.zeros((0, self.dim))
        return self.A[np.abs(self.A @ x - self.rhs) <= eps]


@dataclass(frozen=True, eq=False)
class Halfspace(_RowSet):
    """``{x : <a, x> <= b}``."""

    a: np.ndarray
    b: float

    kind = "halfspace"

    def __post_init__(self):
        a = as_point(self.a, name="halfspace normal")
        A, rhs = _normalize_rows(a[None, :], [self.b])
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "rhs", rhs)

    @property
    def dim(self):
        return self.a.size

    def to_dict(self):
        return {"type": "halfspace", "a": self.a.tolist(), "b": self.b}


@dataclass(frozen=True, eq=False)
class Ball(SetExpr):
    """Closed Euclidean ball."""

    c: np.ndarray
    r: float

    kind = "ball"
    polyhedral = False
    bounded = True

    def __post_init__(self):
        object.__setattr__(self, "c", as_point(self.c, name="ball center"))
        if not (self.r > 0 and math.isfinite(self.r)):
            raise ValueError("ball radius must be positive and finite")
        object.__setattr__(self, "r", float(self.r))

    @property
    def dim(self):
        return self.c.size

    def contains_many(self, X, eps=EPS):
        X = np.atleast_2d(X)
        return np.linalg.norm(X - self.c[None, :], axis=1) <= self.r + eps

    def pieces(self, X, v):
        return [ball_interval(self.c, self.r, X, v)]

    def to_dict(self):
        return {"type": "ball", "c": self.c.tolist(), "r": self.r}


@dataclass(frozen=True, eq=False)
class Box(_RowSet):
    """Axis-aligned box; bounds may be infinite."""

    lo: np.ndarray
    hi: np.ndarray

    kind = "box"

    def __post_init__(self):
        lo = np.asarray(self.lo, float).reshape(-1)
        hi = np.asarray(self.hi, float).reshape(-1)
        if lo.shape != hi.shape:
            raise DimensionMismatch("box bounds differ in length")
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("box bounds must not be NaN")
        if np.any(lo > hi) or np.any(lo == np.inf) or np.any(hi == -np.inf):
            raise ValueError("box needs lo <= hi with a finite feasible range")
        d = lo.size
        rows, rhs = [], []
        for i in range(d):
            if np.isfinite(hi[i]):
                rows.append(np.eye(d)[i])
                rhs.append(hi[i])
            if np.isfinite(lo[i]):
                rows.append(-np.eye(d)[i])
                rhs.append(-lo[i])
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "A", np.array(rows).reshape(-1, d))
        object.__setattr__(self, "rhs", np.array(rhs, float))
        object.__setattr__(self, "bounded", bool(np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))))

    @property
    def dim(self):
        return self.lo.size

    def contains_many(self, X, eps=EPS):
        X = np.atleast_2d(X)
        return np.all((X >= self.lo - eps) & (X <= self.hi + eps), axis=1)

    def to_dict(self):
        from .extreal import to_json

        return {
            "type": "box",
            "lo": [to_json(x) for x in self.lo],
            "hi": [to_json(x) for x in self.hi],
        }


@dataclass(frozen=True, eq=False)
class Polytope(_RowSet):
    """Intersection of finitely many halfspaces ``<a_i, x> <= b_i``."""

    rows_a: np.ndarray
    rows_b: np.ndarray
    dimension: int | None = None
    check_nonempty: bool = True

    kind = "polytope"

    def __post_init__(self):
        d = self.dimension
        a = np.asarray(self.rows_a, float)
        if a.size == 0:
            if d is None:
                raise ValueError("a polytope without rows needs an explicit dimension")
            a = a.reshape(0, d)
        a = np.atleast_2d(a)
        b = np.asarray(self.rows_b, float).reshape(-1)
        if a.shape[0] != b.size:
            raise ValueError("polytope rows and right-hand sides differ in count")
        d = a.shape[1]
        if a.shape[0]:
            A, bn = _normalize_rows(a, b)
        else:
            A, bn = a, b
        object.__setattr__(self, "rows_a", a)
        object.__setattr__(self, "rows_b", b)
        object.__setattr__(self, "dimension", d)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "rhs", bn)
        if self.check_nonempty and A.shape[0] and feasible_point(A, bn) is None:
            raise ValueError("polytope is empty")
        object.__setattr__(self, "bounded", bool(recession_cone(self).is_zero))

    @classmethod
    def from_rows(cls, rows, dimension: int | None = None) -> "Polytope":
        """Build from a list of ``(a_i, b_i)`` pairs."""
        rows = list(rows)
        A = np.array([np.asarray(a, float) for a, _ in rows]) if rows else np.zeros((0, dimension or 0))
        return cls(A, [float(b) for _, b in rows], dimension=dimension)

    @property
    def dim(self):
        return self.dimension

    def to_dict(self):
        return {
            "type": "polytope",
            "rows": [{"a": a.tolist(), "b": float(b)} for a, b in zip(self.rows_a, self.rows_b)],
        }


@dataclass(frozen=True, eq=False)
class Union(SetExpr):
    """Finite union of convex variants."""

    members: tuple

    kind = "union"
    convex = False

    def __post_init__(self):
        members = tuple(self.members)
        if len(members) < 2:
            raise ValueError("a union needs at least two members")
        for m in members:
            if not isinstance(m, (Halfspace, Ball, Box, Polytope)):
                raise UnsupportedVariant("union members must be convex variants")
        if len({m.dim for m in members}) != 1:
            raise DimensionMismatch("union members have different dimensions")
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "polyhedral", all(m.polyhedral for m in members))
        object.__setattr__(self, "bounded", all(m.bounded for m in members))

    @property
    def dim(self):
        return self.members[0].dim

    def contains_many(self, X, eps=EPS):
        X = np.atleast_2d(X)
        ok = np.zeros(X.shape[0], dtype=bool)
        for m in self.members:
            ok |= m.contains_many(X, eps)
        return ok

    def pieces(self, X, v):
        out = []
        for m in self.members:
            out.extend(m.pieces(X, v))
        return out

    def to_dict(self):
        return {"type": "union", "members": [m.to_dict() for m in self.members]}


@dataclass(frozen=True, eq=False)
class Implicit2D(SetExpr):
    """A curated planar set from :mod:`dirtime.catalog`, optionally translated."""

    catalog_id: str
    params: dict = field(default_factory=dict)

    kind = "implicit2d"
    dim = 2

    def __post_init__(self):
        if self.catalog_id not in _catalog.CATALOG:
            raise ValueError(
                f"unknown catalog id {self.catalog_id!r}; known: {sorted(_catalog.CATALOG)}"
            )
        params = dict(self.params or {})
        unknown = set(params) - {"offset"}
        if unknown:
            raise ValueError(f"unknown implicit2d parameters: {sorted(unknown)}")
        offset = as_point(params.get("offset", [0.0, 0.0]), 2, "offset")
        object.__setattr__(self, "params", params)
        object.__setattr__(self, "offset", offset)
        e = _catalog.CATALOG[self.catalog_id]
        object.__setattr__(self, "entry", e)
        object.__setattr__(self, "convex", e.convex)
        object.__setattr__(self, "polyhedral", e.polyhedral)

    def local(self, x):
        return np.asarray(x, float) - self.offset

    def contains_many(self, X, eps=EPS):
        return self.entry.contains(np.atleast_2d(X) - self.offset[None, :], eps)

    def pieces(self, X, v):
        return self.entry.pieces(np.atleast_2d(X) - self.offset[None, :], np.asarray(v, float))

    def to_dict(self):
        out = {"type": "implicit2d", "catalog_id": self.catalog_id}
        if self.params:
            out["params"] = {"offset": self.offset.tolist()}
        return out


CONVEX_TYPES = (Halfspace, Ball, Box, Polytope)


def is_convex(s: SetExpr) -> bool:
    return bool(s.convex)


def require_convex(s: SetExpr, what: str = "this operation"):
    if not isinstance(s, CONVEX_TYPES):
        raise UnsupportedVariant(f"{what} needs a convex variant, got {s.kind}")


def check_dim(s: SetExpr, x, name: str = "point") -> np.ndarray:
    return as_point(x, s.dim, name)


# -- membership --------------------------------------------------------------


def contains(s: SetExpr, x, eps: float = EPS) -> bool:
    """True iff ``x`` lies in ``s`` up to ``eps`` in each defining inequality."""
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    x = check_dim(s, x)
    return bool(s.contains_many(x[None, :], eps)[0])


def require_member(s: SetExpr, x, eps: float = EPS) -> np.ndarray:
    x = check_dim(s, x)
    if not s.contains_many(x[None, :], eps)[0]:
        raise PointNotInSet(f"point {x.tolist()} is not in the {s.kind}")
    return x


# -- support function ----------------------------------------------------------


def feasible_point(A, b):
    """A point with ``A x <= b`` or None (HiGHS feasibility LP)."""
    d = A.shape[1]
    res = linprog(np.zeros(d), A_ub=A, b_ub=b, bounds=[(None, None)] * d, method="highs")
    return res.x if res.status == 0 else None


def support(s: SetExpr, xstar) -> float:
    """``sigma_s(x*) = sup{<x*, w> : w in s}``, possibly ``+inf``."""
    require_convex(s, "support")
    y = check_dim(s, xstar, "dual vector")
    if isinstance(s, Ball):
        return float(y @ s.c + s.r * np.linalg.norm(y))
    if isinstance(s, Box):
        total = 0.0
        # rounding noise against an infinite bound is not an ascent direction
        tiny = 1e-12 * float(np.linalg.norm(y))
        for yi, lo, hi in zip(y, s.lo, s.hi):
            if abs(yi) <= tiny and not (math.isfinite(lo) and math.isfinite(hi)):
                continue
            if yi > 0:
                total += yi * hi
            elif yi < 0:
                total += yi * lo
        return float(total)
    if isinstance(s, Halfspace):
        a = s.A[0]
        lam = float(y @ a)
        if lam >= 0 and np.linalg.norm(y - lam * a) <= 1e-12 * max(1.0, np.linalg.norm(y)):
            return lam * float(s.rhs[0])
        return math.inf
    # polytope
    if not np.any(y):
        return 0.0
    res = linprog(-y, A_ub=s.A, b_ub=s.rhs, bounds=[(None, None)] * s.dim, method="highs")
    if res.status == 3:
        return math.inf
    if res.status != 0:
        raise RuntimeError(f"support LP failed: {res.message}")
    return float(-res.fun)


# -- projection --------------------------------------------------------------


def _dykstra(A, b, x, sweeps=DYKSTRA_SWEEPS, tol=DYKSTRA_TOL):
    m = A.shape[0]
    p = x.copy()
    incr = np.zeros((m, x.size))
    for _ in range(sweeps):
        prev, prev_incr = p.copy(), incr.copy()
        for i in range(m):
            y = p + incr[i]
            viol = A[i] @ y - b[i]
            q = y - max(viol, 0.0) * A[i]
            incr[i] = y - q
            p = q
        # the iterate can sit still for a sweep while the corrections move
        if np.linalg.norm(p - prev) < tol and np.max(np.abs(incr - prev_incr)) < tol:
            break
    return p


def _polish_projection(A, b, x, p, eps=1e-7):
    """Exact projection on the face that Dykstra identified, when it checks out."""
    act = np.abs(A @ p - b) <= eps
    if not np.any(act):
        return p
    Aa, ba = A[act], b[act]
    lam, *_ = np.linalg.lstsq(Aa @ Aa.T, Aa @ x - ba, rcond=None)
    q = x - Aa.T @ lam
    if np.all(lam >= -1e-12) and np.all(A @ q <= b + 1e-12):
        return q
    return p


def euclid_project(s: SetExpr, x) -> np.ndarray:
    """Nearest point of the convex set ``s`` to ``x``."""
    require_convex(s, "euclid_project")
    x = check_dim(s, x)
    if isinstance(s, Ball):
        w = x - s.c
        n = np.linalg.norm(w)
        return x.copy() if n <= s.r else s.c + (s.r / n) * w
    if isinstance(s, Box):
        return np.clip(x, s.lo, s.hi)
    if isinstance(s, Halfspace):
        a, b = s.A[0], s.rhs[0]
        return x - max(0.0, float(a @ x - b)) * a
    if s.A.shape[0] == 0 or s.contains_many(x[None, :], 0.0)[0]:
        return x.copy()
    p = _dykstra(s.A, s.rhs, x)
    return _polish_projection(s.A, s.rhs, x, p)


def project_many(s: SetExpr, X) -> np.ndarray:
    X = np.atleast_2d(np.asarray(X, float))
    if isinstance(s, Ball):
        W = X - s.c[None, :]
        n = np.linalg.norm(W, axis=1)
        scale = np.where(n > s.r, s.r / np.maximum(n, 1e-300), 1.0)
        return s.c[None, :] + W * scale[:, None]
    if isinstance(s, Box):
        return np.clip(X, s.lo, s.hi)
    if isinstance(s, Halfspace):
        a, b = s.A[0], s.rhs[0]
        return X - np.maximum(X @ a - b, 0.0)[:, None] * a[None, :]
    return np.array([euclid_project(s, x) for x in X])


# -- recession cone --------------------------------------------------------------


def recession_cone(s: SetExpr) -> GeneratedCone:
    """Recession cone; exact except for unions (inner approximation)."""
    d = s.dim
    if isinstance(s, Ball):
        return GeneratedCone.zero(d)
    if isinstance(s, _RowSet):
        if s.A.shape[0] == 0:
            return GeneratedCone.whole(d)
        return GeneratedCone.from_inequalities(s.A, dim=d)
    if isinstance(s, Union):
        cone = recession_cone(s.members[0])
        for m in s.members[1:]:
            cone = cone.intersect(recession_cone(m))
        return GeneratedCone(cone.generators, cone.lineality, d, exact=False)
    if isinstance(s, Implicit2D):
        return s.entry.recession()
    raise UnsupportedVariant(s.kind)


def to_polytope(s: SetExpr) -> Polytope:
    if isinstance(s, Polytope):
        return s
    if isinstance(s, (Box, Halfspace)):
        return Polytope(s.A, s.rhs, dimension=s.dim)
    raise UnsupportedVariant(f"{s.kind} has no polytope form")


# -- sampling ----------------------------------------------------------------------


def _ball_points(rng, p, rho, n):
    d = p.size
    g = rng.normal(size=(n, d))
    g /= np.linalg.norm(g, axis=1)[:, None]
    r = rho * rng.uniform(size=n) ** (1.0 / d)
    return p[None, :] + g * r[:, None]


def _within(P, p, rho):
    return P[np.linalg.norm(P - p[None, :], axis=1) <= rho * (1 + 1e-12)]


def boundary_near(s: SetExpr, p, rho: float, n: int, rng) -> np.ndarray:
    """Points of ``bd s`` within ``rho`` of ``p`` (possibly fewer than ``n``)."""
    p = np.asarray(p, float)
    if isinstance(s, Implicit2D):
        out = s.entry.boundary_near(s.local(p), rho, n, rng)
        return out + s.offset[None, :] if out.size else out.reshape(0, 2)
    if isinstance(s, Ball):
        g = rng.normal(size=(n, s.dim))
        g /= np.linalg.norm(g, axis=1)[:, None]
        w = p - s.c
        nw = np.linalg.norm(w)
        if nw > 0:
            # bias toward the cap nearest p
            g = g * (rho / s.r) + w / nw
            g /= np.linalg.norm(g, axis=1)[:, None]
        return _within(s.c[None, :] + s.r * g, p, rho)
    if isinstance(s, _RowSet):
        out = []
        for a, b in zip(s.A, s.rhs):
            Y = _ball_points(rng, p, rho, n)
            Y = Y - ((Y @ a) - b)[:, None] * a[None, :]
            out.append(Y[s.contains_many(Y, 1e-12)])
        if not out:
            return np.zeros((0, s.dim))
        return _within(np.vstack(out), p, rho)
    if isinstance(s, Union):
        out = []
        for i, m in enumerate(s.members):
            Y = boundary_near(m, p, rho, n, rng)
            if Y.shape[0] == 0:
                continue
            # drop points interior to another member
            interior = np.zeros(Y.shape[0], dtype=bool)
            for j, o in enumerate(s.members):
                if j != i:
                    interior |= _interior_many(o, Y)
            out.append(Y[~interior])
        return np.vstack(out) if out else np.zeros((0, s.dim))
    raise UnsupportedVariant(s.kind)


def _interior_many(m: SetExpr, Y, margin: float = 1e-9) -> np.ndarray:
    if isinstance(m, Ball):
        return np.linalg.norm(Y - m.c[None, :], axis=1) < m.r - margin
    if m.A.shape[0] == 0:
        return np.ones(Y.shape[0], dtype=bool)
    return np.all(Y @ m.A.T < m.rhs[None, :] - margin, axis=1)


def sample_near(s: SetExpr, p, rho: float, n: int, rng) -> np.ndarray:
    """Points of ``s`` within ``rho`` of ``p``, boundary points included."""
    p = np.asarray(p, float)
    if isinstance(s, Implicit2D):
        pts = s.entry.sample_near(s.local(p), rho, n, rng)
        if pts is not None:
            return pts + s.offset[None, :]
    Y = _ball_points(rng, p, rho, n)
    inside = Y[s.contains_many(Y)]
    bd = boundary_near(s, p, rho, n, rng)
    if isinstance(s, CONVEX_TYPES) and inside.shape[0] < n // 10:
        # thin convex sets: fall back to projecting the cloud
        proj = project_many(s, Y[: max(n // 4, 1)])
        inside = np.vstack([inside, _within(proj, p, rho)])
    return np.vstack([inside, bd])
