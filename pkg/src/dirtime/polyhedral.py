"""Finitely generated cones and polyhedra in small dimension.

A cone is kept in V-form (extreme-ray generators plus a lineality basis). The
H-form ``{y : H y <= 0, M y = 0}`` is derived on demand through polarity, so
membership, intersection and polar computations all reduce to one routine,
:func:`cone_from_inequalities`, which enumerates extreme rays of a pointed
cone by brute force over row subsets. That is adequate for the dimensions this
package targets (``d <= 8``) and keeps the code free of external polyhedral
libraries.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

TOL = 1e-9
_RANK_TOL = 1e-10


def null_space(M: np.ndarray, d: int, tol: float = _RANK_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of ``{x in R^d : M x = 0}``."""
    M = np.asarray(M, dtype=float).reshape(-1, d)
    if M.shape[0] == 0:
        return np.eye(d)
    _, s, vt = np.linalg.svd(M)
    scale = max(1.0, s[0]) if s.size else 1.0
    rank = int(np.sum(s > tol * scale))
    return vt[rank:].T.copy()


def _unit_rows(X: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.size == 0:
        return X.reshape(0, X.shape[-1] if X.ndim == 2 else 0)
    norms = np.linalg.norm(X, axis=1)
    keep = norms > tol
    return X[keep] / norms[keep, None]


def _sign_fix(X: np.ndarray) -> np.ndarray:
    # first significant entry positive
    for row in X:
        nz = np.flatnonzero(np.abs(row) > 1e-12)
        if nz.size and row[nz[0]] < 0:
            row *= -1.0
    return X


def _sort_unique(X: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Lexicographic sort with near-duplicate rows merged."""
    if X.shape[0] <= 1:
        return X
    order = np.lexsort(np.round(X, 10).T[::-1])
    X = X[order]
    kept = [X[0]]
    for row in X[1:]:
        if all(np.max(np.abs(row - k)) > tol for k in kept):
            kept.append(row)
    return np.array(kept)


def cone_from_inequalities(A, E, d: int, tol: float = TOL):
    """V-representation of ``{y : A y <= 0, E y = 0}``.

    Returns
    -------
    generators : ndarray, shape (k, d)
        Unit extreme rays of the pointed part (orthogonal to the lineality).
    lineality : ndarray, shape (m, d)
        Orthonormal basis of the lineality space.
    """
    A = np.asarray(A, dtype=float).reshape(-1, d)
    E = np.asarray(E, dtype=float).reshape(-1, d)
    B = null_space(E, d)
    k = B.shape[1]
    if k == 0:
        return np.zeros((0, d)), np.zeros((0, d))
    A1 = A @ B
    A1 = A1[np.linalg.norm(A1, axis=1) > _RANK_TOL] if A1.size else A1.reshape(0, k)
    Nl = null_space(A1, k)
    lineality = (B @ Nl).T
    Q = null_space(Nl.T, k) if Nl.shape[1] else np.eye(k)
    r = Q.shape[1]
    if r == 0:
        return np.zeros((0, d)), lineality
    A2 = _unit_rows(A1 @ Q)
    rays = []
    if r == 1:
        for w in (np.array([1.0]), np.array([-1.0])):
            if np.all(A2 @ w <= tol):
                rays.append(w)
    else:
        seen = set()
        for combo in itertools.combinations(range(A2.shape[0]), r - 1):
            sub = A2[list(combo)]
            _, s, vt = np.linalg.svd(sub)
            if s.size < r - 1 or s[-1] <= _RANK_TOL:
                continue
            w = vt[-1]
            for sign in (1.0, -1.0):
                cand = sign * w
                if np.all(A2 @ cand <= tol):
                    key = tuple(np.round(cand, 8))
                    if key not in seen:
                        seen.add(key)
                        rays.append(cand)
                    break
    if not rays:
        return np.zeros((0, d)), lineality
    gens = _unit_rows((B @ Q @ np.array(rays).T).T)
    return _sort_unique(gens), lineality


@dataclass(frozen=True, eq=False)
class GeneratedCone:
    """The cone ``{sum l_i g_i + sum m_j e_j : l >= 0}`` in ``R^dim``.

    Generators are stored unit-normalized, sorted lexicographically, with
    near-duplicates merged. ``exact`` is False when the cone is only known to
    be contained in the object it stands for.
    """

    generators: np.ndarray
    lineality: np.ndarray
    dim: int
    exact: bool = True

    def __post_init__(self):
        d = self.dim
        g = _sort_unique(_unit_rows(np.asarray(self.generators, float).reshape(-1, d)))
        lin = np.asarray(self.lineality, float).reshape(-1, d)
        if lin.shape[0]:
            lin = _sign_fix(null_space(null_space(lin, d).T, d).T)
        object.__setattr__(self, "generators", g)
        object.__setattr__(self, "lineality", lin)

    # constructors -----------------------------------------------------

    @classmethod
    def zero(cls, dim: int, exact: bool = True) -> "GeneratedCone":
        return cls(np.zeros((0, dim)), np.zeros((0, dim)), dim, exact)

    @classmethod
    def whole(cls, dim: int, exact: bool = True) -> "GeneratedCone":
        return cls(np.zeros((0, dim)), np.eye(dim), dim, exact)

    @classmethod
    def ray(cls, g, exact: bool = True) -> "GeneratedCone":
        g = np.asarray(g, float)
        return cls(g[None, :], np.zeros((0, g.size)), g.size, exact)

    @classmethod
    def span(cls, g, exact: bool = True) -> "GeneratedCone":
        g = np.asarray(g, float)
        return cls(np.zeros((0, g.size)), g[None, :], g.size, exact)

    @classmethod
    def from_inequalities(cls, A, E=None, dim: int | None = None, exact: bool = True):
        """Cone ``{y : A y <= 0, E y = 0}``."""
        A = np.asarray(A, float)
        d = dim if dim is not None else A.shape[-1]
        E = np.zeros((0, d)) if E is None else E
        g, lin = cone_from_inequalities(A, E, d)
        return cls(g, lin, d, exact)

    # derived forms ----------------------------------------------------

    @cached_property
    def _h_form(self):
        # polar generators give the inequality rows of the cone itself
        H, M = cone_from_inequalities(self.generators, self.lineality, self.dim)
        return H, M

    @property
    def inequalities(self) -> np.ndarray:
        return self._h_form[0]

    @property
    def equalities(self) -> np.ndarray:
        return self._h_form[1]

    def canonical(self) -> "GeneratedCone":
        """Irredundant form: true lineality space plus extreme rays."""
        H, M = self._h_form
        return GeneratedCone.from_inequalities(H, M, self.dim, self.exact)

    def polar(self) -> "GeneratedCone":
        """``{y : <y, x> <= 0 for all x in self}``."""
        return GeneratedCone.from_inequalities(
            self.generators, self.lineality, self.dim, self.exact
        )

    def intersect(self, other: "GeneratedCone") -> "GeneratedCone":
        A = np.vstack([self.inequalities, other.inequalities])
        E = np.vstack([self.equalities, other.equalities])
        return GeneratedCone.from_inequalities(A, E, self.dim, self.exact and other.exact)

    # queries ----------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return self.generators.shape[0] == 0 and self.lineality.shape[0] == 0

    @property
    def is_pointed(self) -> bool:
        return self.canonical().lineality.shape[0] == 0

    def contains(self, y, tol: float = TOL) -> bool:
        y = np.asarray(y, float)
        return bool(self.contains_many(y[None, :], tol)[0])

    def contains_many(self, Y, tol: float = TOL) -> np.ndarray:
        Y = np.asarray(Y, float).reshape(-1, self.dim)
        H, M = self._h_form
        scale = np.maximum(1.0, np.linalg.norm(Y, axis=1))
        ok = np.ones(Y.shape[0], dtype=bool)
        if H.shape[0]:
            ok &= np.all(Y @ H.T <= tol * scale[:, None], axis=1)
        if M.shape[0]:
            ok &= np.all(np.abs(Y @ M.T) <= tol * scale[:, None], axis=1)
        return ok

    def issubset(self, other: "GeneratedCone", tol: float = TOL) -> bool:
        pts = [self.generators, self.lineality, -self.lineality]
        P = np.vstack(pts) if any(p.shape[0] for p in pts) else np.zeros((0, self.dim))
        return bool(np.all(other.contains_many(P, tol))) if P.shape[0] else True

    def same_as(self, other: "GeneratedCone", tol: float = TOL) -> bool:
        return self.issubset(other, tol) and other.issubset(self, tol)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """Random members: exponential weights on generators, normal on lineality."""
        out = np.zeros((n, self.dim))
        if self.generators.shape[0]:
            out += rng.exponential(size=(n, self.generators.shape[0])) @ self.generators
        if self.lineality.shape[0]:
            out += rng.normal(size=(n, self.lineality.shape[0])) @ self.lineality
        return out

    def to_dict(self) -> dict:
        return {
            "generators": self.generators.tolist(),
            "lineality": self.lineality.tolist(),
            "exact": bool(self.exact),
        }

    def __repr__(self) -> str:
        g = np.round(self.generators, 6).tolist()
        lin = np.round(self.lineality, 6).tolist()
        tag = "" if self.exact else ", inner_approx"
        return f"GeneratedCone(generators={g}, lineality={lin}{tag})"


@dataclass(frozen=True, eq=False)
class ConeFamily:
    """Finite union of generated cones."""

    parts: tuple
    exact: bool = True

    def __post_init__(self):
        parts = tuple(self.parts)
        if not parts:
            raise ValueError("a cone family needs at least one part")
        pruned = []
        for i, p in enumerate(parts):
            dominated = False
            for j, q in enumerate(parts):
                if i == j:
                    continue
                if p.issubset(q) and (not q.issubset(p) or j < i):
                    dominated = True
                    break
            if not dominated:
                pruned.append(p)
        object.__setattr__(self, "parts", tuple(pruned))

    @classmethod
    def single(cls, cone: GeneratedCone) -> "ConeFamily":
        return cls((cone,), cone.exact)

    @property
    def dim(self) -> int:
        return self.parts[0].dim

    def contains(self, y, tol: float = TOL) -> bool:
        return any(p.contains(y, tol) for p in self.parts)

    def contains_many(self, Y, tol: float = TOL) -> np.ndarray:
        Y = np.asarray(Y, float).reshape(-1, self.dim)
        ok = np.zeros(Y.shape[0], dtype=bool)
        for p in self.parts:
            ok |= p.contains_many(Y, tol)
        return ok

    def polar(self) -> GeneratedCone:
        """Polar of the union, i.e. the intersection of the polars."""
        out = self.parts[0].polar()
        for p in self.parts[1:]:
            out = out.intersect(p.polar())
        return GeneratedCone(out.generators, out.lineality, out.dim, self.exact)

    def same_as(self, other: "ConeFamily", tol: float = TOL) -> bool:
        return all(any(p.same_as(q, tol) for q in other.parts) for p in self.parts) and all(
            any(q.same_as(p, tol) for p in self.parts) for q in other.parts
        )

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        which = rng.integers(len(self.parts), size=n)
        out = np.zeros((n, self.dim))
        for i, p in enumerate(self.parts):
            idx = np.flatnonzero(which == i)
            if idx.size:
                out[idx] = p.sample(rng, idx.size)
        return out

    def to_list(self) -> list:
        return [p.to_dict() for p in self.parts]

    def __repr__(self) -> str:
        return f"ConeFamily({list(self.parts)!r}, exact={self.exact})"


@dataclass(frozen=True, eq=False)
class Polyhedron:
    """V-form polyhedron ``conv(vertices) + cone(rays) + span(lineality)``."""

    vertices: np.ndarray
    rays: np.ndarray
    lineality: np.ndarray

    @property
    def dim(self) -> int:
        return self.vertices.shape[1]

    def same_as(self, other: "Polyhedron", tol: float = 1e-9) -> bool:
        if self.vertices.shape != other.vertices.shape or self.rays.shape != other.rays.shape:
            return False
        if not np.allclose(self.vertices, other.vertices, atol=tol):
            return False
        if not np.allclose(self.rays, other.rays, atol=tol):
            return False
        a = GeneratedCone(np.zeros((0, self.dim)), self.lineality, self.dim)
        b = GeneratedCone(np.zeros((0, self.dim)), other.lineality, self.dim)
        return a.same_as(b, tol)

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        w = rng.dirichlet(np.ones(self.vertices.shape[0]), size=n)
        out = w @ self.vertices
        if self.rays.shape[0]:
            out += rng.exponential(size=(n, self.rays.shape[0])) @ self.rays
        if self.lineality.shape[0]:
            out += rng.normal(size=(n, self.lineality.shape[0])) @ self.lineality
        return out

    def to_dict(self) -> dict:
        return {
            "vertices": self.vertices.tolist(),
            "rays": self.rays.tolist(),
            "lineality": self.lineality.tolist(),
        }


def polyhedron_from_inequalities(A, b, E=None, f=None, dim: int | None = None) -> Polyhedron | None:
    """V-form of ``{x : A x <= b, E x = f}`` by homogenization, or None if empty."""
    A = np.asarray(A, float)
    d = dim if dim is not None else A.shape[-1]
    A = A.reshape(-1, d)
    b = np.asarray(b, float).reshape(-1)
    E = np.zeros((0, d)) if E is None else np.asarray(E, float).reshape(-1, d)
    f = np.zeros(0) if f is None else np.asarray(f, float).reshape(-1)
    Ah = np.vstack([np.hstack([A, -b[:, None]]), np.eye(1, d + 1, d) * -1.0])
    Eh = np.hstack([E, -f[:, None]])
    gens, lin = cone_from_inequalities(Ah, Eh, d + 1)
    verts, rays = [], []
    for g in gens:
        if g[d] > 1e-12:
            verts.append(g[:d] / g[d])
        else:
            rays.append(g[:d])
    if not verts:
        return None
    V = np.array(verts)
    V[np.abs(V) < 1e-15 * max(1.0, float(np.max(np.abs(V))))] = 0.0
    V = _sort_unique(V)
    R = _sort_unique(_unit_rows(np.array(rays).reshape(-1, d)))
    L = _sign_fix(lin[:, :d].copy()) if lin.shape[0] else np.zeros((0, d))
    return Polyhedron(V, R, L)


# -- projected-gradient quadratic programs -----------------------------------


def _project_simplex(y: np.ndarray) -> np.ndarray:
    if y.size == 1:
        return np.ones(1)
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, y.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    theta = css[rho] / (rho + 1.0)
    return np.maximum(y - theta, 0.0)


def block_min_norm(M: np.ndarray, blocks, iters: int = 10_000, tol: float = 1e-10):
    """Minimize ``||M z||`` over ``z`` split into constrained blocks.

    ``blocks`` is a list of ``(start, stop, kind)`` with ``kind`` one of
    ``"simplex"``, ``"nonneg"``, ``"free"``. Uses accelerated projected
    gradient followed by an active-face least-squares polish.
    """
    M = np.asarray(M, float)
    n = M.shape[1]

    def project(z):
        z = z.copy()
        for a, b, kind in blocks:
            if kind == "simplex":
                z[a:b] = _project_simplex(z[a:b])
            elif kind == "nonneg":
                z[a:b] = np.maximum(z[a:b], 0.0)
        return z

    z = np.zeros(n)
    for a, b, kind in blocks:
        if kind == "simplex":
            z[a:b] = 1.0 / (b - a)
    if n == 0:
        return z, 0.0
    L = max(np.linalg.norm(M, 2) ** 2, 1e-12)
    y, t = z.copy(), 1.0
    for _ in range(iters):
        z_new = project(y - (M.T @ (M @ y)) / L)
        t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
        y = z_new + ((t - 1.0) / t_new) * (z_new - z)
        moved = np.max(np.abs(z_new - z))
        z, t = z_new, t_new
        if moved < tol:
            break
    z = _polish(M, blocks, z)
    return z, float(np.linalg.norm(M @ z))


def _polish(M, blocks, z, thresh: float = 1e-9):
    """Re-solve exactly on the face identified by the support of ``z``."""
    free = []
    eq_rows = []
    n = M.shape[1]
    for a, b, kind in blocks:
        if kind == "free":
            free.extend(range(a, b))
        else:
            idx = [i for i in range(a, b) if z[i] > thresh]
            if kind == "simplex" and not idx:
                return z
            free.extend(idx)
            if kind == "simplex":
                row = np.zeros(n)
                row[idx] = 1.0
                eq_rows.append(row)
    if not free:
        return z
    free = np.array(sorted(free))
    Mf = M[:, free]
    k = free.size
    if eq_rows:
        C = np.array(eq_rows)[:, free]
        KKT = np.block([[Mf.T @ Mf, C.T], [C, np.zeros((C.shape[0], C.shape[0]))]])
        rhs = np.concatenate([np.zeros(k), np.ones(C.shape[0])])
        sol = np.linalg.lstsq(KKT, rhs, rcond=None)[0][:k]
    else:
        sol = np.linalg.lstsq(Mf, np.zeros(M.shape[0]), rcond=None)[0]
    cand = np.zeros(n)
    cand[free] = sol
    for a, b, kind in blocks:
        if kind != "free":
            if np.any(cand[a:b] < -1e-12):
                return z
            cand[a:b] = np.maximum(cand[a:b], 0.0)
    if np.linalg.norm(M @ cand) <= np.linalg.norm(M @ z) + 1e-15:
        return cand
    return z


def min_norm_point(P: Polyhedron) -> np.ndarray:
    """Minimum-norm element of a V-form polyhedron."""
    V, R, L = P.vertices, P.rays, P.lineality
    if V.shape[0] == 1 and R.shape[0] == 0 and L.shape[0] == 0:
        return V[0].copy()
    M = np.hstack([V.T, R.T, L.T])
    nv, nr, nl = V.shape[0], R.shape[0], L.shape[0]
    blocks = [(0, nv, "simplex")]
    if nr:
        blocks.append((nv, nv + nr, "nonneg"))
    if nl:
        blocks.append((nv + nr, nv + nr + nl, "free"))
    z, _ = block_min_norm(M, blocks)
    return M @ z
