"""Polyhedra in halfspace form plus the small LP toolbox used throughout.

All sets are stored as {x : F x <= f}. Linear programs are delegated to
scipy's HiGHS backend, which is deterministic for fixed inputs.
"""
from __future__ import annotations

import dataclasses

import numpy as np
from scipy.optimize import linprog
from scipy.spatial import ConvexHull, HalfspaceIntersection

from .errors import InvalidPartition

LP_TOL = 1e-9

_LP_OK = 0
_LP_INFEASIBLE = 2
_LP_UNBOUNDED = 3


def lp_max(c, F, f):
    """Maximize c.x over {F x <= f}.

    Returns (value, x). value is +inf when unbounded; raises InvalidPartition
    when the polyhedron is empty.
    """
    c = np.asarray(c, dtype=float)
    res = linprog(-c, A_ub=F, b_ub=f, bounds=[(None, None)] * c.size, method="highs")
    if res.status == _LP_UNBOUNDED:
        return np.inf, None
    if res.status == _LP_INFEASIBLE:
        raise InvalidPartition("LP over an empty polyhedron")
    if res.status != _LP_OK:
        raise InvalidPartition(f"LP failed with status {res.status}: {res.message}")
    return float(-res.fun), np.asarray(res.x, dtype=float)


def lp_min(c, F, f):
    value, x = lp_max(-np.asarray(c, dtype=float), F, f)
    return -value, x


@dataclasses.dataclass(frozen=True, eq=False)
class Polyhedron:
    """H-representation {x : F x <= f}."""

    F: np.ndarray
    f: np.ndarray

    def __post_init__(self):
        F = np.atleast_2d(np.asarray(self.F, dtype=float))
        f = np.asarray(self.f, dtype=float).ravel()
        if F.shape[0] != f.size:
            raise ValueError(f"row mismatch: F has {F.shape[0]} rows, f has {f.size}")
        object.__setattr__(self, "F", F)
        object.__setattr__(self, "f", f)

    @property
    def dim(self) -> int:
        return self.F.shape[1]

    @property
    def nrows(self) -> int:
        return self.F.shape[0]

    @staticmethod
    def from_box(lower, upper) -> "Polyhedron":
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        n = lower.size
        eye = np.eye(n)
        return Polyhedron(np.vstack([eye, -eye]), np.concatenate([upper, -lower]))

    def contains(self, x, tol: float = 1e-9):
        """Membership test; x may be a single point (n,) or a batch (K, n)."""
        x = np.asarray(x, dtype=float)
        slack = self.f - x @ self.F.T
        if x.ndim == 1:
            return bool(np.all(slack >= -tol))
        return np.all(slack >= -tol, axis=-1)

    def min_slack(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(np.min(self.f - self.F @ x))

    def intersect(self, other: "Polyhedron") -> "Polyhedron":
        return Polyhedron(np.vstack([self.F, other.F]), np.concatenate([self.f, other.f]))

    def shifted(self, origin) -> "Polyhedron":
        """The set in coordinates centered at origin: {y : y + origin in self}."""
        origin = np.asarray(origin, dtype=float)
        return Polyhedron(self.F, self.f - self.F @ origin)

    def chebyshev(self):
        """Largest inscribed ball. Returns (center, radius); radius < 0 iff empty.

        Rows with zero normal are handled directly (they are vacuous or
        certify emptiness).
        """
        norms = np.linalg.norm(self.F, axis=1)
        live = norms > 1e-14
        if np.any(~live & (self.f < -1e-14)):
            return None, -np.inf
        F, f, nz = self.F[live], self.f[live], norms[live]
        if F.shape[0] == 0:
            return np.zeros(self.dim), np.inf
        n = self.dim
        c = np.zeros(n + 1)
        c[-1] = -1.0
        A = np.hstack([F, nz[:, None]])
        res = linprog(c, A_ub=A, b_ub=f, bounds=[(None, None)] * n + [(0, None)], method="highs")
        if res.status == _LP_INFEASIBLE:
            return None, -np.inf
        if res.status == _LP_UNBOUNDED:
            _, x = lp_max(np.zeros(n), F, f)
            return x, np.inf
        if res.status != _LP_OK:
            raise InvalidPartition(f"Chebyshev LP failed: {res.message}")
        return np.asarray(res.x[:n], dtype=float), float(res.x[-1])

    def is_empty(self, tol: float = 1e-12) -> bool:
        _, r = self.chebyshev()
        return r < -tol

    def is_bounded(self) -> bool:
        """LP boundedness check: every coordinate has finite support both ways."""
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = 1.0
            for sign in (1.0, -1.0):
                value, _ = lp_max(sign * e, self.F, self.f)
                if not np.isfinite(value):
                    return False
        return True

    def support(self, direction):
        """max direction.x over the set, with an attaining point."""
        return lp_max(direction, self.F, self.f)

    def bounding_box(self):
        lo = np.empty(self.dim)
        hi = np.empty(self.dim)
        for i in range(self.dim):
            e = np.zeros(self.dim)
            e[i] = 1.0
            hi[i], _ = lp_max(e, self.F, self.f)
            v, _ = lp_max(-e, self.F, self.f)
            lo[i] = -v
        return lo, hi

    def vertices(self) -> np.ndarray:
        """Vertex enumeration via halfspace intersection (needs bounded, full-dim)."""
        center, radius = self.chebyshev()
        if center is None or radius <= 1e-12:
            raise InvalidPartition("vertex enumeration needs a full-dimensional polyhedron")
        halfspaces = np.hstack([self.F, -self.f[:, None]])
        hs = HalfspaceIntersection(halfspaces, center)
        pts = hs.intersections
        hull = ConvexHull(pts)
        return pts[hull.vertices]

    def normalized(self) -> "Polyhedron":
        norms = np.linalg.norm(self.F, axis=1)
        live = norms > 1e-14
        F = self.F[live] / norms[live, None]
        f = self.f[live] / norms[live]
        return Polyhedron(F, f)

    def remove_redundancy(self, tol: float = 1e-9) -> "Polyhedron":
        """Drop rows implied by the others (sequential LP test)."""
        poly = self.normalized()
        F = list(poly.F)
        f = list(poly.f)
        i = 0
        while i < len(F):
            F_other = np.array(F[:i] + F[i + 1 :])
            f_other = np.array(f[:i] + f[i + 1 :])
            if F_other.shape[0] == 0:
                break
            value, _ = lp_max(F[i], F_other, f_other)
            if value <= f[i] + tol:
                del F[i]
                del f[i]
            else:
                i += 1
        return Polyhedron(np.array(F), np.array(f))


def intersect_all(polys) -> Polyhedron:
    polys = list(polys)
    out = polys[0]
    for p in polys[1:]:
        out = out.intersect(p)
    return out
