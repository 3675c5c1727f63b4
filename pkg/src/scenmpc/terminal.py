"""Terminal ingredients: Riccati cost, LQR gain, and an invariant terminal set.

The terminal set is the maximal output admissible set of the LQR closed loop
inside a polyhedral inner approximation of the section
{x : (x, Kx) in Z_j} of the host partition's mixed constraint set. Nonlinear
convex generators are inner-approximated by the convex hull of boundary
points found by ray search, so every point of the resulting set satisfies the
original nonlinear constraints.
"""
from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np
from scipy.spatial import ConvexHull

from .cost import QuadraticStageCost
from .errors import (
    InteriorityViolated,
    NoConvergence,
    NotFinitelyDetermined,
    SingularInnerMatrix,
)
from .model import ConstraintUniverse, SystemModel, eval_g
from .polyhedra import Polyhedron, lp_max
from .transform import MixedSetZj, build_zj

DARE_FP_TOL = 1e-12
DARE_MAX_ITER = 100_000
DARE_RESIDUAL_TOL = 1e-9
MOAS_K_MAX = 200
MOAS_REDUNDANCY_TOL = 1e-9


def dare_residual(A, B, Q, R, P) -> float:
    inner = P - P @ B @ np.linalg.solve(R + B.T @ P @ B, B.T @ P)
    return float(np.max(np.abs(A.T @ inner @ A - P + Q)))


def solve_dare(A, B, Q, R, tol: float = DARE_FP_TOL, max_iter: int = DARE_MAX_ITER) -> np.ndarray:
    """Fixed-point iteration P <- A'(P - P B (R + B'PB)^-1 B'P) A + Q from P = Q.

    Converges for stabilizable (A, B) with positive definite R; divergence or
    stagnation past max_iter raises NoConvergence.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float).reshape(A.shape[0], -1)
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))
    P = Q.copy()
    for _ in range(max_iter):
        BtP = B.T @ P
        inner = P - BtP.T @ np.linalg.solve(R + BtP @ B, BtP)
        P_next = A.T @ inner @ A + Q
        P_next = 0.5 * (P_next + P_next.T)
        if not np.all(np.isfinite(P_next)):
            raise NoConvergence("Riccati iteration diverged")
        if float(np.max(np.abs(P_next - P))) <= tol:
            return P_next
        P = P_next
    raise NoConvergence(f"Riccati iteration did not converge in {max_iter} steps")


def lqr_gain(A, B, P, R) -> np.ndarray:
    """K = -(R + B'PB)^-1 B'PA, for the feedback v = K x."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    B = np.asarray(B, dtype=float).reshape(A.shape[0], -1)
    P = np.atleast_2d(np.asarray(P, dtype=float))
    R = np.atleast_2d(np.asarray(R, dtype=float))
    M = R + B.T @ P @ B
    if np.linalg.cond(M) > 1e14:
        raise SingularInnerMatrix("R + B'PB is numerically singular")
    return -np.linalg.solve(M, B.T @ P @ A)


@dataclasses.dataclass(frozen=True, eq=False)
class TerminalIngredients:
    P: np.ndarray
    K: np.ndarray
    T: Polyhedron
    k_star: int
    partition_index: int
    section_exact: bool  # True when the Z_j section was already polyhedral

    def terminal_cost(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return float(x @ self.P @ x)


def _unit_directions(n: int, n_dirs: int) -> np.ndarray:
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        angles = 2.0 * np.pi * np.arange(n_dirs) / n_dirs
        return np.stack([np.cos(angles), np.sin(angles)], axis=1)
    rng = np.random.default_rng(0)
    dirs = rng.normal(size=(n_dirs, n))
    return dirs / np.linalg.norm(dirs, axis=1, keepdims=True)


def section_polytope(model: SystemModel, zj: MixedSetZj, K, n_dirs: int = 64):
    """Polyhedral subset of {x : (x, Kx) in Z_j}.

    Affine rows are kept exactly. When nonlinear generators are present, the
    whole section is replaced by the convex hull of boundary points along
    n_dirs rays from the origin, which is an inner approximation because the
    section is convex. Returns (Polyhedron, exact_flag).

    Requires the origin strictly inside the section.
    """
    K = np.atleast_2d(np.asarray(K, dtype=float))
    n = zj.n
    rows = [zj.poly.F]
    rhs = [zj.poly.f]
    nonlinear = []
    for gen in zj.generators:
        if gen.is_affine:
            row, b = gen.as_affine_row()
            rows.append((row[:n] + K.T @ row[n:]).reshape(1, n))
            rhs.append(np.array([b]))
        else:
            nonlinear.append(gen)
    F = np.vstack(rows)
    f = np.concatenate(rhs)

    def psi(x):
        vals = F @ x - f
        worst = float(np.max(vals))
        for gen in nonlinear:
            y = np.concatenate([x, K @ x])
            worst = max(worst, float(gen.value(y)))
        return worst

    if psi(np.zeros(n)) >= -1e-12:
        raise InteriorityViolated("origin is not strictly inside the terminal section")

    if not nonlinear:
        return Polyhedron(F, f).normalized(), True

    points = []
    for d in _unit_directions(n, n_dirs):
        hi = 1.0
        for _ in range(60):
            if psi(hi * d) > 0:
                break
            hi *= 2.0
        else:
            raise InteriorityViolated("terminal section is unbounded along a ray")
        lo = 0.0
        for _ in range(80):
            mid = 0.5 * (lo + hi)
            if psi(mid * d) > 0:
                hi = mid
            else:
                lo = mid
        points.append(lo * d)
    hull = ConvexHull(np.array(points))
    Fh = hull.equations[:, :-1]
    fh = -hull.equations[:, -1]
    return Polyhedron(Fh, fh).normalized(), False


def maximal_admissible_set(A_cl, section: Polyhedron, k_max: int = MOAS_K_MAX,
                           tol: float = MOAS_REDUNDANCY_TOL):
    """Largest set with C A_cl^k x <= c for all k >= 0, by facet propagation.

    Terminates at the determinedness index k* where propagating the section
    rows one more step adds nothing. Returns (polyhedron, k_star).
    """
    A_cl = np.atleast_2d(np.asarray(A_cl, dtype=float))
    if float(np.max(np.abs(np.linalg.eigvals(A_cl)))) >= 1.0:
        raise NotFinitelyDetermined("closed loop is not strictly stable")
    C, c = section.F, section.f
    if float(np.min(c)) <= 0:
        raise InteriorityViolated("origin is not strictly inside the section")
    O_F, O_f = C.copy(), c.copy()
    power = A_cl.copy()
    for t in range(1, k_max + 2):
        J = C @ power
        violated = []
        for i in range(J.shape[0]):
            value, _ = lp_max(J[i], O_F, O_f)
            if value > c[i] + tol:
                violated.append(i)
        if not violated:
            poly = Polyhedron(O_F, O_f).remove_redundancy(tol)
            return poly, t - 1
        O_F = np.vstack([O_F, J[violated]])
        O_f = np.concatenate([O_f, c[violated]])
        power = power @ A_cl
    raise NotFinitelyDetermined(f"admissible set not determined within {k_max} steps")


def build_terminal_set(model: SystemModel, zj: MixedSetZj, K, n_dirs: int = 64,
                       k_max: int = MOAS_K_MAX, zero_tol: float = 1e-9):
    """Invariant terminal polyhedron inside Z_j under v = Kx.

    Preconditions: origin strictly inside X_j and every gain nonzero at the
    origin (otherwise finite determination is refused rather than
    approximated). Returns (T, k_star, section_exact).
    """
    g0 = eval_g(model, np.zeros(model.n))
    if np.any(np.abs(g0) <= zero_tol):
        raise InteriorityViolated("some input gain vanishes at the origin")
    if zj.poly.min_slack(np.zeros(model.n)) <= 1e-12:
        raise InteriorityViolated("origin is not strictly inside the host partition")
    section, exact = section_polytope(model, zj, K, n_dirs)
    A_cl = model.A + model.B @ np.atleast_2d(np.asarray(K, dtype=float))
    T, k_star = maximal_admissible_set(A_cl, section, k_max)
    return T, k_star, exact


def build_ingredients(model: SystemModel, universe: ConstraintUniverse,
                      cost: QuadraticStageCost, partition_index: int,
                      n_dirs: int = 64, k_max: int = MOAS_K_MAX) -> TerminalIngredients:
    """DARE cost, LQR gain, and terminal set for one host partition."""
    P = solve_dare(model.A, model.B, cost.Q, cost.R)
    resid = dare_residual(model.A, model.B, cost.Q, cost.R, P)
    if resid > DARE_RESIDUAL_TOL:
        raise NoConvergence(f"DARE residual {resid:.3e} above {DARE_RESIDUAL_TOL:.1e}")
    K = lqr_gain(model.A, model.B, P, cost.R)
    zj = build_zj(universe, model, partition_index)
    T, k_star, exact = build_terminal_set(model, zj, K, n_dirs=n_dirs, k_max=k_max)
    return TerminalIngredients(P=P, K=K, T=T, k_star=k_star,
                               partition_index=partition_index, section_exact=exact)


def auto_terminal_partition(model: SystemModel, universe: ConstraintUniverse,
                            zero_tol: float = 1e-9) -> int:
    """First partition with the origin strictly inside and all gains nonzero at 0."""
    g0 = eval_g(model, np.zeros(model.n))
    if np.any(np.abs(g0) <= zero_tol):
        raise InteriorityViolated("some input gain vanishes at the origin")
    for part in universe.partitions:
        if part.poly.min_slack(np.zeros(model.n)) > 1e-12:
            return part.index
    raise InteriorityViolated("no partition contains the origin strictly inside")
