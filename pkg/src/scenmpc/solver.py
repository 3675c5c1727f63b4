"""Primal-dual interior-point solver for smooth convex programs.

Solves

    min 0.5 z'Hz + q'z + const
    s.t. E z = d,  f_i(z) <= 0  (each f_i convex, smooth)

by eliminating the equality constraints through a nullspace parametrization
and running a feasible-start primal-dual Newton iteration with adaptive
(Mehrotra-style) centering and a second-order corrector. A strictly feasible
start is produced by the epigraph phase-one problem min t s.t. f_i(z) <= t.

Iterates keep f_i(z) < 0, so constraint Hessians are only ever evaluated on
the region where their convexity was certified. All linear algebra is dense;
target problem sizes are a few hundred variables.
"""
from __future__ import annotations

import dataclasses
import enum
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.linalg

from .errors import SolverFailure

KKT_TOL = 1e-8
MAX_ITER = 200
PHASE1_FEASIBLE_MARGIN = 1e-6
PHASE1_INFEASIBLE_THRESHOLD = 1e-7


# ---------------------------------------------------------------------------
# constraints


@dataclasses.dataclass(frozen=True, eq=False)
class LinearConstraint:
    """a . z[idx] <= b"""

    idx: np.ndarray
    a: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "idx", np.asarray(self.idx, dtype=int).ravel())
        object.__setattr__(self, "a", np.asarray(self.a, dtype=float).ravel())
        object.__setattr__(self, "b", float(self.b))

    @property
    def is_affine(self) -> bool:
        return True

    def value(self, z):
        return float(self.a @ np.asarray(z, dtype=float)[self.idx] - self.b)

    def grad_full(self, z, nz):
        g = np.zeros(nz)
        g[self.idx] = self.a
        return g


@dataclasses.dataclass(frozen=True, eq=False)
class SmoothConstraint:
    """handle(z[idx]) <= 0 with handle exposing value/grad/hess on the slice."""

    idx: np.ndarray
    handle: object

    def __post_init__(self):
        object.__setattr__(self, "idx", np.asarray(self.idx, dtype=int).ravel())

    @property
    def is_affine(self) -> bool:
        return bool(getattr(self.handle, "is_affine", False))

    def value(self, z):
        return float(self.handle.value(np.asarray(z, dtype=float)[self.idx]))

    def grad_full(self, z, nz):
        g = np.zeros(nz)
        g[self.idx] = self.handle.grad(np.asarray(z, dtype=float)[self.idx])
        return g


Constraint = LinearConstraint | SmoothConstraint


class SolveStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    MAX_ITER = "max_iter"
    NUMERICAL_FAILURE = "numerical_failure"


@dataclasses.dataclass
class SolveOutcome:
    status: SolveStatus
    value: float
    z: Optional[np.ndarray]
    lam: Optional[np.ndarray]
    nu: Optional[np.ndarray]
    kkt_stationarity: float
    kkt_primal: float
    kkt_complementarity: float
    iterations: int
    message: str = ""


@dataclasses.dataclass
class PhaseOneResult:
    feasible: bool
    z: Optional[np.ndarray]
    t_star: float
    iterations: int


@dataclasses.dataclass
class SolverOptions:
    kkt_tol: float = KKT_TOL
    max_iter: int = MAX_ITER
    trace: Optional[object] = None  # file-like; one line per iteration


@dataclasses.dataclass(eq=False)
class ConvexProgram:
    """Data of one convex subproblem.

    nullspace, when provided, is a pair (Z, z_p) with E @ Z = 0 and
    E @ z_p = d; it lets callers with structured equalities (e.g. dynamics)
    skip the SVD-based elimination.
    """

    H: np.ndarray
    q: np.ndarray
    E: np.ndarray
    d: np.ndarray
    ineqs: tuple
    const: float = 0.0
    nullspace: Optional[tuple] = None
    warm_start: Optional[np.ndarray] = None
    hessian_checked: bool = False

    def __post_init__(self):
        self.H = np.atleast_2d(np.asarray(self.H, dtype=float))
        self.q = np.asarray(self.q, dtype=float).ravel()
        self.E = np.asarray(self.E, dtype=float).reshape(-1, self.dim)
        self.d = np.asarray(self.d, dtype=float).ravel()
        self.ineqs = tuple(self.ineqs)
        if not self.hessian_checked:
            if self.H.size and float(np.linalg.eigvalsh(0.5 * (self.H + self.H.T)).min()) < -1e-10:
                raise ValueError("objective Hessian is not PSD")
        self.H = 0.5 * (self.H + self.H.T)

    @property
    def dim(self) -> int:
        return np.asarray(self.q).size

    def objective(self, z) -> float:
        z = np.asarray(z, dtype=float)
        return float(0.5 * z @ self.H @ z + self.q @ z + self.const)

    def constraint_values(self, z) -> np.ndarray:
        return np.array([c.value(z) for c in self.ineqs])


# ---------------------------------------------------------------------------
# equality elimination


@dataclasses.dataclass(eq=False)
class _Reduced:
    program: ConvexProgram
    Z: np.ndarray  # (nz, r)
    z_p: np.ndarray
    H_r: np.ndarray
    q_r: np.ndarray
    const: float
    lin_A: np.ndarray  # (M_lin, r)
    lin_b: np.ndarray
    smooth: list  # (constraint, Z_slice, zp_slice)
    perm: np.ndarray  # reduced order -> original constraint index
    epigraph: bool = False  # extra variable t, subtracted from smooth rows only

    @property
    def r(self) -> int:
        return self.Z.shape[1] + (1 if self.epigraph else 0)

    @property
    def n_con(self) -> int:
        return self.lin_A.shape[0] + len(self.smooth)

    def point(self, var) -> np.ndarray:
        w = var[: self.Z.shape[1]]
        return self.z_p + self.Z @ w

    def grad0(self, var) -> np.ndarray:
        if self.epigraph:
            g = np.zeros(self.r)
            g[-1] = 1.0
            return g
        return self.H_r @ var + self.q_r

    def eval(self, var):
        """Constraint values and Jacobian at the reduced point.

        In epigraph mode only the smooth rows see the extra variable; the
        affine rows stay hard, which keeps every trial point inside the
        region where the smooth constraints' convexity was certified.
        """
        rw = self.Z.shape[1]
        w = var[:rw]
        vals = np.empty(self.n_con)
        J = np.zeros((self.n_con, self.r))
        n_lin = self.lin_A.shape[0]
        if n_lin:
            vals[:n_lin] = self.lin_A @ w - self.lin_b
            J[:n_lin, :rw] = self.lin_A
        for k, (con, Zs, zps) in enumerate(self.smooth):
            y = zps + Zs @ w
            vals[n_lin + k] = con.handle.value(y)
            J[n_lin + k, :rw] = con.handle.grad(y) @ Zs
        if self.epigraph:
            vals[n_lin:] -= var[-1]
            J[n_lin:, -1] = -1.0
        return vals, J

    def lagrangian_hessian(self, var, lam) -> np.ndarray:
        rw = self.Z.shape[1]
        Hl = np.zeros((self.r, self.r))
        if not self.epigraph:
            Hl[:rw, :rw] = self.H_r
        w = var[:rw]
        n_lin = self.lin_A.shape[0]
        for k, (con, Zs, zps) in enumerate(self.smooth):
            li = lam[n_lin + k]
            if li == 0.0:
                continue
            y = zps + Zs @ w
            Hl[:rw, :rw] += li * (Zs.T @ con.handle.hess(y) @ Zs)
        return Hl

    def as_epigraph(self) -> "_Reduced":
        return dataclasses.replace(self, epigraph=True)


def _reduce(program: ConvexProgram):
    """Nullspace parametrization; returns (_Reduced, eq_residual) or None if
    the equality system is inconsistent."""
    nz = program.dim
    if program.nullspace is not None:
        Z, z_p = program.nullspace
        Z = np.asarray(Z, dtype=float).reshape(nz, -1)
        z_p = np.asarray(z_p, dtype=float).ravel()
    elif program.E.shape[0] == 0:
        Z = np.eye(nz)
        z_p = np.zeros(nz)
    else:
        U, S, Vt = np.linalg.svd(program.E, full_matrices=True)
        tol = max(program.E.shape) * np.finfo(float).eps * (S[0] if S.size else 1.0)
        rank = int(np.sum(S > tol))
        Z = Vt[rank:].T
        if rank:
            z_p = Vt[:rank].T @ ((U[:, :rank].T @ program.d) / S[:rank])
        else:
            z_p = np.zeros(nz)
    if program.E.shape[0]:
        resid = float(np.max(np.abs(program.E @ z_p - program.d)))
        if resid > 1e-8 * (1.0 + float(np.max(np.abs(program.d), initial=0.0))):
            return None

    H_r = Z.T @ program.H @ Z
    q_r = Z.T @ (program.H @ z_p + program.q)
    const = program.objective(z_p)

    lin_rows, lin_rhs, lin_idx = [], [], []
    smooth, smooth_idx = [], []
    for k, con in enumerate(program.ineqs):
        if isinstance(con, LinearConstraint):
            lin_rows.append(con.a @ Z[con.idx, :])
            lin_rhs.append(con.b - con.a @ z_p[con.idx])
            lin_idx.append(k)
        else:
            smooth.append((con, Z[con.idx, :], z_p[con.idx]))
            smooth_idx.append(k)
    lin_A = np.array(lin_rows).reshape(len(lin_rows), Z.shape[1])
    lin_b = np.array(lin_rhs)
    perm = np.array(lin_idx + smooth_idx, dtype=int)
    return _Reduced(program, Z, z_p, H_r, q_r, const, lin_A, lin_b, smooth, perm)


# ---------------------------------------------------------------------------
# primal-dual iteration


def _max_step(x, dx) -> float:
    neg = dx < 0
    if not np.any(neg):
        return np.inf
    return float(np.min(-x[neg] / dx[neg]))


def _primal_max_step(red: _Reduced, var, dvar, vals, Jdv, n_lin) -> float:
    """Largest step fraction keeping all constraint values strictly negative.

    Linear rows give an exact ratio bound; smooth rows are handled by
    evaluating the true values and shrinking.
    """
    grow = Jdv > 1e-16
    cap = 1.0
    if np.any(grow):
        cap = min(cap, float(np.min(-vals[grow] / Jdv[grow])))
    alpha = 0.999 * cap
    if len(red.smooth) == 0:
        return alpha
    for _ in range(60):
        if alpha <= 1e-14:
            return 0.0
        vals_t, _ = red.eval(var + alpha * dvar)
        if float(np.max(vals_t[n_lin:])) < 0 and float(np.max(vals_t, initial=-1.0)) < 0:
            return alpha
        alpha *= 0.7
    return 0.0


def _pd_iterate(red: _Reduced, var0, opts: SolverOptions, early_exit=None):
    """Core feasible-start primal-dual loop on the reduced problem.

    Centering is adaptive: the affine (sigma = 0) probe step estimates the
    achievable gap reduction honestly, including primal feasibility caps;
    when the resulting step collapses, a strongly centered direction without
    corrector is used instead. Returns (var, lam, status, iterations).
    Requires f(var0) < 0 elementwise.
    """
    var = np.asarray(var0, dtype=float).copy()
    vals, J = red.eval(var)
    M = vals.size
    n_lin = red.lin_A.shape[0]
    if np.max(vals) >= 0:
        return var, np.zeros(M), SolveStatus.NUMERICAL_FAILURE, 0
    lam = np.clip(-1.0 / vals, 1e-8, 1e8)
    tol = opts.kkt_tol

    for it in range(opts.max_iter):
        vals, J = red.eval(var)
        if early_exit is not None and early_exit(var, vals):
            return var, lam, SolveStatus.OPTIMAL, it
        grad0 = red.grad0(var)
        r_d = grad0 + J.T @ lam
        mu = float(-(vals @ lam) / M)
        comp_max = float(np.max(np.abs(lam * vals)))
        if (
            float(np.max(np.abs(r_d))) <= tol
            and mu <= tol
            and comp_max <= 100 * tol
        ):
            return var, lam, SolveStatus.OPTIMAL, it

        Hl = red.lagrangian_hessian(var, lam)
        W = -lam / vals  # > 0
        M_mat = Hl + J.T @ (W[:, None] * J)

        reg = 0.0
        cho = None
        for _ in range(12):
            try:
                cho = scipy.linalg.cho_factor(
                    M_mat + (reg * np.eye(red.r) if reg else 0.0), lower=True
                )
                break
            except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError):
                reg = max(1e-12, 100.0 * reg)
        if cho is None:
            return var, lam, SolveStatus.NUMERICAL_FAILURE, it

        def direction(sigma_mu, corr):
            rhs = -grad0 + J.T @ ((sigma_mu + corr) / vals)
            dvar = scipy.linalg.cho_solve(cho, rhs)
            Jdv = J @ dvar
            dlam = -lam - (sigma_mu + corr) / vals - (lam / vals) * Jdv
            return dvar, dlam, Jdv

        def step_length(dvar, dlam, Jdv):
            a = min(
                0.99 * min(1.0, _max_step(lam, dlam)),
                _primal_max_step(red, var, dvar, vals, Jdv, n_lin),
            )
            return max(a, 0.0)

        # honest affine probe: how far can a pure Newton step actually go
        dvar_a, dlam_a, Jdv_a = direction(0.0, np.zeros(M))
        a_aff = step_length(dvar_a, dlam_a, Jdv_a)
        vals_lin = vals + a_aff * Jdv_a
        mu_aff = max(float(-(vals_lin @ (lam + a_aff * dlam_a)) / M), 0.0)
        sigma = float(np.clip((mu_aff / mu) ** 3, 1e-8, 0.99))

        def try_direction(cand_sigma, use_corr):
            """Backtracked step for one centering choice; None when rejected."""
            corr = dlam_a * Jdv_a if use_corr else np.zeros(M)
            smu = cand_sigma * mu
            dvar, dlam, Jdv = direction(smu, corr)
            alpha = step_length(dvar, dlam, Jdv)
            if alpha <= 1e-14:
                return None
            r_cent = -lam * vals - smu
            base = float(np.sqrt(r_d @ r_d + r_cent @ r_cent))
            for _ in range(40):
                var_t = var + alpha * dvar
                lam_t = lam + alpha * dlam
                vals_t, J_t = red.eval(var_t)
                if np.all(np.isfinite(vals_t)) and np.max(vals_t) < 0:
                    r_d_t = red.grad0(var_t) + J_t.T @ lam_t
                    r_cent_t = -lam_t * vals_t - smu
                    norm_t = float(np.sqrt(r_d_t @ r_d_t + r_cent_t @ r_cent_t))
                    if norm_t <= (1.0 - 0.01 * alpha) * base + 1e-14:
                        return alpha, dvar, dlam
                alpha *= 0.5
            return None

        step = try_direction(sigma, a_aff > 0.5)
        if step is None or step[0] < 0.05:
            # collapsing step: one strongly centered retry, keep the better
            retry = try_direction(max(0.5, sigma), False)
            if retry is not None and (step is None or retry[0] > step[0]):
                step = retry
        if step is None:
            return var, lam, SolveStatus.NUMERICAL_FAILURE, it
        alpha, dvar, dlam = step

        var = var + alpha * dvar
        lam = lam + alpha * dlam
        if not (np.all(np.isfinite(var)) and np.all(np.isfinite(lam))):
            return var, lam, SolveStatus.NUMERICAL_FAILURE, it
        if opts.trace is not None:
            opts.trace.write(
                f"iter={it} mu={mu:.3e} rd={float(np.max(np.abs(r_d))):.3e} "
                f"alpha={alpha:.3e} sigma={sigma:.3e}\n"
            )

    return var, lam, SolveStatus.MAX_ITER, opts.max_iter


# ---------------------------------------------------------------------------
# public entry points


def _scatter_lam(red: _Reduced, lam_red) -> np.ndarray:
    lam = np.zeros(len(red.program.ineqs))
    lam[red.perm] = lam_red
    return lam


def _kkt_report(program: ConvexProgram, z, lam):
    nz = program.dim
    grad = program.H @ z + program.q
    comp = 0.0
    primal = (
        float(np.max(np.abs(program.E @ z - program.d))) if program.E.shape[0] else 0.0
    )
    for c, li in zip(program.ineqs, lam):
        v = c.value(z)
        grad = grad + li * c.grad_full(z, nz)
        comp = max(comp, abs(li * v))
        primal = max(primal, v)
    if program.E.shape[0]:
        nu, *_ = np.linalg.lstsq(program.E.T, -grad, rcond=None)
        stat = float(np.max(np.abs(grad + program.E.T @ nu)))
    else:
        nu = np.zeros(0)
        stat = float(np.max(np.abs(grad), initial=0.0))
    return stat, max(primal, 0.0), comp, nu


def _solve_equality_qp(red: _Reduced, program: ConvexProgram, opts) -> SolveOutcome:
    """No inequality constraints: one reduced Newton solve."""
    try:
        w = np.linalg.solve(red.H_r, -red.q_r)
    except np.linalg.LinAlgError:
        w, *_ = np.linalg.lstsq(red.H_r, -red.q_r, rcond=None)
    if not np.all(np.isfinite(w)):
        return SolveOutcome(
            SolveStatus.NUMERICAL_FAILURE, np.nan, None, None, None,
            np.inf, np.inf, np.inf, 0, "singular reduced Hessian",
        )
    z = red.z_p + red.Z @ w
    stat, primal, comp, nu = _kkt_report(program, z, np.zeros(len(program.ineqs)))
    return SolveOutcome(
        SolveStatus.OPTIMAL, program.objective(z), z, np.zeros(len(program.ineqs)), nu,
        stat, primal, comp, 1,
    )


def _affine_margin_lp(red: _Reduced):
    """Maximize the worst slack of the reduced affine rows.

    Returns (margin, w). margin is +inf when there are no affine rows and
    -inf when even the LP is infeasible (cannot happen for finite rows).
    """
    from scipy.optimize import linprog

    rw = red.Z.shape[1]
    n_lin = red.lin_A.shape[0]
    if n_lin == 0:
        return np.inf, np.zeros(rw)
    c = np.zeros(rw + 1)
    c[-1] = -1.0
    A = np.hstack([red.lin_A, np.ones((n_lin, 1))])
    # cap the margin so the LP stays bounded even for cone-like regions
    A = np.vstack([A, np.concatenate([np.zeros(rw), [1.0]])])
    b = np.concatenate([red.lin_b, [1e6]])
    res = linprog(c, A_ub=A, b_ub=b, bounds=[(None, None)] * (rw + 1), method="highs")
    if res.status != 0:
        return -np.inf, np.zeros(rw)
    return float(res.x[-1]), np.asarray(res.x[:rw], dtype=float)


def _phase_one_reduced(red: _Reduced, opts: SolverOptions):
    """Phase one on a reduced problem; returns (feasible, w, t_star, iters).

    w is None when infeasible; it is strictly interior whenever t_star < 0.
    """
    rw = red.Z.shape[1]
    margin, w0 = _affine_margin_lp(red)
    if margin < -PHASE1_INFEASIBLE_THRESHOLD:
        return False, None, -margin, 0
    if not red.smooth:
        t_star = -margin
        return t_star <= PHASE1_INFEASIBLE_THRESHOLD, w0, t_star, 0
    if margin <= 1e-9:
        # affine rows admit no interior: decide on the max-margin point
        vals, _ = red.eval(w0)
        t_star = float(np.max(vals))
        return t_star <= PHASE1_INFEASIBLE_THRESHOLD, w0, t_star, 0

    epi = red.as_epigraph()
    base_vals, _ = red.eval(w0)
    n_lin = red.lin_A.shape[0]
    t0 = float(np.max(base_vals[n_lin:])) + 1.0
    var0 = np.concatenate([w0, [t0]])

    def early(var, vals):
        f_smooth = vals[n_lin:] + var[-1]
        worst = max(
            float(np.max(vals[:n_lin], initial=-np.inf)),
            float(np.max(f_smooth)),
        )
        return worst <= -PHASE1_FEASIBLE_MARGIN

    var, lam, status, iters = _pd_iterate(epi, var0, opts, early_exit=early)
    if status == SolveStatus.NUMERICAL_FAILURE:
        raise SolverFailure("phase-one numerical failure")
    if status == SolveStatus.MAX_ITER:
        raise SolverFailure("phase-one hit iteration cap")
    w = var[:rw]
    vals, _ = red.eval(w)
    t_star = float(np.max(vals))
    return t_star <= PHASE1_INFEASIBLE_THRESHOLD, w, t_star, iters


def phase_one(program: ConvexProgram, opts: Optional[SolverOptions] = None) -> PhaseOneResult:
    """Decide strict feasibility of {E z = d, f_i(z) <= 0}.

    Affine inequality rows are handled exactly by a max-margin LP; the
    smooth rows are then relaxed through an epigraph variable, min t s.t.
    f_i(z) <= t, solved with the affine rows kept hard so that every iterate
    stays where the smooth constraints are certified convex. The iteration
    stops early once a point with margin PHASE1_FEASIBLE_MARGIN is found;
    infeasible iff the optimal t* exceeds PHASE1_INFEASIBLE_THRESHOLD.
    """
    opts = opts or SolverOptions()
    red = _reduce(program)
    if red is None:
        return PhaseOneResult(False, None, np.inf, 0)
    if not program.ineqs:
        return PhaseOneResult(True, red.z_p.copy(), -np.inf, 0)
    if red.Z.shape[1] == 0:
        z = red.z_p
        t = float(np.max(program.constraint_values(z)))
        return PhaseOneResult(t <= PHASE1_INFEASIBLE_THRESHOLD, z.copy(), t, 0)
    feasible, w, t_star, iters = _phase_one_reduced(red, opts)
    z = red.point(w) if w is not None else None
    return PhaseOneResult(feasible, z if feasible else None, t_star, iters)


def solve(program: ConvexProgram, opts: Optional[SolverOptions] = None) -> SolveOutcome:
    """Solve the convex program to KKT tolerance.

    Infeasibility is decided by phase one. Degenerate problems whose feasible
    set has empty interior are reported as NUMERICAL_FAILURE rather than
    solved on the boundary.
    """
    opts = opts or SolverOptions()
    red = _reduce(program)
    if red is None:
        return SolveOutcome(
            SolveStatus.INFEASIBLE, np.inf, None, None, None,
            np.inf, np.inf, np.inf, 0, "inconsistent equality constraints",
        )

    rw = red.Z.shape[1]
    if rw == 0:
        z = red.z_p
        vals = program.constraint_values(z) if program.ineqs else np.zeros(0)
        if vals.size and float(np.max(vals)) > PHASE1_INFEASIBLE_THRESHOLD:
            return SolveOutcome(
                SolveStatus.INFEASIBLE, np.inf, None, None, None,
                np.inf, np.inf, np.inf, 0, "point fixed by equalities violates inequalities",
            )
        stat, primal, comp, nu = _kkt_report(program, z, np.zeros(len(program.ineqs)))
        return SolveOutcome(
            SolveStatus.OPTIMAL, program.objective(z), z.copy(),
            np.zeros(len(program.ineqs)), nu, stat, primal, comp, 0,
        )

    if not program.ineqs:
        return _solve_equality_qp(red, program, opts)

    w0 = None
    if program.warm_start is not None:
        zw = np.asarray(program.warm_start, dtype=float)
        eq_ok = (
            program.E.shape[0] == 0
            or float(np.max(np.abs(program.E @ zw - program.d))) <= 1e-9
        )
        if eq_ok and float(np.max(program.constraint_values(zw))) < 0:
            w_try, *_ = np.linalg.lstsq(red.Z, zw - red.z_p, rcond=None)
            vals_try, _ = red.eval(w_try)
            if float(np.max(vals_try)) < 0:
                w0 = w_try
    if w0 is None:
        try:
            feasible, w1, t_star, it1 = _phase_one_reduced(red, opts)
        except SolverFailure as exc:
            return SolveOutcome(
                SolveStatus.NUMERICAL_FAILURE, np.nan, None, None, None,
                np.inf, np.inf, np.inf, 0, str(exc),
            )
        if not feasible:
            return SolveOutcome(
                SolveStatus.INFEASIBLE, np.inf, None, None, None,
                np.inf, np.inf, np.inf, it1, f"phase-one t*={t_star:.3e}",
            )
        if t_star >= 0:
            return SolveOutcome(
                SolveStatus.NUMERICAL_FAILURE, np.nan, None, None, None,
                np.inf, np.inf, np.inf, it1,
                "feasible set has (numerically) empty interior",
            )
        w0 = w1

    var, lam_red, status, iters = _pd_iterate(red, w0, opts)
    z = red.point(var)
    lam = _scatter_lam(red, lam_red)
    stat, primal, comp, nu = _kkt_report(program, z, lam)
    value = program.objective(z)
    if status != SolveStatus.OPTIMAL:
        return SolveOutcome(status, value, z, lam, nu, stat, primal, comp, iters)
    return SolveOutcome(SolveStatus.OPTIMAL, value, z, lam, nu, stat, primal, comp, iters)
