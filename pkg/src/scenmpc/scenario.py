"""Constraint scenarios: enumeration, convex subproblem assembly, offline
pruning of infeasible subtrees, and the per-state optimal solve.

A scenario assigns one partition index to each prediction step. Scenario
coefficients eps_0..eps_{N-1} in {1..s} are packed into the integer

    mu = 1 + sum_k (eps_k - 1) * s^k,

a bijection onto {1..s^N}. Pruning walks the scenario tree depth first,
deciding feasibility of each prefix with the state at step 0 left free, so an
infeasible prefix eliminates its whole subtree soundly. The terminal
constraint enters only at full depth, and leaf feasibility is recorded both
with and without it.
"""
from __future__ import annotations

import dataclasses
import json
import pathlib
from typing import Optional

import numpy as np

from . import solver
from .cost import QuadraticStageCost
from .errors import OutOfRange, SolverFailure, StateOutsideX
from .model import ConstraintUniverse, SystemModel
from .terminal import TerminalIngredients
from .transform import build_all_zj, recover_input


def encode(eps, s: int) -> int:
    mu = 1
    for k, e in enumerate(eps):
        e = int(e)
        if not 1 <= e <= s:
            raise OutOfRange(f"coefficient {e} at step {k} outside 1..{s}")
        mu += (e - 1) * s**k
    return mu


def decode(mu: int, N: int, s: int) -> tuple:
    if not 1 <= mu <= s**N:
        raise OutOfRange(f"scenario index {mu} outside 1..{s}^{N}")
    rem = mu - 1
    eps = []
    for _ in range(N):
        eps.append(rem % s + 1)
        rem //= s
    return tuple(eps)


@dataclasses.dataclass(frozen=True)
class Scenario:
    eps: tuple
    mu: int

    @staticmethod
    def from_eps(eps, s: int) -> "Scenario":
        return Scenario(tuple(int(e) for e in eps), encode(eps, s))

    @staticmethod
    def from_mu(mu: int, N: int, s: int) -> "Scenario":
        return Scenario(decode(mu, N, s), int(mu))


# ---------------------------------------------------------------------------
# subproblem assembly


def _layout(L: int, n: int, m: int):
    def x_idx(i):
        return np.arange(i * n, (i + 1) * n)

    v_off = (L + 1) * n

    def v_idx(i):
        return np.arange(v_off + i * m, v_off + (i + 1) * m)

    return x_idx, v_idx, (L + 1) * n + L * m


def _dynamics_nullspace(model: SystemModel, L: int, x0):
    """Analytic nullspace/particular point of the dynamics equalities."""
    n, m = model.n, model.m
    x_idx, v_idx, nz = _layout(L, n, m)
    free_x0 = x0 is None
    r = (n if free_x0 else 0) + L * m
    Z = np.zeros((nz, r))
    z_p = np.zeros(nz)
    if free_x0:
        Z[x_idx(0), :n] = np.eye(n)
    else:
        z_p[x_idx(0)] = np.asarray(x0, dtype=float)
    col_v = (n if free_x0 else 0)
    for i in range(L):
        Z[v_idx(i), col_v + i * m : col_v + (i + 1) * m] = np.eye(m)
    for i in range(L):
        Z[x_idx(i + 1)] = model.A @ Z[x_idx(i)]
        Z[x_idx(i + 1), col_v + i * m : col_v + (i + 1) * m] += model.B
        z_p[x_idx(i + 1)] = model.A @ z_p[x_idx(i)]
    return Z, z_p


def _equality_rows(model: SystemModel, L: int, x0):
    n, m = model.n, model.m
    x_idx, v_idx, nz = _layout(L, n, m)
    n_eq = L * n + (0 if x0 is None else n)
    E = np.zeros((n_eq, nz))
    d = np.zeros(n_eq)
    for i in range(L):
        rows = np.arange(i * n, (i + 1) * n)
        E[np.ix_(rows, x_idx(i + 1))] = np.eye(n)
        E[np.ix_(rows, x_idx(i))] = -model.A
        E[np.ix_(rows, v_idx(i))] = -model.B
    if x0 is not None:
        rows = np.arange(L * n, L * n + n)
        E[np.ix_(rows, x_idx(0))] = np.eye(n)
        d[rows] = np.asarray(x0, dtype=float)
    return E, d


def assemble(
    eps,
    model: SystemModel,
    zsets,
    cost: QuadraticStageCost,
    terminal: Optional[TerminalIngredients],
    x0=None,
    include_terminal: bool = True,
) -> solver.ConvexProgram:
    """Convex subproblem for one scenario (or prefix) of length len(eps).

    Decision vector (x(0..L), v(0..L-1)). With x0 given the initial state is
    pinned by equality rows; otherwise it is free, constrained only through
    the step-0 membership (pruning mode).
    """
    eps = tuple(int(e) for e in eps)
    L = len(eps)
    n, m = model.n, model.m
    x_idx, v_idx, nz = _layout(L, n, m)

    H = np.zeros((nz, nz))
    for i in range(L):
        H[np.ix_(x_idx(i), x_idx(i))] = 2.0 * cost.Q
        H[np.ix_(v_idx(i), v_idx(i))] = 2.0 * cost.R
    use_terminal = include_terminal and terminal is not None
    if use_terminal:
        H[np.ix_(x_idx(L), x_idx(L))] = 2.0 * terminal.P

    ineqs = []
    for i in range(L):
        zj = zsets[eps[i] - 1]
        for row, rhs in zip(zj.poly.F, zj.poly.f):
            ineqs.append(solver.LinearConstraint(x_idx(i), row, rhs))
        y_idx = np.concatenate([x_idx(i), v_idx(i)])
        for gen in zj.generators:
            if gen.is_affine:
                row, rhs = gen.as_affine_row()
                ineqs.append(solver.LinearConstraint(y_idx, row, rhs))
            else:
                ineqs.append(solver.SmoothConstraint(y_idx, gen))
    if use_terminal:
        for row, rhs in zip(terminal.T.F, terminal.T.f):
            ineqs.append(solver.LinearConstraint(x_idx(L), row, rhs))

    E, d = _equality_rows(model, L, x0)
    nullspace = _dynamics_nullspace(model, L, x0)
    return solver.ConvexProgram(
        H=H,
        q=np.zeros(nz),
        E=E,
        d=d,
        ineqs=tuple(ineqs),
        nullspace=nullspace,
        hessian_checked=True,
    )


def program_is_qp(program: solver.ConvexProgram) -> bool:
    return all(c.is_affine for c in program.ineqs)


# ---------------------------------------------------------------------------
# offline pruning


@dataclasses.dataclass
class PrunedTree:
    N: int
    s: int
    feasible: tuple  # scenario indices feasible with the terminal constraint
    feasible_no_terminal: tuple
    stats: dict
    config_hash: str = ""

    def save(self, path):
        payload = {
            "N": self.N,
            "s": self.s,
            "config_hash": self.config_hash,
            "feasible": list(self.feasible),
            "feasible_no_terminal": list(self.feasible_no_terminal),
            "stats": self.stats,
        }
        pathlib.Path(path).write_text(json.dumps(payload, sort_keys=True, indent=1))

    @staticmethod
    def load(path) -> "PrunedTree":
        payload = json.loads(pathlib.Path(path).read_text())
        return PrunedTree(
            N=int(payload["N"]),
            s=int(payload["s"]),
            feasible=tuple(payload["feasible"]),
            feasible_no_terminal=tuple(payload["feasible_no_terminal"]),
            stats=dict(payload["stats"]),
            config_hash=payload.get("config_hash", ""),
        )


def prune(
    model: SystemModel,
    universe: ConstraintUniverse,
    cost: QuadraticStageCost,
    terminal: Optional[TerminalIngredients],
    N: int,
    zsets=None,
    solver_opts: Optional[solver.SolverOptions] = None,
    config_hash: str = "",
) -> PrunedTree:
    """Depth-first feasibility sweep over all s^N scenarios.

    Each prefix is checked with the initial state free and no terminal
    constraint; an infeasible prefix removes its s^(N-L) leaves without
    visiting them. Full-length survivors are additionally checked with the
    terminal set. Children are visited in ascending coefficient order.
    """
    zsets = zsets if zsets is not None else build_all_zj(universe, model)
    s = universe.s
    opts = solver_opts or solver.SolverOptions()
    feasible = []
    feasible_no_terminal = []
    stats = {
        "node_solves": 0,
        "subtrees_eliminated": 0,
        "leaves_eliminated": 0,
        "leaves_visited": 0,
    }
    prefix_cache = {}

    def visit(eps):
        L = len(eps)
        program = assemble(eps, model, zsets, cost, terminal, x0=None, include_terminal=False)
        stats["node_solves"] += 1
        try:
            res = solver.phase_one(program, opts)
        except SolverFailure as exc:
            raise SolverFailure(f"pruning prefix {eps}: {exc}") from exc
        prefix_cache[eps] = res.feasible
        if not res.feasible:
            stats["subtrees_eliminated"] += 1
            stats["leaves_eliminated"] += s ** (N - L)
            return
        if L == N:
            stats["leaves_visited"] += 1
            mu = encode(eps, s)
            feasible_no_terminal.append(mu)
            if terminal is None:
                feasible.append(mu)
                return
            full = assemble(eps, model, zsets, cost, terminal, x0=None, include_terminal=True)
            stats["node_solves"] += 1
            try:
                res_t = solver.phase_one(full, opts)
            except SolverFailure as exc:
                raise SolverFailure(f"pruning scenario {eps} with terminal: {exc}") from exc
            if res_t.feasible:
                feasible.append(mu)
            return
        for e in range(1, s + 1):
            visit(eps + (e,))

    for e in range(1, s + 1):
        visit((e,))

    return PrunedTree(
        N=N,
        s=s,
        feasible=tuple(sorted(feasible)),
        feasible_no_terminal=tuple(sorted(feasible_no_terminal)),
        stats=stats,
        config_hash=config_hash,
    )


# ---------------------------------------------------------------------------
# per-state solve


@dataclasses.dataclass
class SolveResult:
    status: str  # "optimal" | "infeasible"
    value: float
    mu_star: Optional[int]
    eps_star: Optional[tuple]
    v0: Optional[np.ndarray]
    u0: Optional[np.ndarray]
    x_pred: Optional[np.ndarray]  # (N+1, n)
    v_pred: Optional[np.ndarray]  # (N, m)
    per_scenario: list  # (mu, status string, value)
    kkt: tuple = (np.nan, np.nan, np.nan)


@dataclasses.dataclass(eq=False)
class ScenarioController:
    """Bundles everything needed to evaluate the control law at a state."""

    model: SystemModel
    universe: ConstraintUniverse
    cost: QuadraticStageCost
    terminal: Optional[TerminalIngredients]
    pruned: PrunedTree
    zsets: tuple = None
    solver_opts: solver.SolverOptions = dataclasses.field(default_factory=solver.SolverOptions)
    zero_tol: float = 1e-9

    def __post_init__(self):
        if self.zsets is None:
            self.zsets = build_all_zj(self.universe, self.model)

    def solve_state(self, x) -> SolveResult:
        """Best scenario value at x; ties broken by the smallest index."""
        x = np.asarray(x, dtype=float).ravel()
        if not self.universe.in_union(x, tol=1e-9):
            raise StateOutsideX(f"state {x.tolist()} outside the partition union")
        N, s = self.pruned.N, self.pruned.s
        best = None
        best_out = None
        per_scenario = []
        for mu in self.pruned.feasible:
            eps = decode(mu, N, s)
            if not self.zsets[eps[0] - 1].poly.contains(x, tol=1e-9):
                per_scenario.append((mu, "skipped_x0", np.inf))
                continue
            program = assemble(eps, self.model, self.zsets, self.cost, self.terminal, x0=x)
            out = solver.solve(program, self.solver_opts)
            if out.status == solver.SolveStatus.OPTIMAL:
                per_scenario.append((mu, "optimal", out.value))
                if best is None or (out.value, mu) < best:
                    best = (out.value, mu)
                    best_out = out
            else:
                per_scenario.append((mu, out.status.value, np.inf))
        if best is None:
            return SolveResult("infeasible", np.inf, None, None, None, None, None, None,
                               per_scenario)
        value, mu_star = best
        eps_star = decode(mu_star, N, s)
        n, m = self.model.n, self.model.m
        z = best_out.z
        x_pred = z[: (N + 1) * n].reshape(N + 1, n)
        v_pred = z[(N + 1) * n :].reshape(N, m)
        v0 = v_pred[0].copy()
        u0 = recover_input(self.model, self.universe.input_box, x, v0,
                           zero_tol=self.zero_tol)
        return SolveResult(
            "optimal", value, mu_star, eps_star, v0, u0, x_pred, v_pred, per_scenario,
            kkt=(best_out.kkt_stationarity, best_out.kkt_primal, best_out.kkt_complementarity),
        )
