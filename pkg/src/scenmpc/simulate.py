"""Closed-loop engine: apply the first optimal input to the true dynamics.

Each step solves the scenario family at the current state, recovers the true
input from the winning artificial one, advances the nonlinear dynamics, and
logs the step together with its worst constraint slack.
"""
from __future__ import annotations

import dataclasses
import io
from typing import Optional

import numpy as np

from .model import SystemModel, step_true
from .scenario import ScenarioController, SolveResult


@dataclasses.dataclass(frozen=True, eq=False)
class StepRecord:
    k: int
    x: np.ndarray
    u: np.ndarray
    v: np.ndarray
    value: float
    mu_star: int
    min_slack: float


@dataclasses.dataclass(eq=False)
class Trajectory:
    records: list
    final_state: np.ndarray
    status: str  # "completed" | "converged" | "infeasible"
    n: int
    m: int

    def states(self) -> np.ndarray:
        xs = [r.x for r in self.records] + [self.final_state]
        return np.array(xs)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = (
            ["k"]
            + [f"x_{i + 1}" for i in range(self.n)]
            + [f"u_{i + 1}" for i in range(self.m)]
            + [f"v_{i + 1}" for i in range(self.m)]
            + ["V", "mu_star", "min_slack"]
        )
        buf.write(",".join(cols) + "\n")
        for r in self.records:
            fields = (
                [str(r.k)]
                + [repr(float(v)) for v in r.x]
                + [repr(float(v)) for v in r.u]
                + [repr(float(v)) for v in r.v]
                + [repr(float(r.value)), str(r.mu_star), repr(float(r.min_slack))]
            )
            buf.write(",".join(fields) + "\n")
        fields = [str(len(self.records))] + [repr(float(v)) for v in self.final_state]
        fields += [""] * (2 * self.m + 3)
        buf.write(",".join(fields) + "\n")
        return buf.getvalue()


def _runtime_slack(controller: ScenarioController, x, u, v) -> float:
    box = controller.universe.input_box
    u_slack = float(np.min(np.concatenate([u - box.lower, box.upper - u])))
    z_slack = max(zj.min_slack(x, v) for zj in controller.zsets)
    return min(u_slack, z_slack)


def step(x, controller: ScenarioController):
    """One closed-loop step. Returns (next_state, record, result)."""
    x = np.asarray(x, dtype=float).ravel()
    res: SolveResult = controller.solve_state(x)
    if res.status != "optimal":
        return None, None, res
    u = res.u0
    x_next = step_true(controller.model, x, u)
    record = StepRecord(
        k=-1,
        x=x.copy(),
        u=u.copy(),
        v=res.v0.copy(),
        value=res.value,
        mu_star=res.mu_star,
        min_slack=_runtime_slack(controller, x, u, res.v0),
    )
    return x_next, record, res


def run(
    x0,
    steps: int,
    controller: ScenarioController,
    stop_tol: float = 1e-6,
    target=None,
) -> Trajectory:
    """Iterate step() until the horizon, infeasibility, or convergence to target."""
    x = np.asarray(x0, dtype=float).ravel()
    n, m = controller.model.n, controller.model.m
    target = np.zeros(n) if target is None else np.asarray(target, dtype=float)
    records = []
    status = "completed"
    for k in range(steps):
        if float(np.max(np.abs(x - target))) <= stop_tol:
            status = "converged"
            break
        x_next, record, res = step(x, controller)
        if record is None:
            status = "infeasible"
            break
        records.append(dataclasses.replace(record, k=k))
        x = x_next
    else:
        if steps > 0 and float(np.max(np.abs(x - target))) <= stop_tol:
            status = "converged"
    return Trajectory(records=records, final_state=x, status=status, n=n, m=m)
