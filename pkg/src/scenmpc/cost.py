"""Quadratic stage costs in artificial-input coordinates.

The cost is defined on (x, v); its pull-back to true inputs is obtained by
substituting v = G(x) u, so effort is priced by its effect on the state
rather than by its raw magnitude.
"""
from __future__ import annotations

import dataclasses

import numpy as np

from .model import SystemModel
from .transform import forward_input


@dataclasses.dataclass(frozen=True, eq=False)
class QuadraticStageCost:
    Q: np.ndarray  # PSD, on x
    R: np.ndarray  # PD, on v

    def __post_init__(self):
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        R = np.atleast_2d(np.asarray(self.R, dtype=float))
        if float(np.linalg.eigvalsh(0.5 * (Q + Q.T)).min()) < -1e-10:
            raise ValueError("Q must be positive semidefinite")
        if float(np.linalg.eigvalsh(0.5 * (R + R.T)).min()) < 1e-10:
            raise ValueError("R must be positive definite")
        object.__setattr__(self, "Q", 0.5 * (Q + Q.T))
        object.__setattr__(self, "R", 0.5 * (R + R.T))


def stage_cost_v(cost: QuadraticStageCost, x, v) -> float:
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    return float(x @ cost.Q @ x + v @ cost.R @ v)


def stage_cost_u(model: SystemModel, cost: QuadraticStageCost, x, u) -> float:
    return stage_cost_v(cost, x, forward_input(model, x, u))
