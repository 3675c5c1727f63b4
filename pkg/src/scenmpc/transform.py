"""Mixed state/artificial-input constraint sets and input conversion.

The artificial input is v = G(x) u. On a partition where channel i has a
certified sign/curvature case, the box bounds on u_i become two convex
inequalities in (x, v_i):

    nonneg-concave gain:  lb_i * g_i(x) - v_i <= 0   and  -ub_i * g_i(x) + v_i <= 0
    nonpos-convex gain:   ub_i * g_i(x) - v_i <= 0   and  -lb_i * g_i(x) + v_i <= 0

Both left-hand sides are convex because the multiplying constants are
negative in each case. At points with g_i(x) = 0 the pair collapses to
v_i = 0, which is exactly the consistency condition between the true and the
artificial dynamics; no explicit equality constraint is ever materialized.
"""
from __future__ import annotations

import dataclasses
from typing import Optional

import numpy as np

from .errors import (
    InconsistentArtificialInput,
    InputBoxViolation,
    UncertifiedPartition,
)
from .model import (
    Affine,
    ConstraintUniverse,
    CurvatureSign,
    InputBox,
    SystemModel,
    eval_g,
)
from .polyhedra import Polyhedron

ZERO_TOL = 1e-9


@dataclasses.dataclass(frozen=True, eq=False)
class IndexSplit:
    """Channels with vanishing gain (S) and its complement, 0-based."""

    S: tuple
    N_set: tuple
    zero_tol: float


def split_indices(model: SystemModel, x, zero_tol: float = ZERO_TOL) -> IndexSplit:
    g = eval_g(model, x)
    S = tuple(int(i) for i in np.flatnonzero(np.abs(g) <= zero_tol))
    N_set = tuple(int(i) for i in range(model.m) if i not in S)
    return IndexSplit(S, N_set, zero_tol)


def forward_input(model: SystemModel, x, u) -> np.ndarray:
    """v = G(x) u, componentwise."""
    return eval_g(model, x) * np.asarray(u, dtype=float)


def recover_input(
    model: SystemModel,
    input_box: InputBox,
    x,
    v,
    zero_tol: float = ZERO_TOL,
    consistency_tol: float = 1e-7,
    box_noise_tol: float = 1e-7,
) -> np.ndarray:
    """True input from the artificial one: u_i = v_i / g_i(x), u_S = 0.

    Channels with vanishing gain must carry (numerically) vanishing v.
    Box violations within box_noise_tol are clipped; larger ones raise.
    """
    v = np.asarray(v, dtype=float)
    g = eval_g(model, x)
    split = split_indices(model, x, zero_tol)
    u = np.zeros(model.m)
    for i in split.S:
        if abs(v[i]) > consistency_tol:
            raise InconsistentArtificialInput(
                f"channel {i + 1}: |v|={abs(v[i]):.3e} but gain vanishes"
            )
    for i in split.N_set:
        u[i] = v[i] / g[i]
    over = np.maximum(u - input_box.upper, 0.0)
    under = np.maximum(input_box.lower - u, 0.0)
    worst = float(max(over.max(initial=0.0), under.max(initial=0.0)))
    if worst > box_noise_tol:
        raise InputBoxViolation(f"recovered input violates the box by {worst:.3e}")
    return np.clip(u, input_box.lower, input_box.upper)


@dataclasses.dataclass(frozen=True, eq=False)
class StageConstraint:
    """One generator coeff * g_atom(x) + v_sign * v[channel] <= 0 on (x, v)."""

    atom: object
    coeff: float
    channel: int
    v_sign: float
    n: int
    m: int
    label: str = ""

    @property
    def is_affine(self) -> bool:
        return isinstance(self.atom, Affine)

    def value(self, y):
        y = np.asarray(y, dtype=float)
        x = y[..., : self.n]
        return self.coeff * self.atom.value(x) + self.v_sign * y[..., self.n + self.channel]

    def grad(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros(self.n + self.m)
        out[: self.n] = self.coeff * self.atom.grad(y[: self.n])
        out[self.n + self.channel] = self.v_sign
        return out

    def hess(self, y):
        y = np.asarray(y, dtype=float)
        out = np.zeros((self.n + self.m, self.n + self.m))
        out[: self.n, : self.n] = self.coeff * self.atom.hess(y[: self.n])
        return out

    def as_affine_row(self):
        """(row, rhs) over (x, v) when the atom is affine: row.(x,v) <= rhs."""
        if not self.is_affine:
            raise ValueError("generator is not affine")
        row = np.zeros(self.n + self.m)
        row[: self.n] = self.coeff * self.atom.c
        row[self.n + self.channel] = self.v_sign
        return row, -self.coeff * self.atom.d

    def to_dict(self):
        return {
            "label": self.label,
            "coeff": self.coeff,
            "channel": self.channel,
            "v_sign": self.v_sign,
            "atom": self.atom.to_dict(),
        }


@dataclasses.dataclass(frozen=True, eq=False)
class MixedSetZj:
    """Constraints whose satisfaction is equivalent to x in X_j and u in U."""

    j: int
    poly: Polyhedron  # X_j rows, acting on x alone
    generators: tuple  # 2m StageConstraint over (x, v)
    n: int
    m: int

    @property
    def polyhedral(self) -> bool:
        return all(gen.is_affine for gen in self.generators)

    def generator_values(self, x, v) -> np.ndarray:
        y = np.concatenate([np.asarray(x, dtype=float), np.asarray(v, dtype=float)])
        return np.array([gen.value(y) for gen in self.generators])

    def contains(self, x, v, tol: float = 1e-9) -> bool:
        if not self.poly.contains(x, tol):
            return False
        return bool(np.all(self.generator_values(x, v) <= tol))

    def min_slack(self, x, v) -> float:
        state_slack = self.poly.min_slack(np.asarray(x, dtype=float))
        gen_slack = float(np.min(-self.generator_values(x, v)))
        return min(state_slack, gen_slack)

    def to_dict(self):
        return {
            "partition": self.j,
            "state_rows": {"F": self.poly.F.tolist(), "f": self.poly.f.tolist()},
            "generators": [gen.to_dict() for gen in self.generators],
        }


def build_zj(universe: ConstraintUniverse, model: SystemModel, j: int) -> MixedSetZj:
    """Mixed set for partition j (1-based index into the universe)."""
    part = next((p for p in universe.partitions if p.index == j), None)
    if part is None:
        raise UncertifiedPartition(f"no partition with index {j}")
    if not part.certified:
        raise UncertifiedPartition(f"partition X_{j} has no certified sign case")
    lb = universe.input_box.lower
    ub = universe.input_box.upper
    gens = []
    for i, atom in enumerate(model.g):
        case = part.sign_case[i]
        if case is CurvatureSign.NONNEG_CONCAVE:
            lo_coeff, hi_coeff = lb[i], -ub[i]
        elif case is CurvatureSign.NONPOS_CONVEX:
            lo_coeff, hi_coeff = ub[i], -lb[i]
        else:
            raise UncertifiedPartition(f"partition X_{j} channel {i + 1} rejected")
        gens.append(
            StageConstraint(atom, float(lo_coeff), i, -1.0, model.n, model.m,
                            label=f"X{j}_g{i + 1}_lower")
        )
        gens.append(
            StageConstraint(atom, float(hi_coeff), i, +1.0, model.n, model.m,
                            label=f"X{j}_g{i + 1}_upper")
        )
    return MixedSetZj(j, part.poly, tuple(gens), model.n, model.m)


def build_all_zj(universe: ConstraintUniverse, model: SystemModel) -> tuple:
    return tuple(build_zj(universe, model, p.index) for p in universe.partitions)


def in_some_zj(zsets, x, v, tol: float = 1e-9) -> bool:
    return any(z.contains(x, v, tol) for z in zsets)
