"""System class, constraint sets, state-space partition, and their certification.

Dynamics handled here have linear unforced part and a diagonal state-dependent
input gain:

    x(k+1) = A x(k) + sum_i b_i g_i(x(k)) u_i = A x(k) + B G(x) u

where each scalar gain g_i is one of a small closed-form vocabulary (affine,
quadratic, sinusoid) so that sign and curvature on a polyhedron can be
certified soundly rather than sampled.
"""
from __future__ import annotations

import dataclasses
import enum
from typing import Optional, Sequence

import numpy as np

from . import solver
from .errors import (
    InvalidPartition,
    NotEquilibrium,
    UnsupportedAtomForShift,
)
from .polyhedra import Polyhedron, lp_max, lp_min

SIGN_TOL = 1e-9
CURVATURE_TOL = 1e-10


# ---------------------------------------------------------------------------
# nonlinearity atoms


@dataclasses.dataclass(frozen=True, eq=False)
class Affine:
    """c.x + d"""

    c: np.ndarray
    d: float

    def __post_init__(self):
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).ravel())
        object.__setattr__(self, "d", float(self.d))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return x @ self.c + self.d

    def grad(self, x):
        return self.c.copy()

    def hess(self, x):
        n = self.c.size
        return np.zeros((n, n))

    def to_dict(self):
        return {"type": "affine", "c": self.c.tolist(), "d": self.d}


@dataclasses.dataclass(frozen=True, eq=False)
class Quadratic:
    """x.Hx + c.x + d with symmetric H"""

    H: np.ndarray
    c: np.ndarray
    d: float

    def __post_init__(self):
        H = np.asarray(self.H, dtype=float)
        if H.ndim != 2 or H.shape[0] != H.shape[1]:
            raise ValueError("H must be square")
        if np.max(np.abs(H - H.T)) > 1e-12:
            raise ValueError("H must be symmetric to 1e-12")
        object.__setattr__(self, "H", 0.5 * (H + H.T))
        object.__setattr__(self, "c", np.asarray(self.c, dtype=float).ravel())
        object.__setattr__(self, "d", float(self.d))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        quad = np.einsum("...i,ij,...j->...", x, self.H, x)
        return quad + x @ self.c + self.d

    def grad(self, x):
        return 2.0 * (self.H @ np.asarray(x, dtype=float)) + self.c

    def hess(self, x):
        return 2.0 * self.H

    def to_dict(self):
        return {"type": "quadratic", "H": self.H.tolist(), "c": self.c.tolist(), "d": self.d}


@dataclasses.dataclass(frozen=True, eq=False)
class Sinusoid:
    """a * cos(w.x + phi)"""

    a: float
    w: np.ndarray
    phi: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "w", np.asarray(self.w, dtype=float).ravel())
        object.__setattr__(self, "phi", float(self.phi))

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.a * np.cos(x @ self.w + self.phi)

    def grad(self, x):
        theta = float(np.asarray(x, dtype=float) @ self.w + self.phi)
        return -self.a * np.sin(theta) * self.w

    def hess(self, x):
        theta = float(np.asarray(x, dtype=float) @ self.w + self.phi)
        return -self.a * np.cos(theta) * np.outer(self.w, self.w)

    def to_dict(self):
        return {"type": "sinusoid", "a": self.a, "w": self.w.tolist(), "phi": self.phi}


Atom = Affine | Quadratic | Sinusoid


def atom_from_dict(spec: dict) -> Atom:
    kind = spec.get("type")
    if kind == "affine":
        return Affine(spec["c"], spec["d"])
    if kind == "quadratic":
        return Quadratic(spec["H"], spec["c"], spec["d"])
    if kind == "sinusoid":
        return Sinusoid(spec["a"], spec["w"], spec["phi"])
    raise ValueError(f"unknown atom type {kind!r}")


# ---------------------------------------------------------------------------
# system model and constraint data


@dataclasses.dataclass(frozen=True, eq=False)
class SystemModel:
    A: np.ndarray
    B: np.ndarray
    g: tuple

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        g = tuple(self.g)
        if A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        if B.shape[0] != A.shape[0]:
            raise ValueError("B must have as many rows as A")
        if B.shape[1] != len(g):
            raise ValueError(f"B has {B.shape[1]} columns but {len(g)} gains given")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "g", g)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]


def eval_g(model: SystemModel, x) -> np.ndarray:
    """Gain vector (g_1(x), ..., g_m(x)); batched when x is (K, n)."""
    x = np.asarray(x, dtype=float)
    vals = [atom.value(x) for atom in model.g]
    return np.stack(vals, axis=-1)


def eval_g_grad(model: SystemModel, x) -> np.ndarray:
    return np.stack([atom.grad(x) for atom in model.g])


def eval_g_hess(model: SystemModel, x) -> np.ndarray:
    return np.stack([atom.hess(x) for atom in model.g])


def gain_matrix(model: SystemModel, x) -> np.ndarray:
    return np.diag(eval_g(model, x))


def step_true(model: SystemModel, x, u) -> np.ndarray:
    """One step of the true nonlinear dynamics."""
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    return model.A @ x + model.B @ (eval_g(model, x) * u)


@dataclasses.dataclass(frozen=True, eq=False)
class InputBox:
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float).ravel()
        upper = np.asarray(self.upper, dtype=float).ravel()
        if lower.size != upper.size:
            raise ValueError("lower/upper size mismatch")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)

    @property
    def m(self) -> int:
        return self.lower.size

    def origin_strictly_inside(self) -> bool:
        return bool(np.all(self.lower < 0) and np.all(self.upper > 0))

    def contains(self, u, tol: float = 1e-9) -> bool:
        u = np.asarray(u, dtype=float)
        return bool(np.all(u >= self.lower - tol) and np.all(u <= self.upper + tol))

    def shifted(self, u_eq) -> "InputBox":
        u_eq = np.asarray(u_eq, dtype=float)
        return InputBox(self.lower - u_eq, self.upper - u_eq)


class CurvatureSign(enum.Enum):
    NONNEG_CONCAVE = "nonneg_concave"
    NONPOS_CONVEX = "nonpos_convex"
    REJECT = "reject"


@dataclasses.dataclass(frozen=True, eq=False)
class Partition:
    """One convex piece X_j of the state constraint set (index is 1-based)."""

    index: int
    poly: Polyhedron
    sign_case: Optional[dict] = None  # channel (0-based) -> CurvatureSign

    @property
    def certified(self) -> bool:
        return self.sign_case is not None

    def with_sign_case(self, sign_case: dict) -> "Partition":
        return Partition(self.index, self.poly, dict(sign_case))


@dataclasses.dataclass(frozen=True, eq=False)
class ConstraintUniverse:
    partitions: tuple
    input_box: InputBox
    state_set: Polyhedron  # the union target X

    def __post_init__(self):
        object.__setattr__(self, "partitions", tuple(self.partitions))

    @property
    def s(self) -> int:
        return len(self.partitions)

    def membership(self, x, tol: float = 1e-9):
        """Indices (1-based) of partitions containing x."""
        return [p.index for p in self.partitions if p.poly.contains(x, tol)]

    def in_union(self, x, tol: float = 1e-9) -> bool:
        return any(p.poly.contains(x, tol) for p in self.partitions)


# ---------------------------------------------------------------------------
# certification


def _check_partition_geometry(poly: Polyhedron):
    center, radius = poly.chebyshev()
    if center is None or radius < -1e-12:
        raise InvalidPartition("partition polyhedron is empty")
    if not poly.is_bounded():
        raise InvalidPartition("partition polyhedron is unbounded")


def _sign_from_range(lo: float, hi: float, tol: float) -> Optional[bool]:
    """True for nonnegative, False for nonpositive, None for mixed."""
    if lo >= -tol:
        return True
    if hi <= tol:
        return False
    return None


def _quadratic_range(atom: Quadratic, poly: Polyhedron, curvature_tol: float):
    """(lo, hi, convexish, concaveish) of the quadratic over the polyhedron."""
    eigs = np.linalg.eigvalsh(atom.hess(np.zeros(poly.dim)))
    convexish = bool(eigs.min() >= -2 * curvature_tol)
    concaveish = bool(eigs.max() <= 2 * curvature_tol)
    if not convexish and not concaveish:
        return None, None, False, False

    if convexish and concaveish:
        lo, _ = lp_min(atom.c, poly.F, poly.f)
        hi, _ = lp_max(atom.c, poly.F, poly.f)
        return lo + atom.d, hi + atom.d, True, True

    center, _ = poly.chebyshev()
    rows = [
        solver.LinearConstraint(np.arange(poly.dim), poly.F[r], float(poly.f[r]))
        for r in range(poly.nrows)
    ]

    def _convex_min(H, c, const):
        program = solver.ConvexProgram(
            H=2.0 * H,
            q=c,
            const=const,
            E=np.zeros((0, poly.dim)),
            d=np.zeros(0),
            ineqs=tuple(rows),
            warm_start=center,
        )
        outcome = solver.solve(program)
        if outcome.status != solver.SolveStatus.OPTIMAL:
            raise InvalidPartition(f"curvature-range solve failed: {outcome.status}")
        return outcome.value

    vertices = poly.vertices()
    vertex_vals = atom.value(vertices)
    if convexish:
        lo = _convex_min(atom.H, atom.c, atom.d)
        hi = float(np.max(vertex_vals))
    else:
        neg = _convex_min(-atom.H, -atom.c, -atom.d)
        hi = -neg
        lo = float(np.min(vertex_vals))
    return lo, hi, convexish, concaveish


def certify_curvature(
    atom: Atom,
    poly: Polyhedron,
    sign_tol: float = SIGN_TOL,
    curvature_tol: float = CURVATURE_TOL,
) -> CurvatureSign:
    """Decide which sign/curvature branch the atom satisfies on the polyhedron.

    The decision is sound: REJECT is returned whenever the conservative
    criteria cannot establish one of the two branches. The polyhedron must be
    nonempty and bounded.
    """
    _check_partition_geometry(poly)

    if isinstance(atom, Affine):
        lo, _ = lp_min(atom.c, poly.F, poly.f)
        hi, _ = lp_max(atom.c, poly.F, poly.f)
        sign = _sign_from_range(lo + atom.d, hi + atom.d, sign_tol)
        if sign is True:
            return CurvatureSign.NONNEG_CONCAVE
        if sign is False:
            return CurvatureSign.NONPOS_CONVEX
        return CurvatureSign.REJECT

    if isinstance(atom, Quadratic):
        lo, hi, convexish, concaveish = _quadratic_range(atom, poly, curvature_tol)
        if lo is None:
            return CurvatureSign.REJECT
        sign = _sign_from_range(lo, hi, sign_tol)
        if sign is True and concaveish:
            return CurvatureSign.NONNEG_CONCAVE
        if sign is False and convexish:
            return CurvatureSign.NONPOS_CONVEX
        return CurvatureSign.REJECT

    if isinstance(atom, Sinusoid):
        if abs(atom.a) <= sign_tol:
            return CurvatureSign.NONNEG_CONCAVE
        lo, _ = lp_min(atom.w, poly.F, poly.f)
        hi, _ = lp_max(atom.w, poly.F, poly.f)
        lo, hi = lo + atom.phi, hi + atom.phi
        k = int(np.round(0.5 * (lo + hi) / np.pi))
        ang_tol = 1e-9
        if lo < k * np.pi - np.pi / 2 - ang_tol or hi > k * np.pi + np.pi / 2 + ang_tol:
            return CurvatureSign.REJECT
        cos_nonneg = k % 2 == 0
        if (atom.a > 0) == cos_nonneg:
            return CurvatureSign.NONNEG_CONCAVE
        return CurvatureSign.NONPOS_CONVEX

    raise TypeError(f"unknown atom {type(atom)!r}")


# ---------------------------------------------------------------------------
# universe validation


@dataclasses.dataclass
class ValidationReport:
    passed: bool
    failures: list
    sign_table: dict  # (partition index 1-based, channel 0-based) -> CurvatureSign
    s: int
    coverage: dict

    def summary(self) -> str:
        lines = [f"partitions: s = {self.s}", f"status: {'PASS' if self.passed else 'FAIL'}"]
        for (j, i), case in sorted(self.sign_table.items()):
            lines.append(f"  g_{i + 1} on X_{j}: {case.value}")
        cov = self.coverage
        if cov:
            lines.append(
                f"union coverage ({cov['method']}, heuristic): "
                f"{cov['points']} points, {cov['uncovered']} uncovered"
            )
        for fail in self.failures:
            lines.append(f"  FAIL: {fail}")
        return "\n".join(lines)


def _coverage_points(state_set: Polyhedron, pitch_frac: float, mc_samples: int):
    lo, hi = state_set.bounding_box()
    n = state_set.dim
    if n <= 3:
        diameter = float(np.max(hi - lo))
        pitch = max(pitch_frac * diameter, 1e-12)
        axes = [np.arange(lo[i], hi[i] + 0.5 * pitch, pitch) for i in range(n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
        method = "grid"
    else:
        rng = np.random.default_rng(0)
        pts = rng.uniform(lo, hi, size=(mc_samples, n))
        method = "monte_carlo"
    inside = state_set.contains(pts, tol=1e-9)
    return pts[inside], method


def validate_universe(
    model: SystemModel,
    universe: ConstraintUniverse,
    pitch_frac: float = 0.05,
    mc_samples: int = 4096,
) -> ValidationReport:
    """Run every certification and consistency check; collect failures."""
    failures = []
    sign_table = {}

    if not universe.input_box.origin_strictly_inside():
        failures.append("input box: origin not strictly interior")
    if universe.input_box.m != model.m:
        failures.append("input box dimension does not match number of inputs")

    for part in universe.partitions:
        for i, atom in enumerate(model.g):
            try:
                case = certify_curvature(atom, part.poly)
            except InvalidPartition as exc:
                failures.append(f"partition X_{part.index}: {exc}")
                break
            if case is CurvatureSign.REJECT:
                failures.append(
                    f"g_{i + 1} on X_{part.index}: neither branch certified (REJECT)"
                )
            else:
                sign_table[(part.index, i)] = case

    pts, method = _coverage_points(universe.state_set, pitch_frac, mc_samples)
    covered = np.zeros(len(pts), dtype=bool)
    for part in universe.partitions:
        covered |= part.poly.contains(pts, tol=1e-9)
    uncovered = int(np.sum(~covered))
    if uncovered > 0:
        failures.append(f"union coverage: {uncovered} of {len(pts)} sample points uncovered")
    coverage = {"method": method, "points": int(len(pts)), "uncovered": uncovered, "heuristic": True}

    return ValidationReport(
        passed=not failures,
        failures=failures,
        sign_table=sign_table,
        s=universe.s,
        coverage=coverage,
    )


def certify_universe(model: SystemModel, universe: ConstraintUniverse) -> ConstraintUniverse:
    """Return a universe whose partitions carry certified sign cases.

    Raises InvalidPartition when any (gain, partition) pair is rejected.
    """
    new_parts = []
    for part in universe.partitions:
        cases = {}
        for i, atom in enumerate(model.g):
            case = certify_curvature(atom, part.poly)
            if case is CurvatureSign.REJECT:
                raise InvalidPartition(
                    f"g_{i + 1} is neither nonneg-concave nor nonpos-convex on X_{part.index}"
                )
            cases[i] = case
        new_parts.append(part.with_sign_case(cases))
    return ConstraintUniverse(tuple(new_parts), universe.input_box, universe.state_set)


# ---------------------------------------------------------------------------
# equilibrium shifting (bilinear systems only)


@dataclasses.dataclass(frozen=True, eq=False)
class ShiftResult:
    model: SystemModel
    universe: ConstraintUniverse
    x_eq: np.ndarray
    u_eq: np.ndarray
    residual: float
    input_box_ok: bool


def shift_to_equilibrium(
    model: SystemModel,
    universe: ConstraintUniverse,
    x_eq,
    u_eq,
    resid_tol: float = 1e-9,
) -> ShiftResult:
    """Re-center an all-affine-gain system at an equilibrium (x_eq, u_eq).

    The only gate is the fixed-point residual; an equilibrium input outside
    the box is reported via the input_box_ok flag but does not raise.
    """
    x_eq = np.asarray(x_eq, dtype=float).ravel()
    u_eq = np.asarray(u_eq, dtype=float).ravel()
    for atom in model.g:
        if not isinstance(atom, Affine):
            raise UnsupportedAtomForShift(
                "equilibrium shifting needs affine gains; got " + type(atom).__name__
            )
    residual = float(np.max(np.abs(x_eq - step_true(model, x_eq, u_eq))))
    if residual > resid_tol:
        raise NotEquilibrium(f"fixed-point residual {residual:.3e} exceeds {resid_tol:.1e}")

    A_shift = model.A.copy()
    new_atoms = []
    for i, atom in enumerate(model.g):
        A_shift += u_eq[i] * np.outer(model.B[:, i], atom.c)
        new_atoms.append(Affine(atom.c, float(atom.c @ x_eq + atom.d)))
    shifted_model = SystemModel(A_shift, model.B, tuple(new_atoms))

    shifted_parts = tuple(
        Partition(p.index, p.poly.shifted(x_eq)) for p in universe.partitions
    )
    shifted_universe = ConstraintUniverse(
        shifted_parts,
        universe.input_box.shifted(u_eq),
        universe.state_set.shifted(x_eq),
    )
    shifted_universe = certify_universe(shifted_model, shifted_universe)
    return ShiftResult(
        model=shifted_model,
        universe=shifted_universe,
        x_eq=x_eq,
        u_eq=u_eq,
        residual=residual,
        input_box_ok=shifted_universe.input_box.origin_strictly_inside(),
    )
