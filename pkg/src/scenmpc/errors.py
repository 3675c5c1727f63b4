"""Exception taxonomy shared by all scenmpc modules."""


class ScenmpcError(Exception):
    """Base class for all library errors."""


class ConfigError(ScenmpcError):
    """Configuration file is malformed or inconsistent."""


class InvalidPartition(ScenmpcError):
    """Partition polyhedron is empty, unbounded, or otherwise unusable."""


class UncertifiedPartition(ScenmpcError):
    """Operation requires a partition whose sign/curvature case was certified."""


class NotEquilibrium(ScenmpcError):
    """Supplied (x_eq, u_eq) does not satisfy the fixed-point equation."""


class UnsupportedAtomForShift(ScenmpcError):
    """Equilibrium shifting is only implemented for affine input gains."""


class InconsistentArtificialInput(ScenmpcError):
    """Artificial input is nonzero on a channel whose gain vanishes."""


class InputBoxViolation(ScenmpcError):
    """Recovered input violates the input box beyond numerical noise."""


class StateOutsideX(ScenmpcError):
    """Queried state lies outside the union of partitions."""


class SolverFailure(ScenmpcError):
    """Interior-point iteration hit its iteration cap or a numerical breakdown."""


class NoConvergence(ScenmpcError):
    """Riccati fixed-point iteration did not converge (pair likely not stabilizable)."""


class SingularInnerMatrix(ScenmpcError):
    """R + B'PB is singular; LQR gain undefined."""


class InteriorityViolated(ScenmpcError):
    """Terminal set construction needs 0 strictly inside the host partition and nonzero gains at 0."""


class NotFinitelyDetermined(ScenmpcError):
    """Invariant-set iteration exceeded its step cap without becoming redundant."""


class OutOfRange(ScenmpcError):
    """Scenario index or coefficient vector outside the valid range."""
