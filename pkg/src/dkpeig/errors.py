"""Exceptions raised by the solvers."""


class SolverError(RuntimeError):
    """Base class for numerical failures (CLI exit code 1)."""


class NonConvergence(SolverError):
    """Fixed-point iteration exhausted its budget or stopped contracting."""

    def __init__(self, message: str, diagnostic: dict | None = None):
        super().__init__(message)
        self.diagnostic = diagnostic or {}


class DegenerateCoefficient(SolverError):
    """Beltrami coefficient is not bounded away from modulus one."""


class SeriesDivergence(SolverError):
    """Neumann series partial sums stopped contracting."""


class OutsideCertifiedRegion(SolverError):
    """Query point lies below the covering bound of the k-inversion."""


class TrajectoryEscaped(SolverError):
    """Characteristic left the box; ``trajectory`` holds the in-box segment."""

    def __init__(self, message: str, trajectory=None):
        super().__init__(message)
        self.trajectory = trajectory
