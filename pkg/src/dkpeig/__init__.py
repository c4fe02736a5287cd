"""Analytic eigenfunctions of the dispersionless KP Lax pair on a periodic grid."""

from .errors import (
    DegenerateCoefficient,
    NonConvergence,
    OutsideCertifiedRegion,
    SeriesDivergence,
    SolverError,
    TrajectoryEscaped,
)
from .hopf import HopfSolution, SolverConfig, solve_phi
from .spectral import ComplexField, Grid2D, PotentialSpec, SpectralParam, sample_potential

__version__ = "0.1.0"

__all__ = [
    "ComplexField",
    "DegenerateCoefficient",
    "Grid2D",
    "HopfSolution",
    "NonConvergence",
    "OutsideCertifiedRegion",
    "PotentialSpec",
    "SeriesDivergence",
    "SolverConfig",
    "SolverError",
    "SpectralParam",
    "TrajectoryEscaped",
    "sample_potential",
    "solve_phi",
]
