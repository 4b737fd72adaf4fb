"""Exact laws, transforms and simulation of Dirichlet random walks in the unit ball."""
from .errors import (
    ConvergenceError,
    DimensionMismatch,
    DomainError,
    InternalError,
    NotClosedForm,
    UnsupportedLaw,
)
from .exactlaw import WalkConfig, radial_law
from .laws import BetaLaw, BetaMixture, MixedSignedLaw, PolyDensity, law_from_json
from .sampler import RngStream, StickConfig, sample_stick_breaking, sample_walk

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "DimensionMismatch",
    "DomainError",
    "InternalError",
    "NotClosedForm",
    "UnsupportedLaw",
    "WalkConfig",
    "radial_law",
    "BetaLaw",
    "BetaMixture",
    "MixedSignedLaw",
    "PolyDensity",
    "law_from_json",
    "RngStream",
    "StickConfig",
    "sample_walk",
    "sample_stick_breaking",
]
