"""Uniqueness certification for systems of generalized Sylvester and
conjugate-Sylvester matrix equations."""
from .exceptions import (InternalInconsistency, ParseError, PreconditionError, ShapeError,
                         SingularPencilError, SpectralGroupingError, StructureError, SylvError,
                         ValidationError)
from .model import (GeneralEquation, GeneralSystem, PeriodicSystem, UnknownRef, parse_system,
                    serialize_system, validate)
from .numeric import DEFAULT_TOL, INF, Spectrum, Tolerances, chordal_distance, pencil_eigenvalues
from .oracle import SolveStatus, oracle_nonsingular, oracle_solution_dimension, solve
from .pencils import Variant
from .reduction import reduce_system
from .uniqueness import Verdict, verdict_general, verdict_periodic

__version__ = "0.1.0"

__all__ = [
    "SylvError", "ShapeError", "ParseError", "ValidationError", "SingularPencilError",
    "StructureError", "PreconditionError", "InternalInconsistency", "SpectralGroupingError",
    "GeneralEquation", "GeneralSystem", "PeriodicSystem", "UnknownRef",
    "parse_system", "serialize_system", "validate",
    "DEFAULT_TOL", "INF", "Spectrum", "Tolerances", "chordal_distance", "pencil_eigenvalues",
    "SolveStatus", "oracle_nonsingular", "oracle_solution_dimension", "solve",
    "Variant", "reduce_system", "Verdict", "verdict_general", "verdict_periodic",
]
