"""Exception hierarchy shared by all modules."""


class SylvError(Exception):
    """Base class for errors raised by this package."""


class ShapeError(SylvError, ValueError):
    """Coefficient blocks have inconsistent sizes."""


class ParseError(SylvError, ValueError):
    """Input document is not valid JSON or does not follow the schema."""


class ValidationError(SylvError, ValueError):
    """Input system violates the square-coefficient size rules."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(str(v) for v in self.violations))


class SingularPencilError(SylvError, ArithmeticError):
    """No sampled shift makes ``M + mu*N`` numerically invertible."""


class StructureError(SylvError):
    """A component that should be a single cycle is not."""


class PreconditionError(SylvError, ValueError):
    """An operation was called outside its stated domain."""


class InternalInconsistency(SylvError):
    """Two independent routes to the same verdict disagree."""


class SpectralGroupingError(SylvError, ArithmeticError):
    """Root-of-unity siblings of a formal product eigenvalue could not be grouped."""
