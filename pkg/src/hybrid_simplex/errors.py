"""Exception hierarchy shared by every module of the package."""


class SimplexError(Exception):
    """Base class for all errors raised by hybrid_simplex."""


# -- problem construction / standardization
class EmptyProblem(SimplexError, ValueError):
    pass


class InconsistentBounds(SimplexError, ValueError):
    pass


class InfeasibleProblem(SimplexError):
    """Raised by Phase I when the auxiliary optimum is positive."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class IterationLimitReached(SimplexError):
    pass


class NumericalPivot(SimplexError, ArithmeticError):
    pass


# -- partitioning
class ThetaOutOfRange(SimplexError, ValueError):
    pass


class EmptyCapabilities(SimplexError, ValueError):
    pass


class TooFewColumns(SimplexError, ValueError):
    pass


class LaneSpecError(SimplexError, ValueError):
    pass


# -- MPS ingestion
class MpsError(SimplexError, ValueError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnknownSection(MpsError):
    pass


class UndeclaredRowOrColumn(MpsError):
    pass


class MalformedNumeric(MpsError):
    pass


class ConflictingBounds(MpsError):
    pass


class MissingEndata(UserWarning):
    """Warning category: the MPS stream ended without an ENDATA record."""


# -- benchmarking
class NonPositiveTime(SimplexError, ValueError):
    pass


class TraceMismatch(SimplexError):
    """Two configurations of the same benchmark produced different pivot traces."""


class CertificateError(SimplexError):
    """A solve reported Optimal but its tableau failed check_certificate."""
