"""Exception hierarchy shared by all pdmsusy modules."""


class PDMError(Exception):
    """Base class for every error raised by the package."""


class DomainError(PDMError, ValueError):
    """A point lies outside the interval a function is defined on."""


class PositivityError(PDMError, ValueError):
    """The deforming function is not strictly positive where it must be."""


class ParameterError(PDMError, ValueError):
    """Model parameters violate a stated window or are unknown."""

    def __init__(self, message, window=None):
        super().__init__(message)
        self.window = window


class ConstructionError(PDMError, ValueError):
    """A class-consistent object cannot be built from the given constants."""


class SIViolationError(PDMError):
    """A (W, f, V_eff) triple does not satisfy the factorization identity."""


class SIUnsolvableError(PDMError):
    """The shape-invariance step has no real solution."""


class SIAmbiguityError(SIUnsolvableError):
    """The shape-invariance step does not single out one parameter set."""


class NoSuchLevelError(PDMError, IndexError):
    """A level index beyond the number of bound states was requested."""


class TransformSingularityError(PDMError, ValueError):
    """The polynomial variable transform is singular at the requested point."""


class QuadratureError(PDMError, RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


class InconclusiveLimitError(PDMError, RuntimeError):
    """An endpoint limit could not be estimated reliably."""


class VerificationUnsupportedError(PDMError, RuntimeError):
    """The numerical oracle cannot treat this model/parameter combination."""
