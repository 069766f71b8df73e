"""Exception hierarchy shared by all modules."""


class ConeError(ValueError):
    """Base class for every error raised by this package."""


class InvalidInputError(ConeError):
    """Malformed argument: zero vector, nonpositive center, asymmetric matrix."""


class DimensionError(InvalidInputError):
    """Dimension is too small or inconsistent across arguments."""


class PreconditionError(ConeError):
    """A geometric precondition does not hold (e.g. plane misses the center)."""


class DegenerateConeError(PreconditionError):
    """The requested cone does not exist or its vertex is at infinity."""


class NotALorenzConeError(ConeError):
    """Matrix inertia differs from (n-1, 0, 1)."""


class NotInKernelError(ConeError):
    """H^T X H is not (numerically) zero, so X has no sandwich decomposition."""


class NearTangencyError(DegenerateConeError):
    """Origin is (numerically) on the sphere; the tangent cone is a half-space."""
