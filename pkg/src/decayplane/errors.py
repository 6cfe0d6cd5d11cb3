"""Exception types raised across the package."""


class DecayPlaneError(Exception):
    """Base class for all package errors."""


class DomainError(DecayPlaneError, ValueError):
    """An argument lies outside the domain of the function."""


class DegenerateFrame(DecayPlaneError):
    """Momentum direction collinear with the reference axis; azimuth undefined."""


class ZeroVector(DecayPlaneError, ValueError):
    pass


class DegeneratePlane(DecayPlaneError):
    """A decay plane normal has (numerically) vanishing length."""


class InvalidQuantumNumbers(DecayPlaneError, ValueError):
    pass


class EnvelopeViolation(DecayPlaneError, RuntimeError):
    """A proposal exceeded the accept-reject envelope. Never clipped."""


class EmptyInput(DecayPlaneError, ValueError):
    pass


class DegenerateFit(DecayPlaneError):
    pass
