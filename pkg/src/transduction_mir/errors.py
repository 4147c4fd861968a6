"""Exception types shared across the package."""


class MirError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MirError, ValueError):
    """A constructed object violates its contract."""


class ConfigError(ValidationError):
    """Bad configuration; the message names the offending field."""


class StepTooLarge(MirError):
    """I + Q*dt produced an entry outside [0, 1]; the first-order step is invalid."""


class NotIrreducible(MirError):
    """The positive-rate transition graph has no single recurrent class."""


class OrderTooHigh(MirError):
    """Requested moment or series order exceeds the stability ceiling."""


class NoConvergence(MirError):
    """Quadrature refinement did not stabilize within the doubling budget."""


class DomainError(MirError, ValueError):
    """Scalar argument outside the function's domain."""


class OutOfConvergenceRegion(MirError):
    """Series evaluation requested outside 0 < a and b <= 2."""


class DegenerateArgument(MirError):
    """Remainder function evaluated too close to its expansion point."""


class EndpointSingularity(MirError):
    """Reserved: bound endpoint where x*ln(x) cannot be continuously extended."""


class InsufficientData(MirError):
    """Trajectory too short or inconsistent for the requested estimate."""


class EmptySweep(MirError):
    """No rows to reduce."""
