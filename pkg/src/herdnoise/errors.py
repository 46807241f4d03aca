"""Exception types shared across the package."""


class HerdnoiseError(Exception):
    """Base class for package-specific errors."""


class DomainError(HerdnoiseError, ValueError):
    """Input outside the mathematical domain of an operation."""


class StepTooLarge(HerdnoiseError):
    """Time step too large: total move probability would exceed one."""


class NonFinite(HerdnoiseError):
    """A numerical evaluation overflowed or produced NaN."""


class DegenerateExponent(HerdnoiseError):
    """Exponent relation undefined for the given parameters."""


class EmptyRange(HerdnoiseError):
    """No samples fall inside the requested range."""


class InsufficientPoints(HerdnoiseError):
    """Too few usable points for a stable fit."""


class TooShort(HerdnoiseError):
    """Series too short for the requested analysis."""


class ConfigError(HerdnoiseError):
    """Invalid experiment configuration; the message names the field."""


class StepFloorWarning(UserWarning):
    """The integrator hit its minimum step size unusually often (stiff run)."""
