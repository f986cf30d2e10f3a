"""Exception and warning types shared across the package."""


class UowcError(Exception):
    """Base class for library errors."""


class PoleError(UowcError, ValueError):
    """A Gamma function was evaluated at (or within 1e-12 of) a pole."""


class ContourInfeasible(UowcError):
    """No vertical contour separates the two pole families."""


class NonConvergence(UowcError):
    """Quadrature did not reach the requested tolerance."""


class DimensionTooHigh(UowcError):
    """Multivariate evaluation requested above the configured dimension cap."""


class SizeLimit(UowcError):
    """Subset expansion would exceed the configured aperture cap."""


class OutOfRange(UowcError):
    """A computed probability fell outside [0, 1] by more than the clamp tolerance."""


class PreconditionViolation(UowcError):
    """Inputs do not satisfy an operation's precondition (e.g. omega != 0)."""


class ConfigError(UowcError):
    """Invalid configuration file or parameter set."""


class TieWarning(UserWarning):
    """Two competing diversity exponents coincide; the residue asymptote degenerates."""
