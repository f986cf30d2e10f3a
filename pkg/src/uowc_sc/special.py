"""Thin wrappers over scipy.special with the pole policy used by the integrands."""
import numpy as np
from scipy import special as _sp

from .errors import PoleError

POLE_TOL = 1e-12


def loggamma(z):
    """Principal-branch log Gamma(z) for complex (or real) input.

    Raises PoleError when any z lies within 1e-12 of a non-positive integer.
    """
    z = np.asarray(z, dtype=complex)
    re = z.real
    rr = np.round(re)
    if np.any((rr <= 0) & (np.abs(re - rr) < POLE_TOL) & (np.abs(z.imag) < POLE_TOL)):
        raise PoleError("loggamma evaluated at a pole (non-positive integer)")
    return _sp.loggamma(z)


def gammaincc(p, x):
    """Regularized upper incomplete Gamma Q(p, x) = Gamma(p, x) / Gamma(p)."""
    if p <= 0:
        raise ValueError("p must be positive")
    return _sp.gammaincc(p, x)
