"""BER and ergodic capacity of selection-combining multi-aperture underwater
optical links over mixture exponential-generalized Gamma turbulence with
pointing errors, via univariate and multivariate Fox-H functions."""

from .channel import TURBULENCE_PRESETS, ApertureChannel, EggParams, PointingParams, make_channel, snr_cdf, snr_pdf
from .diversity import ApertureArray, sc_cdf, sc_pdf
from .errors import (
    ConfigError,
    ContourInfeasible,
    DimensionTooHigh,
    NonConvergence,
    PoleError,
    PreconditionViolation,
    SizeLimit,
    TieWarning,
    UowcError,
)
from .mellin import FoxHSpec, MeijerGSpec, MultiFoxHSpec, QuadratureConfig, fox_h, meijer_g, multivariate_fox_h
from .metrics import (
    MODULATION_PRESETS,
    AsymptoticResult,
    ModulationParams,
    ber_asymptotic,
    ber_iid_approx,
    ber_iid_exact,
    ber_inid_exact,
    ber_omega0,
    ber_omega0_asymptotic,
    capacity_iid_approx_omega0,
    capacity_iid_exact_omega0,
    capacity_inid_exact,
    diversity_order,
)
from .oracle import McConfig, ber_monte_carlo, ber_quadrature, capacity_monte_carlo, capacity_quadrature

__version__ = "0.1.0"
