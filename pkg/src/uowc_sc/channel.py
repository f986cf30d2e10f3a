"""Single-aperture channel: EGG turbulence times zero-boresight pointing loss.

The instantaneous SNR is gamma = gbar (L h_ot h_pe)^2.  Writing y = sqrt(gamma/gbar)
for the normalized amplitude, the CDF is a two-branch Meijer-G mixture

    F(gamma) = w rho^2 G^{2,1}_{2,3}(1, rho^2+1; 1, rho^2, 0 | y / (lam A))
             + (1-w) rho^2 / (c Gamma(a)) G^{2,1}_{2,3}(1, beta+1; a, beta, 0 | (y/(bA))^c)

with beta = rho^2 / c, and the PDF is the matching G^{2,0}_{1,2} mixture.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, OutOfRange
from .mellin import DEFAULT_CONFIG, MeijerGSpec, QuadratureConfig, meijer_g

__all__ = [
    "EggParams",
    "PointingParams",
    "ApertureChannel",
    "TURBULENCE_PRESETS",
    "POINTING_DEFAULT",
    "DEFAULT_PATH_LOSS_DB",
    "branch_specs",
    "snr_pdf",
    "snr_cdf",
    "sample_turbulence",
    "sample_pointing",
    "sample_snr",
    "make_channel",
]

# extinction coefficient (1/m) and link range (m) of the reference setup
ETA, DISTANCE = 0.056, 50.0
DEFAULT_PATH_LOSS_DB = 20.0 * ETA * DISTANCE / math.log(10.0)
CDF_CLAMP = 1e-9
FOLD_MODES = ("amplitude", "snr", "off")


@dataclass(frozen=True)
class EggParams:
    omega: float
    lam: float
    a: float
    b: float
    c: float

    def __post_init__(self):
        if not 0.0 <= self.omega <= 1.0:
            raise ConfigError(f"omega must lie in [0, 1], got {self.omega}")
        for name in ("lam", "a", "b", "c"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise ConfigError(f"{name} must be positive, got {v}")


@dataclass(frozen=True)
class PointingParams:
    a0: float
    rho: float
    path_loss_db: float = DEFAULT_PATH_LOSS_DB

    def __post_init__(self):
        if not 0.0 < self.a0 <= 1.0:
            raise ConfigError(f"a0 must lie in (0, 1], got {self.a0}")
        if not self.rho > 0:
            raise ConfigError(f"rho must be positive, got {self.rho}")
        if not self.path_loss_db >= 0:
            raise ConfigError("path_loss_db must be non-negative")


@dataclass(frozen=True)
class ApertureChannel:
    egg: EggParams
    pointing: PointingParams
    avg_snr_db: float
    # where the deterministic attenuation enters: the amplitude, the SNR, or nowhere
    fold_path_loss: str = "off"

    def __post_init__(self):
        if self.fold_path_loss not in FOLD_MODES:
            raise ConfigError(f"fold_path_loss must be one of {FOLD_MODES}")
        if not math.isfinite(self.avg_snr_db):
            raise ConfigError("avg_snr_db must be finite")

    @property
    def path_gain(self) -> float:
        """Linear amplitude factor L."""
        if self.fold_path_loss == "off":
            return 1.0
        return 10.0 ** (-self.pointing.path_loss_db / 20.0)

    @property
    def effective_a0(self) -> float:
        return self.pointing.a0 * (self.path_gain if self.fold_path_loss == "amplitude" else 1.0)

    @property
    def effective_snr(self) -> float:
        """Linear average SNR with any SNR-side folding applied."""
        g = 10.0 ** (self.avg_snr_db / 10.0)
        return g * (self.path_gain**2 if self.fold_path_loss == "snr" else 1.0)

    def with_snr(self, snr_db: float) -> "ApertureChannel":
        return replace(self, avg_snr_db=float(snr_db))


TURBULENCE_PRESETS = {
    "weak": EggParams(4.0628e-21, 1.0225, 26.0231, 0.6993, 9.5446),
    "moderate-a": EggParams(0.1953, 0.5273, 0.7291, 1.0721, 30.3214),
    "moderate-b": EggParams(0.2109, 0.4603, 0.1520, 1.1501, 41.3258),
    "strong": EggParams(0.5117, 0.1602, 0.0075, 2.9963, 216.8356),
    # fourth column of the non-identical-link study (small a, so a < rho^2/c)
    "inid-varied": EggParams(0.3489, 0.4771, 0.0100, 1.4531, 74.3650),
}
POINTING_DEFAULT = PointingParams(a0=0.1639, rho=0.9875)


def make_channel(preset="strong", snr_db=30.0, a0=None, rho=None, fold_path_loss="off"):
    """Convenience constructor from a named turbulence preset."""
    if isinstance(preset, EggParams):
        egg = preset
    else:
        try:
            egg = TURBULENCE_PRESETS[preset]
        except KeyError:
            raise ConfigError(f"unknown turbulence preset {preset!r}") from None
    pt = PointingParams(
        a0=POINTING_DEFAULT.a0 if a0 is None else a0,
        rho=POINTING_DEFAULT.rho if rho is None else rho,
    )
    return ApertureChannel(egg, pt, float(snr_db), fold_path_loss)


# ---------------------------------------------------------------------------
# analytic distribution


@dataclass(frozen=True)
class Branch:
    """One mixture branch: weight * G(spec | (y * scale)^power)."""

    weight: float
    power: float  # Meijer-G argument is (scale * y)^power
    scale: float
    cdf_spec: MeijerGSpec
    pdf_spec: MeijerGSpec
    pdf_factor: float  # d log x / d log gamma


def branch_specs(ch: ApertureChannel) -> list[Branch]:
    """Mixture branches with non-zero weight (exponential first, then GG)."""
    egg, r2 = ch.egg, ch.pointing.rho**2
    A = ch.effective_a0
    out = []
    if egg.omega > 0.0:
        out.append(
            Branch(
                weight=egg.omega * r2,
                power=1.0,
                scale=1.0 / (egg.lam * A),
                cdf_spec=MeijerGSpec(2, 1, (1.0, r2 + 1.0), (1.0, r2, 0.0)),
                pdf_spec=MeijerGSpec(2, 0, (r2 + 1.0,), (1.0, r2)),
                pdf_factor=0.5,
            )
        )
    if egg.omega < 1.0:
        beta = r2 / egg.c
        out.append(
            Branch(
                weight=math.exp(math.log1p(-egg.omega) + math.log(r2) - math.log(egg.c) - math.lgamma(egg.a)),
                power=egg.c,
                scale=1.0 / (egg.b * A),
                cdf_spec=MeijerGSpec(2, 1, (1.0, beta + 1.0), (egg.a, beta, 0.0)),
                pdf_spec=MeijerGSpec(2, 0, (beta + 1.0,), (egg.a, beta)),
                pdf_factor=0.5 * egg.c,
            )
        )
    return out


def _branch_log_args(br: Branch, y):
    # log (scale * y)^power; kept in logs because power can exceed 200
    return br.power * (math.log(br.scale) + np.log(y))


def _normalized_amplitude(ch, gamma):
    g = np.asarray(gamma, dtype=float)
    if np.any(g <= 0):
        raise ValueError("gamma must be positive")
    return g, np.sqrt(g / ch.effective_snr)


def branch_cdf_values(ch: ApertureChannel, gamma, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Per-branch weighted CDF contributions, shape (n_branches, *gamma.shape)."""
    g, y = _normalized_amplitude(ch, gamma)
    vals = []
    for br in branch_specs(ch):
        lx = _branch_log_args(br, y)
        vals.append(br.weight * np.asarray(meijer_g(br.cdf_spec, cfg=cfg, log_x=lx)))
    return np.array(vals).reshape((len(vals),) + g.shape)


def snr_cdf(ch: ApertureChannel, gamma, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Per-aperture SNR CDF; scalar in, scalar out."""
    g = np.asarray(gamma, dtype=float)
    v = branch_cdf_values(ch, g, cfg).sum(axis=0)
    if np.any((v < -CDF_CLAMP) | (v > 1.0 + CDF_CLAMP)):
        raise OutOfRange(f"CDF value outside [0, 1]: {v[(v < -CDF_CLAMP) | (v > 1 + CDF_CLAMP)][:3]}")
    v = np.clip(v, 0.0, 1.0)
    return float(v) if g.ndim == 0 else v


def snr_pdf(ch: ApertureChannel, gamma, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Per-aperture SNR density."""
    g, y = _normalized_amplitude(ch, gamma)
    total = np.zeros(g.shape)
    for br in branch_specs(ch):
        lx = _branch_log_args(br, y)
        total = total + br.weight * br.pdf_factor * np.asarray(meijer_g(br.pdf_spec, cfg=cfg, log_x=lx)) / g
    # quadrature residue can leave tiny negatives deep in the tails
    total = np.maximum(total, 0.0)
    return float(total) if g.ndim == 0 else total


# ---------------------------------------------------------------------------
# sampling


def sample_turbulence(egg: EggParams, rng: np.random.Generator, size=None):
    """EGG draw: Exponential(lam) with probability omega, else b * Gamma(a)^(1/c)."""
    u = rng.random(size)
    expo = rng.exponential(egg.lam, size)
    # Gamma(a) for tiny a underflows to 0; draw its log instead
    log_g = _log_gamma_variate(egg.a, rng, size)
    gg = egg.b * np.exp(log_g / egg.c)
    # comparing to omega directly keeps a subnormal weight meaningful
    out = np.where(u < egg.omega, expo, gg)
    return float(out) if size is None else out


def _log_gamma_variate(a, rng, size):
    """log of a Gamma(a, 1) variate, stable for a << 1 via G(a) = G(a+1) U^(1/a)."""
    if a >= 1.0:
        return np.log(rng.standard_gamma(a, size))
    g1 = rng.standard_gamma(a + 1.0, size)
    u = rng.random(size)
    return np.log(g1) + np.log(u) / a


def sample_pointing(pt: PointingParams, rng: np.random.Generator, size=None, a0=None):
    """A * U^(1/rho^2): density rho^2 h^(rho^2-1) / A^(rho^2) on (0, A]."""
    A = pt.a0 if a0 is None else a0
    u = 1.0 - rng.random(size)  # (0, 1]
    out = A * u ** (1.0 / pt.rho**2)
    return float(out) if size is None else out


def sample_snr(ch: ApertureChannel, rng: np.random.Generator, size=None):
    """gbar (L h_ot h_pe)^2 with the channel's path-loss folding."""
    h_ot = sample_turbulence(ch.egg, rng, size)
    h_pe = sample_pointing(ch.pointing, rng, size, a0=ch.effective_a0)
    return ch.effective_snr * (h_ot * h_pe) ** 2
