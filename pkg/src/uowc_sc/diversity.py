"""Selection combining over N apertures: SC-output CDF/PDF, subset expansion, sampling."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ApertureChannel, branch_cdf_values, sample_snr, snr_cdf, snr_pdf
from .errors import ConfigError, SizeLimit
from .mellin import DEFAULT_CONFIG, QuadratureConfig

__all__ = [
    "ApertureArray",
    "SubsetTerm",
    "sc_cdf",
    "sc_pdf",
    "expand_product_of_sums",
    "subset_term_values",
    "sample_sc_snr",
    "MAX_SUBSET_APERTURES",
]

MAX_SUBSET_APERTURES = 10


@dataclass(frozen=True)
class ApertureArray:
    channels: tuple[ApertureChannel, ...]
    iid: bool = False

    def __post_init__(self):
        chans = tuple(self.channels)
        object.__setattr__(self, "channels", chans)
        if not chans:
            raise ConfigError("an aperture array needs at least one channel")
        if self.iid and any(ch != chans[0] for ch in chans[1:]):
            raise ConfigError("iid array with non-identical channels")

    @classmethod
    def identical(cls, channel: ApertureChannel, n: int) -> "ApertureArray":
        if n < 1:
            raise ConfigError("N must be at least 1")
        return cls((channel,) * n, iid=True)

    @property
    def n(self) -> int:
        return len(self.channels)

    def with_snr(self, snr_db: float) -> "ApertureArray":
        return ApertureArray(tuple(ch.with_snr(snr_db) for ch in self.channels), self.iid)


@dataclass(frozen=True)
class SubsetTerm:
    """One product term: apertures in S take the exponential branch, S^c the GG branch."""

    subset: frozenset
    complement: frozenset
    branches: tuple[str, ...]  # per aperture (0-based order): "exp" or "gg"

    def __post_init__(self):
        if self.subset & self.complement:
            raise ValueError("S and its complement overlap")


def sc_cdf(arr: ApertureArray, gamma, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """P(max_i gamma_i <= gamma)."""
    g = np.asarray(gamma, dtype=float)
    if arr.iid:
        out = np.asarray(snr_cdf(arr.channels[0], g, cfg)) ** arr.n
    else:
        out = np.ones(g.shape)
        cache = {}
        for ch in arr.channels:
            if ch not in cache:
                cache[ch] = np.asarray(snr_cdf(ch, g, cfg))
            out = out * cache[ch]
    return float(out) if g.ndim == 0 else out


def sc_pdf(arr: ApertureArray, gamma, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Density of the SC output: sum_j f_j prod_{i != j} F_i."""
    g = np.asarray(gamma, dtype=float)
    if arr.iid:
        ch = arr.channels[0]
        F = np.asarray(snr_cdf(ch, g, cfg))
        out = arr.n * F ** (arr.n - 1) * np.asarray(snr_pdf(ch, g, cfg))
    else:
        cdfs, pdfs = {}, {}
        for ch in arr.channels:
            if ch not in cdfs:
                cdfs[ch] = np.asarray(snr_cdf(ch, g, cfg))
                pdfs[ch] = np.asarray(snr_pdf(ch, g, cfg))
        out = np.zeros(g.shape)
        for j, chj in enumerate(arr.channels):
            term = pdfs[chj].copy()
            for i, chi in enumerate(arr.channels):
                if i != j:
                    term = term * cdfs[chi]
            out = out + term
    return float(out) if g.ndim == 0 else out


def expand_product_of_sums(arr: ApertureArray, cap: int = MAX_SUBSET_APERTURES) -> list[SubsetTerm]:
    """All 2^N subset terms of prod_i (g_i + g_i'), ordered by bitmask.

    Bit i of the mask set means aperture i sits in S (exponential branch).
    """
    n = arr.n
    if n > cap:
        raise SizeLimit(f"subset expansion over {n} apertures exceeds the cap of {cap}")
    terms = []
    for mask in range(2**n):
        s = frozenset(i for i in range(n) if mask >> i & 1)
        sc = frozenset(range(n)) - s
        branches = tuple("exp" if i in s else "gg" for i in range(n))
        terms.append(SubsetTerm(s, sc, branches))
    return terms


def subset_term_values(arr: ApertureArray, gamma, cfg: QuadratureConfig = DEFAULT_CONFIG):
    """Numerical value of every subset term at gamma (same order as the expansion)."""
    g = np.asarray(gamma, dtype=float)
    per = []
    for ch in arr.channels:
        vals = branch_cdf_values(ch, g, cfg)
        # branch_cdf_values drops zero-weight branches; restore both slots
        exp_part = vals[0] if ch.egg.omega > 0 else np.zeros(g.shape)
        gg_part = vals[-1] if ch.egg.omega < 1 else np.zeros(g.shape)
        per.append({"exp": exp_part, "gg": gg_part})
    out = []
    for term in expand_product_of_sums(arr):
        v = np.ones(g.shape)
        for i, br in enumerate(term.branches):
            v = v * per[i][br]
        out.append(v)
    return out


def sample_sc_snr(arr: ApertureArray, rng: np.random.Generator, size=None):
    """max_i gamma_i over independent per-aperture draws."""
    draws = [np.asarray(sample_snr(ch, rng, size)) for ch in arr.channels]
    out = np.max(np.stack(draws), axis=0)
    return float(out) if size is None else out
