"""Independent reference engines: direct quadrature over gamma and Monte Carlo.

Quadrature works in u = ln(gamma), split at ln(gbar), with adaptive
Gauss-Legendre panels.  Monte Carlo draws in
fixed-size blocks; block b uses its own Philox stream spawned from the master
seed, and block sums are combined in block order, so the estimate is
identical for any number of workers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import special

from .diversity import ApertureArray, sample_sc_snr, sc_cdf, sc_pdf
from .errors import ConfigError, NonConvergence
from .mellin import DEFAULT_CONFIG, QuadratureConfig

__all__ = [
    "McConfig",
    "CiResult",
    "ber_quadrature",
    "capacity_quadrature",
    "ber_monte_carlo",
    "capacity_monte_carlo",
    "empirical_cdf_check",
    "conditional_ber",
    "integrate_log_domain",
]

BLOCK = 1 << 16


@dataclass(frozen=True)
class McConfig:
    samples: int = 10_000_000
    master_seed: int = 20240607
    workers: int = 1

    def __post_init__(self):
        if self.samples < 1 or self.workers < 1:
            raise ConfigError("samples and workers must be positive")
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("master_seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class CiResult:
    estimate: float
    std_error: float
    samples_used: int


def conditional_ber(gamma, p: float, q: float):
    """Gamma(p, q gamma) / (2 Gamma(p)): the BER given the instantaneous SNR."""
    return 0.5 * special.gammaincc(p, q * np.asarray(gamma, dtype=float))


# ---------------------------------------------------------------------------
# quadrature


def integrate_log_domain(fn, lo: float, hi: float, splits=(), rel_tol=1e-6, abs_tol=0.0, max_rounds=40):
    """int_lo^hi fn(u) du by adaptive 16-point Gauss-Legendre panels.

    ``fn`` takes a 1-D array of u values and is called once per round with
    every pending panel batched together.  A panel is accepted when its
    one-panel and two-half-panel values agree to its share of the tolerance;
    otherwise its halves become new panels.  Panel edges always include the
    points in ``splits`` that fall inside (lo, hi).
    """
    x, w = np.polynomial.legendre.leggauss(16)
    cuts = np.unique(np.concatenate([[lo, hi], [s for s in splits if lo < s < hi]]))
    edges = np.concatenate([np.linspace(a, b, 9)[:-1] for a, b in zip(cuts[:-1], cuts[1:])] + [[hi]])
    width = hi - lo

    def gl(a, b):
        half = 0.5 * (b - a)
        u = (0.5 * (a + b))[:, None] + half[:, None] * x[None, :]
        f = np.asarray(fn(u.ravel()), dtype=float).reshape(u.shape)
        return half * (f @ w)

    a, b = edges[:-1], edges[1:]
    whole = gl(a, b)
    done = []
    for _ in range(max_rounds):
        mid = 0.5 * (a + b)
        left, right = gl(np.concatenate([a, mid]), np.concatenate([mid, b])).reshape(2, -1)
        halves = left + right
        est = math.fsum(done) + math.fsum(halves)
        tol = max(rel_tol * abs(est), abs_tol)
        ok = np.abs(halves - whole) <= tol * (b - a) / width
        done.extend(halves[ok])
        if ok.all():
            return math.fsum(done)
        keep = ~ok
        a, b = np.concatenate([a[keep], mid[keep]]), np.concatenate([mid[keep], b[keep]])
        whole = np.concatenate([left[keep], right[keep]])
    raise NonConvergence(f"log-domain quadrature did not converge (last value {est:.6e})")


def _snr_window(arr: ApertureArray):
    gbar = max(ch.effective_snr for ch in arr.channels)
    gmin = min(ch.effective_snr for ch in arr.channels)
    return math.log(gbar), math.log(gmin)


def ber_quadrature(arr: ApertureArray, mod, cfg: QuadratureConfig = DEFAULT_CONFIG, rel_tol=1e-6, cdf=None):
    """(q^p / 2 Gamma(p)) int exp(-q g) g^(p-1) F_SC(g) dg, with g = e^u.

    ``cdf`` overrides the SC CDF (a callable of gamma); used for harness checks.
    """
    p, q = mod.p, mod.q
    F = (lambda g: sc_cdf(arr, g, cfg)) if cdf is None else cdf
    log_pref = p * math.log(q) - math.log(2.0) - math.lgamma(p)

    def integrand(u):
        g = np.exp(u)
        return np.exp(log_pref + p * u - q * g) * F(g)

    ln_gbar, ln_gmin = _snr_window(arr)
    # e^{-q g} kills the integrand beyond q g = 60; below, g^p F(g) <= g^p
    hi = math.log(60.0 / q)
    lo = min(hi - 1.0, (math.log(1e-16) - log_pref) / p)
    return integrate_log_domain(integrand, lo, hi, splits=(ln_gbar, ln_gmin, 0.0), rel_tol=rel_tol)


def capacity_quadrature(arr: ApertureArray, cfg: QuadratureConfig = DEFAULT_CONFIG, rel_tol=1e-6, pdf=None):
    """int log2(1 + g) f_SC(g) dg in u = ln g (bits/s/Hz)."""
    f = (lambda g: sc_pdf(arr, g, cfg)) if pdf is None else pdf

    def integrand(u):
        g = np.exp(u)
        return np.log1p(g) / math.log(2.0) * f(g) * g

    ln_gbar, ln_gmin = _snr_window(arr)
    lo, hi = _trim_window(integrand, ln_gmin - 80.0, ln_gbar + 30.0)
    return integrate_log_domain(integrand, lo, hi, splits=(ln_gbar, ln_gmin, 0.0), rel_tol=rel_tol)


def _trim_window(fn, lo, hi, step=0.5, floor=1e-20):
    """Shrink [lo, hi] to where fn exceeds floor * max(fn) on a coarse grid.

    The integrands here are unimodal in u with tails that decay at least
    geometrically, so the discarded mass is of order floor times the peak.
    """
    u = np.arange(lo, hi + step, step)
    f = np.abs(np.asarray(fn(u), dtype=float))
    big = np.nonzero(f > floor * f.max())[0]
    if big.size == 0:
        return lo, hi
    return float(u[max(big[0] - 2, 0)]), float(u[min(big[-1] + 2, u.size - 1)])


# ---------------------------------------------------------------------------
# Monte Carlo


def _block_rng(master_seed: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(master_seed, spawn_key=(block,))
    return np.random.Generator(np.random.Philox(ss))


def _block_stats(arr, mc, kernel, block):
    n = min(BLOCK, mc.samples - block * BLOCK)
    vals = kernel(sample_sc_snr(arr, _block_rng(mc.master_seed, block), size=n))
    return math.fsum(vals), math.fsum(vals * vals), n


def _monte_carlo(arr: ApertureArray, mc: McConfig, kernel) -> CiResult:
    nblocks = -(-mc.samples // BLOCK)
    if mc.workers == 1:
        stats = [_block_stats(arr, mc, kernel, b) for b in range(nblocks)]
    else:
        with ThreadPoolExecutor(max_workers=mc.workers) as pool:
            stats = list(pool.map(lambda b: _block_stats(arr, mc, kernel, b), range(nblocks)))
    s1 = math.fsum(s[0] for s in stats)
    s2 = math.fsum(s[1] for s in stats)
    n = sum(s[2] for s in stats)
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return CiResult(mean, math.sqrt(var / n), n)


def ber_monte_carlo(arr: ApertureArray, mod, mc: McConfig = McConfig()) -> CiResult:
    """Mean of the conditional BER over SC-output draws."""
    return _monte_carlo(arr, mc, lambda g: conditional_ber(g, mod.p, mod.q))


def capacity_monte_carlo(arr: ApertureArray, mc: McConfig = McConfig()) -> CiResult:
    """Mean of log2(1 + gamma) over SC-output draws."""
    return _monte_carlo(arr, mc, lambda g: np.log1p(g) / math.log(2.0))


def empirical_cdf_check(arr: ApertureArray, mc: McConfig = McConfig(), grid=None, cfg=DEFAULT_CONFIG):
    """Largest deviation between the empirical SC CDF and sc_cdf on a grid.

    Returns a dict with the grid, both CDFs, per-point standard errors, the
    maximum deviation measured in standard errors and a pass flag (every point
    within 3 standard errors).
    """
    if grid is None:
        # 50 points spanning the bulk of the analytic distribution
        ln_gbar, _ = _snr_window(arr)
        grid = np.exp(np.linspace(ln_gbar - 14.0, ln_gbar + 4.0, 50))
    grid = np.sort(np.asarray(grid, dtype=float))
    counts = np.zeros(grid.size)
    nblocks = -(-mc.samples // BLOCK)
    total = 0
    for b in range(nblocks):
        n = min(BLOCK, mc.samples - b * BLOCK)
        g = np.sort(sample_sc_snr(arr, _block_rng(mc.master_seed, b), size=n))
        counts += np.searchsorted(g, grid, side="right")
        total += n
    emp = counts / total
    ana = np.asarray(sc_cdf(arr, grid, cfg))
    se = np.sqrt(np.maximum(ana * (1.0 - ana), 1.0 / total) / total)
    z = np.abs(emp - ana) / se
    return {
        "grid": grid,
        "empirical": emp,
        "analytic": ana,
        "std_error": se,
        "max_deviation": float(np.max(np.abs(emp - ana))),
        "max_z": float(np.max(z)),
        "passed": bool(np.all(z <= 3.0)),
    }
