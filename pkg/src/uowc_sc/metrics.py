"""Average BER and ergodic capacity of SC apertures as multivariate Fox-H values.

Everything is written in the amplitude-exponent variable u of each aperture
branch, so that a branch CDF reads

    F_branch(gamma) = K' * (1 / 2 pi i) int F_b(u) (V sqrt(gamma))^(-u) du

with K' = w rho^2 (exponential branch) or (1-w) rho^2 / Gamma(a) (GG
branch, whose Gamma(a + u/c) carries the 1/c exponent).  Averaging a product
of such CDFs against a kernel in gamma leaves one Gamma-function factor that
couples the u variables; that factor is supplied by :class:`KernelTransform`.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
import numpy as np

from .channel import ApertureChannel, branch_cdf_values
from .diversity import ApertureArray, expand_product_of_sums
from .errors import ConfigError, PreconditionViolation, TieWarning
from .mellin import (
    FoxHSpec,
    MultiFoxHSpec,
    QuadratureConfig,
    _pole_expansion,
    fox_h,
    multivariate_fox_h,
)

__all__ = [
    "ModulationParams",
    "MODULATION_PRESETS",
    "AsymptoticResult",
    "KernelTransform",
    "METRICS_CONFIG",
    "ber_inid_exact",
    "ber_iid_exact",
    "ber_iid_approx",
    "ber_asymptotic",
    "ber_omega0",
    "ber_omega0_asymptotic",
    "capacity_inid_exact",
    "capacity_iid_exact_omega0",
    "capacity_iid_approx_omega0",
    "diversity_order",
]

# closed forms only need to beat the 1e-3 agreement targets by a margin
METRICS_CONFIG = QuadratureConfig(rel_tol=1e-6)
# a term whose a-priori bound is below this fraction of the running sum is dropped
_SKIP = 1e-9
TIE_TOL = 1e-9
LN2 = math.log(2.0)


@dataclass(frozen=True)
class ModulationParams:
    """Kernel Gamma(p, q gamma) / (2 Gamma(p)) of the conditional BER."""

    p: float
    q: float

    def __post_init__(self):
        if not (self.p > 0 and self.q > 0 and math.isfinite(self.p) and math.isfinite(self.q)):
            raise ConfigError(f"modulation needs p, q > 0, got ({self.p}, {self.q})")


MODULATION_PRESETS = {
    # coherent BPSK: Q(sqrt(2 gamma)) = Gamma(1/2, gamma) / (2 Gamma(1/2))
    "bpsk": ModulationParams(0.5, 1.0),
    # non-coherent DPSK: exp(-gamma) / 2
    "dpsk": ModulationParams(1.0, 1.0),
}


def modulation(name_or_params) -> ModulationParams:
    if isinstance(name_or_params, ModulationParams):
        return name_or_params
    try:
        return MODULATION_PRESETS[name_or_params]
    except KeyError:
        raise ConfigError(f"unknown modulation preset {name_or_params!r}") from None


@dataclass(frozen=True)
class AsymptoticResult:
    """High-SNR behaviour BER ~ G_c * gbar^(-G_d).

    ``terms`` holds every (coefficient, exponent) pair of the leading-residue
    expansion; calling the result sums all of them at the given SNR in dB.
    """

    coding_gain: float
    diversity_order: float
    terms: tuple = ()

    def __post_init__(self):
        if not self.diversity_order > 0:
            raise ValueError("diversity order must be positive")

    def __call__(self, snr_db):
        g = 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)
        if not self.terms:
            out = self.coding_gain * g ** (-self.diversity_order)
        else:
            out = sum(c * g ** (-e) for c, e in self.terms)
        return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class KernelTransform:
    """Inner gamma-integral of a metric, mapped to Gamma factors.

    ``ber_kernel``: int e^{-q g} g^{p-1} g^{-z} dg = Gamma(p - z) q^{z-p}.
    ``capacity_kernel``: the pdf moment E[g^w] of an aperture branch, see
    :func:`_pdf_moment_blocks`.
    """

    tag: str
    parameters: ModulationParams | None = None

    def __post_init__(self):
        if self.tag not in ("ber_kernel", "capacity_kernel"):
            raise ConfigError(f"unknown kernel {self.tag!r}")
        if self.tag == "ber_kernel" and self.parameters is None:
            raise ConfigError("ber_kernel needs modulation parameters")

    def ber_blocks(self, half_weights):
        """Outer Gamma block and argument rescaling for g^{-sum w_l u_l}.

        Returns (outer_upper, per-variable factor on the arguments, log of the
        constant prefactor).
        """
        p, q = self.parameters.p, self.parameters.q
        ws = tuple(-w for w in half_weights)
        scale = [q**-w for w in half_weights]
        # q^p from the BER kernel cancels q^-p of the Gamma integral
        return ((p, ws),), scale, 0.0


# ---------------------------------------------------------------------------
# branch descriptions in u-form


@dataclass(frozen=True)
class _CdfDim:
    fox: FoxHSpec
    log_weight: float  # log K'
    V: float  # argument is V sqrt(gamma)
    mass: float  # branch probability w or 1 - w


def _cdf_dim(ch: ApertureChannel, branch: str) -> _CdfDim:
    egg, r2 = ch.egg, ch.pointing.rho**2
    A, g = ch.effective_a0, ch.effective_snr
    upper = ((1.0, 1.0), (r2 + 1.0, 1.0))
    if branch == "exp":
        fox = FoxHSpec(2, 1, upper, ((1.0, 1.0), (r2, 1.0), (0.0, 1.0)))
        return _CdfDim(fox, math.log(egg.omega) + math.log(r2), 1.0 / (egg.lam * A * math.sqrt(g)), egg.omega)
    fox = FoxHSpec(2, 1, upper, ((egg.a, 1.0 / egg.c), (r2, 1.0), (0.0, 1.0)))
    logw = math.log1p(-egg.omega) + math.log(r2) - math.lgamma(egg.a)
    return _CdfDim(fox, logw, 1.0 / (egg.b * A * math.sqrt(g)), 1.0 - egg.omega)


def _branches(ch: ApertureChannel):
    out = []
    if ch.egg.omega > 0.0:
        out.append("exp")
    if ch.egg.omega < 1.0:
        out.append("gg")
    return out


def _check_config(cfg):
    if not isinstance(cfg, QuadratureConfig):
        raise ConfigError("cfg must be a QuadratureConfig")


# ---------------------------------------------------------------------------
# average BER


def _ber_term(dims: list[_CdfDim], mult, mod: ModulationParams, cfg: QuadratureConfig) -> float:
    """(1 / 2 Gamma(p)) prod K' * H[...] for CDF branches with multiplicities.

    A multiplicity n > 1 enters through the weight n/2 on the variable (the
    equal-contour approximation); exact terms use n = 1 throughout.
    """
    kern = KernelTransform("ber_kernel", mod)
    outer, scale, log_c = kern.ber_blocks([0.5 * n for n in mult])
    spec = MultiFoxHSpec(
        per_dim=tuple(d.fox for d in dims),
        args=tuple(d.V * s for d, s in zip(dims, scale)),
        outer_upper=outer,
    )
    log_pref = sum(d.log_weight for d in dims) + log_c - math.log(2.0) - math.lgamma(mod.p)
    return math.exp(log_pref) * multivariate_fox_h(spec, cfg)


def _sum_terms(terms, evaluate):
    """Sum bound-ordered terms, dropping those that cannot matter.

    ``terms`` is a list of (bound, count, key); ``evaluate(key)`` returns the
    term value.  Terms are evaluated from the largest bound down.
    """
    parts = []
    for bound, count, key in sorted(terms, key=lambda t: -t[0]):
        if parts and bound * count <= _SKIP * abs(math.fsum(parts)):
            continue
        parts.append(count * evaluate(key))
    return math.fsum(parts)


def _subset_key(arr: ApertureArray, branches):
    # identical (channel, branch) dims are interchangeable, so sort them
    return tuple(sorted(((ch, br) for ch, br in zip(arr.channels, branches)), key=repr))


def ber_inid_exact(arr: ApertureArray, mod, cfg: QuadratureConfig = METRICS_CONFIG) -> float:
    """Exact average BER over all 2^N subset terms (one M = N Fox-H each)."""
    mod = modulation(mod)
    _check_config(cfg)
    counts: dict = {}
    bounds: dict = {}
    for term in expand_product_of_sums(arr):
        if any(br not in _branches(ch) for ch, br in zip(arr.channels, term.branches)):
            continue
        key = _subset_key(arr, term.branches)
        counts[key] = counts.get(key, 0) + 1
        bounds[key] = 0.5 * math.prod(_cdf_dim(ch, br).mass for ch, br in key)

    def evaluate(key):
        dims = [_cdf_dim(ch, br) for ch, br in key]
        return _ber_term(dims, [1] * len(dims), mod, cfg)

    return _sum_terms([(bounds[k], counts[k], k) for k in counts], evaluate)


def _require_iid(arr: ApertureArray):
    if not arr.iid and any(ch != arr.channels[0] for ch in arr.channels):
        raise PreconditionViolation("this expression needs identical apertures")


def ber_iid_exact(arr: ApertureArray, mod, cfg: QuadratureConfig = METRICS_CONFIG) -> float:
    """Exact i.i.d. BER: binomial sum over k GG-branch apertures."""
    mod = modulation(mod)
    _require_iid(arr)
    ch, N = arr.channels[0], arr.n
    terms = []
    for k in range(N + 1):
        brs = ["exp"] * (N - k) + ["gg"] * k
        if any(br not in _branches(ch) for br in brs):
            continue
        bound = 0.5 * math.prod(_cdf_dim(ch, br).mass for br in brs)
        terms.append((bound, math.comb(N, k), k))

    def evaluate(k):
        dims = [_cdf_dim(ch, br) for br in ("exp", "gg") for _ in range(N - k if br == "exp" else k)]
        return _ber_term(dims, [1] * N, mod, cfg)

    return _sum_terms(terms, evaluate)


def _branch_cdf_at_one(ch: ApertureChannel, branch: str, cfg) -> float:
    """Weighted branch CDF K' H(V): the Meijer-G factor evaluated at gamma = 1."""
    vals = branch_cdf_values(ch, 1.0, cfg)
    idx = _branches(ch).index(branch)
    return float(vals[idx])


def ber_iid_approx(arr: ApertureArray, mod, cfg: QuadratureConfig = METRICS_CONFIG) -> float:
    """Equal-contour approximation: at most a bivariate Fox-H per binomial term.

    All N-k exponential copies share one contour variable (weight (N-k)/2 in
    the coupling Gamma) and all k GG copies share another; the remaining
    copies of each group contribute their Meijer-G value at gamma = 1.
    """
    mod = modulation(mod)
    _require_iid(arr)
    ch, N = arr.channels[0], arr.n
    terms = []
    for k in range(N + 1):
        groups = [(br, n) for br, n in (("exp", N - k), ("gg", k)) if n > 0]
        if any(br not in _branches(ch) for br, _ in groups):
            continue
        bound = 0.5 * math.prod(_cdf_dim(ch, br).mass ** n for br, n in groups)
        terms.append((bound, math.comb(N, k), tuple(groups)))

    def evaluate(groups):
        dims = [_cdf_dim(ch, br) for br, _ in groups]
        mult = [n for _, n in groups]
        core = _ber_term(dims, mult, mod, cfg)
        rest = math.prod(_branch_cdf_at_one(ch, br, cfg) ** (n - 1) for br, n in groups)
        return core * rest

    return _sum_terms(terms, evaluate)


def _require_omega0(arr: ApertureArray):
    if any(ch.egg.omega != 0.0 for ch in arr.channels):
        raise PreconditionViolation("this expression needs omega = 0 on every aperture")


def _omega0_spec(ch: ApertureChannel, N: int, p: float) -> FoxHSpec:
    """H^{2,2}_{3,3} in the GG amplitude exponent s (argument (V q^{-N/2})^c)."""
    egg, r2 = ch.egg, ch.pointing.rho**2
    beta = r2 / egg.c
    return FoxHSpec(
        2,
        2,
        ((1.0, 1.0), (1.0 - p, N * egg.c / 2.0), (beta + 1.0, 1.0)),
        ((egg.a, 1.0), (beta, 1.0), (0.0, 1.0)),
    )


def ber_omega0(arr: ApertureArray, mod, cfg: QuadratureConfig = METRICS_CONFIG) -> float:
    """Single-variate Fox-H BER for omega = 0 (GG turbulence with pointing)."""
    mod = modulation(mod)
    _require_iid(arr)
    _require_omega0(arr)
    ch, N = arr.channels[0], arr.n
    egg, r2 = ch.egg, ch.pointing.rho**2
    V = 1.0 / (egg.b * ch.effective_a0 * math.sqrt(ch.effective_snr))
    log_x = egg.c * (math.log(V) - 0.5 * N * math.log(mod.q))
    core = fox_h(_omega0_spec(ch, N, mod.p), cfg=cfg, log_x=log_x)
    # the N-1 weighted Meijer-G copies carry their own branch weight
    log_pref = math.log(r2) - math.log(egg.c) - math.lgamma(egg.a) - math.log(2.0) - math.lgamma(mod.p)
    rest = _branch_cdf_at_one(ch, "gg", cfg) ** (N - 1)
    return math.exp(log_pref) * core * rest


# ---------------------------------------------------------------------------
# asymptotics


# poles within this distance of the leading one also enter the evaluator
_POLE_WINDOW = 0.5
_POLES_PER_DIM = 3


def _near_poles(fox: FoxHSpec):
    """[(p, residue)] for the left poles -p nearest to the contour.

    The leading pole comes first; neighbours within _POLE_WINDOW are kept
    because near-coincident poles carry large residues of opposite sign.
    Returns None when the two nearest poles coincide (the expansion then
    needs a logarithmic term).
    """
    exp_ = _pole_expansion(fox, -1)
    if exp_ is None:
        return None
    locs, logres, _, _ = exp_
    out = []
    for loc, lr in zip(locs[:_POLES_PER_DIM], logres):
        if loc < locs[0] - _POLE_WINDOW:
            break
        out.append((-float(loc), float(np.exp(lr).real)))
    if len(out) >= 2 and out[1][0] - out[0][0] <= TIE_TOL * max(1.0, out[0][0]):
        return None
    return out


def _min_args(ch: ApertureChannel):
    egg, r2 = ch.egg, ch.pointing.rho**2
    return 0.5, 0.5 * egg.a * egg.c, 0.5 * r2


def diversity_order(arr: ApertureArray) -> float:
    """sum_i min{1/2, a_i c_i / 2, rho_i^2 / 2}; warns on ties."""
    total = 0.0
    for ch in arr.channels:
        args = sorted(_min_args(ch))
        if args[1] - args[0] <= TIE_TOL:
            warnings.warn(
                f"tie in the diversity-order minimum ({args[0]:.12g} vs {args[1]:.12g})",
                TieWarning,
                stacklevel=2,
            )
        total += args[0]
    return total


def ber_asymptotic(arr: ApertureArray, mod, cfg: QuadratureConfig = METRICS_CONFIG) -> AsymptoticResult:
    """Residue expansion of every subset term at high SNR.

    Each variable contributes Res_l (V_l / sqrt q)^{p_l} from a left pole -p_l
    and the coupling Gamma is evaluated at the sum of the p_l:

        term ~ prod K'_l Res_l (V_l/sqrt q)^{p_l} Gamma(p + sum p_l / 2) / (2 Gamma(p)).

    With V_l proportional to gbar^{-1/2} the exponent of gbar is sum p_l / 2.
    The leading poles give G_c and G_d; near neighbours are kept in ``terms``
    so the evaluator stays usable when poles almost coincide.  When two
    nearest poles coincide exactly the expansion is invalid and the coding
    gain is fitted to the exact curve at 60 dB instead.
    """
    mod = modulation(mod)
    G_d = diversity_order(arr)
    terms: dict = {}
    for term in expand_product_of_sums(arr):
        if any(br not in _branches(ch) for ch, br in zip(arr.channels, term.branches)):
            continue
        partial = {0.0: math.exp(-math.log(2.0) - math.lgamma(mod.p))}
        for ch, br in zip(arr.channels, term.branches):
            d = _cdf_dim(ch, br)
            poles = _near_poles(d.fox)
            if poles is None:
                warnings.warn("coincident leading poles; coding gain fitted to the exact curve", TieWarning, stacklevel=2)
                return _fitted_asymptote(arr, mod, G_d, cfg)
            # V sqrt(gbar) is the gbar-free part of the argument
            v0 = d.V * math.sqrt(ch.effective_snr) / math.sqrt(mod.q)
            nxt = {}
            for e, c in partial.items():
                for pl, res in poles:
                    key = round(e + 0.5 * pl, 12)
                    nxt[key] = nxt.get(key, 0.0) + c * math.exp(d.log_weight + pl * math.log(v0)) * res
            partial = nxt
        for e, c in partial.items():
            terms[e] = terms.get(e, 0.0) + c * math.exp(math.lgamma(mod.p + e))
    pairs = tuple(sorted(((c, e) for e, c in terms.items()), key=lambda t: t[1]))
    c0, e0 = pairs[0]
    if not c0 > 0:
        warnings.warn("leading residue term is not positive; coding gain fitted to the exact curve", TieWarning, stacklevel=2)
        return _fitted_asymptote(arr, mod, G_d, cfg)
    return AsymptoticResult(coding_gain=c0, diversity_order=e0, terms=pairs)


def _fitted_asymptote(arr, mod, G_d, cfg):
    g60 = 10.0**6
    ber60 = ber_inid_exact(arr.with_snr(60.0), mod, cfg)
    return AsymptoticResult(coding_gain=ber60 * g60**G_d, diversity_order=G_d)


def ber_omega0_asymptotic(arr: ApertureArray, mod, cfg: QuadratureConfig = METRICS_CONFIG) -> float:
    """Leading term of :func:`ber_omega0` as gbar grows (value at the array's SNR).

    Both the Meijer-G factors at gamma = 1 and the Fox-H core are replaced by
    the residue at s = -p3 with p3 = min{a, rho^2/c}.
    """
    mod = modulation(mod)
    _require_iid(arr)
    _require_omega0(arr)
    ch, N = arr.channels[0], arr.n
    egg, r2 = ch.egg, ch.pointing.rho**2
    beta = r2 / egg.c
    if abs(egg.a - beta) <= TIE_TOL:
        warnings.warn("a equals rho^2/c: double pole, asymptote undefined", TieWarning, stacklevel=2)
        return float("nan")
    p3 = min(egg.a, beta)
    # residue of Gamma(a+s) Gamma(-s) / (Gamma(1-s) (beta+s)) at s = -p3
    if egg.a < beta:
        log_res = -math.log(p3) - math.log(beta - p3)
    else:
        log_res = math.lgamma(egg.a - p3) - math.log(p3)
    V = 1.0 / (egg.b * ch.effective_a0 * math.sqrt(ch.effective_snr))
    log_psi = egg.c * math.log(V)
    log_z = egg.c * (math.log(V) - 0.5 * N * math.log(mod.q))
    log_pref = N * (math.log(r2) - math.log(egg.c) - math.lgamma(egg.a)) - math.log(2.0) - math.lgamma(mod.p)
    log_val = (
        log_pref
        + (N - 1) * (log_res + p3 * log_psi)
        + log_res
        + math.lgamma(mod.p + 0.5 * N * egg.c * p3)
        + p3 * log_z
    )
    return math.exp(log_val)


# ---------------------------------------------------------------------------
# ergodic capacity


# ln(1+g)/g = (1/2 pi i) int Gamma(s)Gamma(1-s)/(1-s) g^{-s} ds, 0 < Re s < 1
_LOG_KERNEL = FoxHSpec(1, 2, ((0.0, 1.0), (0.0, 1.0)), ((0.0, 1.0), (-1.0, 1.0)))


def _pdf_moment_blocks(ch: ApertureChannel, branch: str, n_cdf_weights):
    """Outer Gamma blocks, 1/V_k and log prefactor of the branch pdf moment.

    For the exponent w = 1 - s0 - (1/2) sum_n m_n u_n of gamma, with
    Z = 2w = 2 - 2 s0 - sum m_n u_n:
      exponential: w rho^2 (lam A sqrt(gbar))^Z Gamma(1+Z) / (rho^2 + Z)
      GG:          (1-w) rho^2 / Gamma(a) (b A sqrt(gbar))^Z Gamma(a+Z/c) / (rho^2 + Z)
    """
    egg, r2 = ch.egg, ch.pointing.rho**2
    A, g = ch.effective_a0, ch.effective_snr
    zw = (-2.0,) + tuple(-float(m) for m in n_cdf_weights)
    ratio = ((r2 + 2.0, zw),), ((r2 + 3.0, zw),)
    if branch == "exp":
        inv_v = egg.lam * A * math.sqrt(g)
        upper = ((3.0, zw),) + ratio[0]
        log_w = math.log(egg.omega) + math.log(r2)
    else:
        inv_v = egg.b * A * math.sqrt(g)
        upper = ((egg.a + 2.0 / egg.c, tuple(w / egg.c for w in zw)),) + ratio[0]
        log_w = math.log1p(-egg.omega) + math.log(r2) - math.lgamma(egg.a)
    return upper, ratio[1], inv_v, log_w + 2.0 * math.log(inv_v)


def _capacity_term(ch_k, br_k, others, mult, cfg) -> float:
    """One (pdf branch of aperture k) x (CDF branches of the rest) term, in bits.

    ``others`` lists (channel, branch) CDF factors and ``mult`` their
    multiplicities (1 for exact terms).  A factor standing for m copies has
    its whole argument V sqrt(gamma) raised to m, giving (V / V_k)^m.
    """
    upper, lower, inv_v, log_pref = _pdf_moment_blocks(ch_k, br_k, mult)
    dims = [_cdf_dim(ch, br) for ch, br in others]
    spec = MultiFoxHSpec(
        per_dim=(_LOG_KERNEL,) + tuple(d.fox for d in dims),
        args=(inv_v**2,) + tuple((d.V * inv_v) ** m for d, m in zip(dims, mult)),
        outer_upper=upper,
        outer_lower=lower,
    )
    log_pref += sum(d.log_weight for d in dims)
    # one extra contour for the log kernel on top of the CDF dimensions
    cfg = replace(cfg, max_dim_exact=cfg.max_dim_exact + 1)
    return math.exp(log_pref) * multivariate_fox_h(spec, cfg) / LN2


def _capacity_bound(ch_k, br_k, others) -> float:
    """Branch masses times log2(1 + mean branch SNR) (Jensen)."""
    egg, r2 = ch_k.egg, ch_k.pointing.rho**2
    A2g = ch_k.effective_a0**2 * ch_k.effective_snr
    tail = r2 / (r2 + 2.0)
    if br_k == "exp":
        m, mean = egg.omega, 2.0 * egg.lam**2 * A2g * tail
    else:
        m = 1.0 - egg.omega
        mean = egg.b**2 * A2g * tail * math.exp(math.lgamma(egg.a + 2.0 / egg.c) - math.lgamma(egg.a))
    return m * math.prod(_cdf_dim(ch, br).mass for ch, br in others) * math.log2(1.0 + mean)


def capacity_inid_exact(arr: ApertureArray, cfg: QuadratureConfig = METRICS_CONFIG) -> float:
    """Exact ergodic capacity (bits/s/Hz): sum over k, its pdf branch and the
    subset of CDF branches of the other apertures."""
    _check_config(cfg)
    counts: dict = {}
    bounds: dict = {}
    N = arr.n
    for k, ch_k in enumerate(arr.channels):
        rest = [ch for i, ch in enumerate(arr.channels) if i != k]
        sub = ApertureArray(tuple(rest)) if rest else None
        subsets = expand_product_of_sums(sub) if sub else [None]
        for br_k in _branches(ch_k):
            for term in subsets:
                brs = term.branches if term else ()
                if any(br not in _branches(ch) for ch, br in zip(rest, brs)):
                    continue
                others = tuple(sorted(zip(rest, brs), key=repr))
                key = (ch_k, br_k, others)
                counts[key] = counts.get(key, 0) + 1
                bounds[key] = _capacity_bound(ch_k, br_k, others)
    if N - 1 > 0 and not counts:
        return 0.0

    def evaluate(key):
        ch_k, br_k, others = key
        return _capacity_term(ch_k, br_k, list(others), [1] * len(others), cfg)

    return _sum_terms([(bounds[k], counts[k], k) for k in counts], evaluate)


def capacity_iid_exact_omega0(arr: ApertureArray, cfg: QuadratureConfig = METRICS_CONFIG) -> float:
    """Exact i.i.d. capacity for omega = 0: N times one N-variable Fox-H."""
    _require_iid(arr)
    _require_omega0(arr)
    ch, N = arr.channels[0], arr.n
    others = [(ch, "gg")] * (N - 1)
    return N * _capacity_term(ch, "gg", others, [1] * (N - 1), cfg)


def capacity_iid_approx_omega0(
    arr: ApertureArray, cfg: QuadratureConfig = METRICS_CONFIG, match_point: str = "scale"
) -> float:
    """Equal-contour capacity for omega = 0: a bivariate Fox-H times the GG
    Meijer-G factor raised to N - 2.

    ``match_point`` fixes where the N - 2 frozen CDF copies are evaluated:
    "scale" at gamma = 1 / V^2 (the Meijer-G argument equals one, the bulk of
    the SNR distribution) or "unit" at gamma = 1.  The capacity integrand
    lives near the distribution scale, so "unit" drifts to zero as the SNR
    grows.
    """
    _require_iid(arr)
    _require_omega0(arr)
    ch, N = arr.channels[0], arr.n
    if N == 1:
        return _capacity_term(ch, "gg", [], [], cfg)
    if match_point not in ("scale", "unit"):
        raise ConfigError(f"match_point must be 'scale' or 'unit', got {match_point!r}")
    core = _capacity_term(ch, "gg", [(ch, "gg")], [N - 1], cfg)
    gamma = 1.0 / _cdf_dim(ch, "gg").V ** 2 if match_point == "scale" else 1.0
    frozen = float(branch_cdf_values(ch, gamma, cfg)[0])
    return N * core * frozen ** (N - 2)
