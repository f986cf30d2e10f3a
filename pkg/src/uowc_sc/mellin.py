"""Meijer-G, Fox-H and multivariate Fox-H evaluation by contour quadrature.

Convention: with the Gamma ratio

    F(s) = prod_{j<=m} G(b_j + B_j s) prod_{j<=n} G(1 - a_j - A_j s)
           / prod_{j>m} G(1 - b_j - B_j s) prod_{j>n} G(a_j + A_j s)

the functions are

    H(x) = 1/(2 pi i) int_L F(s) (psi x)^(-s) ds

along the vertical line Re s = c that separates the left pole family of
G(b_j + B_j s) from the right pole family of G(1 - a_j - A_j s).  This is the
standard textbook function (G^{1,0}_{0,1}(-; 0 | x) = exp(-x)); writing the
kernel as (psi x)^(+s) instead only reflects the contour s -> -s.

Because the parameters are real, F(c - it) = conj F(c + it) and every line
integral reduces to (1/pi) Re int_0^inf F(c + it) (psi x)^(-c - it) dt.  In
several dimensions only the first variable is folded onto the half line.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np
from scipy import special

from .errors import ContourInfeasible, DimensionTooHigh, NonConvergence
from .special import loggamma

__all__ = [
    "MeijerGSpec",
    "FoxHSpec",
    "MultiFoxHSpec",
    "ContourSpec",
    "QuadratureConfig",
    "log_gamma_complex",
    "choose_contour",
    "meijer_g",
    "fox_h",
    "multivariate_fox_h",
]


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    max_refinements: int = 6
    max_dim_exact: int = 3
    # absolute floor for the convergence test (values near 0 lose relative accuracy)
    abs_tol: float = 1e-15
    gl_nodes: int = 32
    # nodes per panel on each axis of a multivariate tensor grid
    gl_nodes_multi: int = 16
    # cap on tensor-product nodes per refinement level
    max_tensor_nodes: int = 60_000_000
    # sum residues instead of integrating when a shifted contour certifies it
    residues: bool = True

    def __post_init__(self):
        if not 0 < self.rel_tol < 1:
            raise ValueError("rel_tol must lie in (0, 1)")
        if self.max_refinements < 1 or self.max_dim_exact < 1:
            raise ValueError("max_refinements and max_dim_exact must be positive")


DEFAULT_CONFIG = QuadratureConfig()


@dataclass(frozen=True)
class ContourSpec:
    real_part: float
    half_height: float
    nodes: int

    def __post_init__(self):
        if not self.half_height > 0:
            raise ValueError("half_height must be positive")
        if self.nodes < 16:
            raise ValueError("at least 16 nodes are required")


@dataclass(frozen=True)
class FoxHSpec:
    """H^{m,n}_{p,q} with upper pairs (a_w, A_w) and lower pairs (b_w, B_w)."""

    m: int
    n: int
    upper_params: tuple[tuple[float, float], ...]
    lower_params: tuple[tuple[float, float], ...]
    arg_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "upper_params", tuple((float(a), float(A)) for a, A in self.upper_params))
        object.__setattr__(self, "lower_params", tuple((float(b), float(B)) for b, B in self.lower_params))
        if not (0 <= self.m <= self.q and 0 <= self.n <= self.p):
            raise ValueError("orders must satisfy 0 <= m <= q and 0 <= n <= p")
        if any(A <= 0 for _, A in self.upper_params) or any(B <= 0 for _, B in self.lower_params):
            raise ValueError("exponent multipliers must be strictly positive")
        if not self.arg_scale > 0:
            raise ValueError("arg_scale must be positive")

    @property
    def p(self) -> int:
        return len(self.upper_params)

    @property
    def q(self) -> int:
        return len(self.lower_params)

    def strip(self) -> tuple[float, float]:
        """Open interval of admissible contour abscissae (may be unbounded)."""
        left = max((-b / B for b, B in self.lower_params[: self.m]), default=-math.inf)
        right = min(((1.0 - a) / A for a, A in self.upper_params[: self.n]), default=math.inf)
        return left, right

    def decay_rate(self) -> float:
        """a* in |F(c + it)| ~ exp(-pi a* |t| / 2)."""
        A = [A for _, A in self.upper_params]
        B = [B for _, B in self.lower_params]
        return sum(B[: self.m]) - sum(B[self.m :]) + sum(A[: self.n]) - sum(A[self.n :])

    @cached_property
    def _factors(self):
        """Gamma factors as (const, mult, sign) with argument const + mult*s.

        A numerator/denominator pair whose arguments differ by a small integer
        is replaced by the equivalent finite product, e.g.
        Gamma(-s)/Gamma(1-s) = -1/s, which saves two log-Gamma calls.
        """
        num = [(b, B) for b, B in (p for p in self.lower_params[: self.m])]
        num += [(1.0 - a, -A) for a, A in self.upper_params[: self.n]]
        den = [(1.0 - b, -B) for b, B in self.lower_params[self.m :]]
        den += [(a, A) for a, A in self.upper_params[self.n :]]
        linear = []  # (const, mult, sign): sign * log(const + mult*s)
        for z0, mu in list(num):
            for i, (w0, nu) in enumerate(den):
                k = w0 - z0
                if nu == mu and abs(k - round(k)) < 1e-13 and abs(k) <= 12:
                    k = int(round(k))
                    if k > 0:
                        linear += [(z0 + j, mu, -1.0) for j in range(k)]
                    else:
                        linear += [(z0 - j, mu, 1.0) for j in range(1, -k + 1)]
                    num.remove((z0, mu))
                    del den[i]
                    break
        gammas = [(z0, mu, 1.0) for z0, mu in num] + [(w0, nu, -1.0) for w0, nu in den]
        return gammas, linear

    def log_kernel(self, s):
        """log F(s) for a complex array s."""
        s = np.asarray(s, dtype=complex)
        out = np.zeros_like(s)
        gammas, linear = self._factors
        for z0, mu, sign in gammas:
            out += sign * loggamma(z0 + mu * s)
        for z0, mu, sign in linear:
            out += sign * np.log(z0 + mu * s)
        return out

    def phase_rate(self, t):
        """Rough upper bound on |d/dt arg F(c + it)| (kernel excluded)."""
        t = np.abs(np.asarray(t, dtype=float))
        gammas, linear = self._factors
        # arg Gamma(z0 + i mu t) turns at mu Re psi(z) <= mu log(2 + |z|)
        out = sum(abs(mu) * np.log(2.0 + abs(z0) + abs(mu) * t) for z0, mu, _ in gammas)
        return out + sum(abs(mu) / (1.0 + abs(mu) * t) for _, mu, _ in linear) + 0.0 * t


@dataclass(frozen=True)
class MeijerGSpec:
    m: int
    n: int
    a_coeffs: tuple[float, ...]
    b_coeffs: tuple[float, ...]
    arg_scale: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "a_coeffs", tuple(float(a) for a in self.a_coeffs))
        object.__setattr__(self, "b_coeffs", tuple(float(b) for b in self.b_coeffs))
        if not (0 <= self.m <= len(self.b_coeffs) and 0 <= self.n <= len(self.a_coeffs)):
            raise ValueError("orders must satisfy 0 <= m <= q and 0 <= n <= p")
        if not self.arg_scale > 0:
            raise ValueError("arg_scale must be positive")

    @property
    def p(self) -> int:
        return len(self.a_coeffs)

    @property
    def q(self) -> int:
        return len(self.b_coeffs)

    def as_fox_h(self) -> FoxHSpec:
        return FoxHSpec(
            self.m,
            self.n,
            tuple((a, 1.0) for a in self.a_coeffs),
            tuple((b, 1.0) for b in self.b_coeffs),
            self.arg_scale,
        )


@dataclass(frozen=True)
class MultiFoxHSpec:
    """M-fold Mellin-Barnes integral

        (2 pi i)^-M int ... int prod_l F_l(s_l) (psi_l x_l)^(-s_l)
            * prod_up Gamma(alpha + w.s) / prod_low Gamma(beta + w.s) ds

    ``per_dim`` holds one FoxHSpec per variable, ``args`` the x_l, and the
    outer blocks list (coefficient, weight-vector) pairs for the Gamma factors
    that couple the variables.
    """

    per_dim: tuple[FoxHSpec, ...]
    args: tuple[float, ...]
    outer_upper: tuple[tuple[float, tuple[float, ...]], ...] = ()
    outer_lower: tuple[tuple[float, tuple[float, ...]], ...] = ()

    def __post_init__(self):
        M = len(self.per_dim)
        if M < 1:
            raise ValueError("dimension must be at least 1")
        object.__setattr__(self, "args", tuple(float(x) for x in self.args))
        if len(self.args) != M or any(not x > 0 for x in self.args):
            raise ValueError("need one positive argument per dimension")
        for name in ("outer_upper", "outer_lower"):
            blocks = tuple((float(c), tuple(float(w) for w in ws)) for c, ws in getattr(self, name))
            if any(len(ws) != M for _, ws in blocks):
                raise ValueError(f"every {name} weight vector must have length {M}")
            object.__setattr__(self, name, blocks)

    @property
    def dim(self) -> int:
        return len(self.per_dim)


def log_gamma_complex(z):
    """Principal-branch log Gamma; see :func:`uowc_sc.special.loggamma`."""
    return loggamma(z)


# ---------------------------------------------------------------------------
# quadrature rules


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


# largest phase advance (radians) per panel for the 32-point rule; the
# neglected Taylor term theta^64/64! of a unit oscillation is then < 1e-20
_OSC = 24.0


def _panel_edges(T: float, h0: float, hmax_fn, level: int = 0, grade: float = 0.5) -> np.ndarray:
    """Panel edges on [0, T].

    Level-0 widths follow w(t) = min(grade * max(h0, t), hmax(t)): graded near the
    origin, where the nearest pole sits at distance ~h0, and capped by the
    oscillation limit further out.  Edges are placed by inverting the
    cumulative panel count int dt / w.  Level L splits every level-0 panel
    into 2^L equal parts, so the levels are nested.
    """
    ts = np.unique(np.concatenate([[0.0], np.geomspace(h0 / 8.0, T, 600), np.linspace(0.0, T, 600)]))
    ts = ts[ts <= T]
    w = np.minimum(np.maximum(h0, ts) * grade, hmax_fn(ts))
    dens = 1.0 / w
    count = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(ts))])
    n = max(int(math.ceil(count[-1])), 1)
    edges = np.interp(np.linspace(0.0, count[-1], n + 1), count, ts)
    edges[-1] = T
    if level:
        k = 2**level
        frac = np.arange(k) / k
        edges = np.concatenate([(edges[:-1, None] + np.diff(edges)[:, None] * frac[None, :]).ravel(), [T]])
    return edges


def _rule(edges: np.ndarray, n: int, symmetric: bool):
    x, w = _gauss_legendre(n)
    lo, hi = edges[:-1, None], edges[1:, None]
    half = 0.5 * (hi - lo)
    t = (lo + half * (x[None, :] + 1.0)).ravel()
    wt = (half * w[None, :]).ravel()
    if symmetric:
        t = np.concatenate([-t[::-1], t])
        wt = np.concatenate([wt[::-1], wt])
    return t, wt


def _truncation(log_env, t_floor: float, tail_tol: float, cap: float = 1e7) -> float:
    """Smallest T (on a x2 ladder) past which env(t) * t stays below tail_tol * peak."""
    ts = t_floor * 2.0 ** (np.arange(0, 200) / 4.0)
    ts = ts[ts <= cap]
    le = log_env(ts) + np.log(ts)
    peak = le.max()
    above = np.nonzero(le > peak + math.log(tail_tol))[0]
    last = ts[above[-1]] if above.size else ts[0]
    T = t_floor * 4.0
    while T < last * 2.0:
        T *= 2.0
    if T > cap:
        raise NonConvergence("integrand does not decay along the contour")
    return T


# ---------------------------------------------------------------------------
# contour placement


def _as_fox(spec) -> FoxHSpec:
    return spec.as_fox_h() if isinstance(spec, MeijerGSpec) else spec


def _check_feasible(spec: FoxHSpec) -> tuple[float, float]:
    left, right = spec.strip()
    if not left < right:
        raise ContourInfeasible(f"pole families overlap: left edge {left} >= right edge {right}")
    if spec.decay_rate() <= 0:
        raise ContourInfeasible("integrand does not decay along vertical lines (a* <= 0)")
    return left, right


def _abscissa(spec: FoxHSpec, lnx: float | None = None) -> tuple[float, float]:
    """Contour abscissa and the width of the pole-free neighbourhood around it.

    Without an argument the abscissa is the strip midpoint (or a fixed offset
    from the finite edge of a one-sided strip).  With an argument it is the
    real saddle of |F(c)| x^(-c) inside the strip: for extreme x a fixed
    abscissa leaves x^(-c) many orders of magnitude above the function value
    and the quadrature cancels catastrophically.
    """
    left, right = _check_feasible(spec)
    if lnx is not None:
        c, h, _ = _saddles(spec, np.array([float(lnx)]), left, right)
        return float(c[0]), float(h[0])
    if math.isfinite(left) and math.isfinite(right):
        return 0.5 * (left + right), 0.5 * (right - left)
    mult = max([A for _, A in spec.upper_params] + [B for _, B in spec.lower_params])
    off = 0.5 / mult
    if math.isfinite(left):
        return left + off, off
    if math.isfinite(right):
        return right - off, off
    return 0.0, off


def _dlog_kernel(spec: FoxHSpec, c, order=1):
    """d^order/dc^order of log|F(c)| for real c (poly-gamma sums)."""
    out = np.zeros_like(c)
    for j, (b, B) in enumerate(spec.lower_params):
        if j < spec.m:
            out += B**order * special.polygamma(order - 1, b + B * c)
        else:
            out += (-1) ** (order + 1) * B**order * special.polygamma(order - 1, 1.0 - b - B * c)
    for j, (a, A) in enumerate(spec.upper_params):
        if j < spec.n:
            out += (-1) ** order * A**order * special.polygamma(order - 1, 1.0 - a - A * c)
        else:
            out -= A**order * special.polygamma(order - 1, a + A * c)
    return out


def _saddles(spec: FoxHSpec, lnx: np.ndarray, left: float, right: float):
    """Per-point real saddle of log|F(c)| - c ln x inside the strip.

    log|F| is convex on the strip and tends to +inf at finite edges, so the
    derivative is monotone and a bisection on a stretched coordinate u finds
    the root.  Returns (c, h, log_bound): the abscissa, a panel scale (the
    Gaussian width of the saddle capped by the distance to the nearest pole)
    and log of |F(c)| x^(-c) h, which bounds the size of the integral.
    """
    fl, fr = math.isfinite(left), math.isfinite(right)
    if fl and fr:
        W = right - left
        to_c = lambda u: left + W * special.expit(u)
        lo_u, hi_u = -30.0, 30.0
    elif fl:
        to_c = lambda u: left + np.exp(u)
        lo_u, hi_u = math.log(1e-12 * max(1.0, abs(left))), math.log(1e8)
    elif fr:
        to_c = lambda u: right - np.exp(-u)
        lo_u, hi_u = -math.log(1e8), -math.log(1e-12 * max(1.0, abs(right)))
    else:
        to_c = np.sinh
        lo_u, hi_u = -20.0, 20.0
    lo = np.full(lnx.shape, lo_u)
    hi = np.full(lnx.shape, hi_u)
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        neg = _dlog_kernel(spec, to_c(mid)) - lnx < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    c = to_c(0.5 * (lo + hi))
    dist = np.minimum(c - left, right - c)
    curv = _dlog_kernel(spec, c, order=2)
    width = np.where(curv > 0, 1.0 / np.sqrt(np.maximum(curv, 1e-300)), dist)
    h = np.maximum(np.minimum(dist, width), 1e-12)
    log_bound = spec.log_kernel(c.astype(complex)).real - c * lnx + np.log(h)
    return c, h, log_bound


def choose_contour(spec, x: float = 1.0, cfg: QuadratureConfig = DEFAULT_CONFIG) -> ContourSpec:
    """Place the vertical contour inside the admissible strip.

    The abscissa is the strip midpoint (or the real saddle point when the
    strip is unbounded on one side).  The half height T is the first point
    of a doubling ladder beyond which |F(c + it)| t stays below a small
    fraction of rel_tol times its peak; K counts the level-0 Gauss-Legendre
    nodes on [-T, T].
    """
    fox = _as_fox(spec)
    lnx = math.log(fox.arg_scale * x)
    c, h0 = _abscissa(fox, lnx)
    T = _truncation(lambda t: fox.log_kernel(c + 1j * t).real, h0, cfg.rel_tol * 1e-3)
    edges = _panel_edges(T, h0, lambda t: _OSC / (abs(lnx) + fox.phase_rate(t) + 1e-3), 0)
    return ContourSpec(real_part=c, half_height=T, nodes=2 * cfg.gl_nodes * (len(edges) - 1))


# ---------------------------------------------------------------------------
# univariate evaluation


# roundoff floor of an oscillatory sum, in units of eps * sum |terms|
_ROUNDOFF = 64.0 * np.finfo(float).eps


def _check_converged(new, old, cfg, mass=0.0):
    err = np.abs(new - old)
    floor = np.maximum(cfg.abs_tol, _ROUNDOFF * mass)
    return bool(np.all(err <= cfg.rel_tol * np.abs(new) + floor)), err


# ---------------------------------------------------------------------------
# residue acceleration for extreme arguments

# poles passed at most when shifting the contour
_MAX_POLES = 8
# poles closer than this (relative) are treated as coincident
_COINCIDE = 1e-6


@lru_cache(maxsize=512)
def _pole_expansion(fox: FoxHSpec, side: int):
    """Stages of a contour shift across the nearest simple poles on one side.

    Returns (poles, log_residues, shifts, log_masses): passing the first j
    poles moves the line to shifts[j-1], where (1/pi) int_0^inf |F(c'+it)| dt
    equals exp(log_masses[j-1]).  Expansion stops before any pair of
    coincident poles or a pole that meets a zero, where residues would need
    Laurent terms.
    """
    left, right = fox.strip()
    gammas, linear = fox._factors
    poles, zeros = [], []
    for i, (z0, mu, sg) in enumerate(gammas):
        locs = [((-k - z0) / mu, k) for k in range(_MAX_POLES + 2)]
        if sg < 0:
            zeros += [p for p, _ in locs]
            continue
        for p, k in locs:
            if (side < 0 and mu > 0) or (side > 0 and mu < 0):
                poles.append((p, "g", i, k))
    for i, (z0, mu, sg) in enumerate(linear):
        p = -z0 / mu
        if sg > 0:
            zeros.append(p)
        elif (side < 0 and p <= left) or (side > 0 and p >= right):
            poles.append((p, "l", i, 0))
    # nearest to the contour first
    poles.sort(key=lambda q: side * q[0])
    poles = poles[: _MAX_POLES + 1]
    zeros = np.asarray(zeros)

    usable = len(poles) - 1
    for j, (p, *_) in enumerate(poles):
        tol = _COINCIDE * max(1.0, abs(p))
        if j > 0 and abs(p - poles[j - 1][0]) < tol:
            usable = min(usable, j - 1)
            break
        if zeros.size and np.min(np.abs(zeros - p)) < tol:
            usable = min(usable, j)
            break
    if usable <= 0:
        return None

    locs = np.array([q[0] for q in poles])
    logres = []
    for p, kind, i, k in poles[:usable]:
        if kind == "g":
            z0, mu, _ = gammas[i]
            acc = complex(np.log(complex((-1.0) ** k / (math.factorial(k) * mu))))
        else:
            z0, mu, _ = linear[i]
            acc = complex(np.log(complex(1.0 / mu)))
        for j, (w0, nu, sg) in enumerate(gammas):
            if not (kind == "g" and j == i):
                acc += sg * complex(loggamma(complex(w0 + nu * p)))
        for j, (w0, nu, sg) in enumerate(linear):
            if not (kind == "l" and j == i):
                acc += sg * complex(np.log(complex(w0 + nu * p)))
        logres.append(acc)

    shifts, masses = [], []
    for j in range(1, usable + 1):
        cp = 0.5 * (locs[j - 1] + locs[j])
        h0 = 0.5 * abs(locs[j] - locs[j - 1])
        env = lambda t, cp=cp: fox.log_kernel(cp + 1j * t).real
        try:
            T = _truncation(env, h0, 1e-14)
        except NonConvergence:
            return None
        t, w = _rule(_panel_edges(T, h0, lambda t: np.full_like(t, np.inf)), 32, symmetric=False)
        shifts.append(cp)
        le = env(t)
        top = le.max()
        masses.append(top + math.log(float(np.exp(le - top) @ w) / math.pi + 1e-300))
    return locs[:usable], np.array(logres), np.array(shifts), np.array(masses)


def _residue_values(fox: FoxHSpec, lnx: np.ndarray, cfg: QuadratureConfig):
    """Residue sums where a shifted-contour bound certifies them; NaN elsewhere."""
    out = np.full(lnx.shape, np.nan)
    for side in (-1, 1):
        todo = np.isnan(out)
        if not todo.any():
            break
        exp_ = _pole_expansion(fox, side)
        if exp_ is None:
            continue
        locs, logres, shifts, masses = exp_
        lx = lnx[todo]
        with np.errstate(over="ignore", invalid="ignore"):
            terms = np.exp(logres[None, :] - locs[None, :] * lx[:, None]).real
            partial = np.cumsum(terms, axis=1)
            if side > 0:
                partial = -partial
            bound = np.exp(masses[None, :] - shifts[None, :] * lx[:, None])
            ok = np.isfinite(partial) & (bound <= 1e-3 * cfg.rel_tol * np.abs(partial))
        first = np.where(ok.any(axis=1), ok.argmax(axis=1), -1)
        vals = np.where(first >= 0, partial[np.arange(lx.size), np.maximum(first, 0)], np.nan)
        sub = out[todo]
        sub[first >= 0] = vals[first >= 0]
        out[todo] = sub
    return out


# integrals whose saddle bound falls below this are zero in double precision
_LOG_NEGLIGIBLE = -760.0


def _line_integral(fox: FoxHSpec, log_x: np.ndarray, cfg: QuadratureConfig, return_error=False):
    left, right = _check_feasible(fox)
    lnx = math.log(fox.arg_scale) + log_x
    out = np.zeros(lnx.shape)
    errors: list[float] = []

    # the kernel x^(-it) oscillates at rate |ln x|; arguments are grouped so
    # each group shares one abscissa and a node density matched to its rate
    groups = []
    mag = np.floor(2.0 * np.log2(np.abs(lnx) + 1.0))
    cs, hs, bound = _saddles(fox, lnx, left, right)
    quad = bound > _LOG_NEGLIGIBLE
    if cfg.residues and np.any(quad & (np.abs(lnx) > 4.0)):
        res = _residue_values(fox, np.where(quad, lnx, 0.0), cfg)
        hit = quad & ~np.isnan(res) & (np.abs(lnx) > 4.0)
        out[hit] = res[hit]
        quad &= ~hit
    live = np.nonzero(quad)[0]
    order = live[np.lexsort((cs[live], mag[live]))]
    i = 0
    while i < order.size:
        j = i + 1
        c0, h_0 = cs[order[i]], hs[order[i]]
        # keep the group within half a saddle width and one magnitude class
        while j < order.size and mag[order[j]] == mag[order[i]] and cs[order[j]] - c0 <= 0.5 * h_0:
            j += 1
        idx = order[i:j]
        mid = idx[len(idx) // 2]
        groups.append((idx, float(cs[mid]), float(np.min(hs[idx]))))
        i = j

    for idx, c, h0 in groups:
        T = _truncation(lambda t: fox.log_kernel(c + 1j * t).real, h0, cfg.rel_tol * 1e-3)
        grp = lnx[idx]
        vals, errs = _bucket_integral(fox, c, h0, T, grp, float(np.max(np.abs(grp))), cfg)
        out[idx] = vals
        errors = [max(e) for e in zip(errors, errs)] + errors[len(errs):] + errs[len(errors):]
    return (out, errors) if return_error else out


def _bucket_integral(fox, c, h0, T, lnx, lnx_cap, cfg):
    hmax = lambda t: _OSC / (lnx_cap + fox.phase_rate(t) + 1e-3)

    def level_value(level):
        t, w = _rule(_panel_edges(T, h0, hmax, level), cfg.gl_nodes, symmetric=False)
        s = c + 1j * t
        logF = fox.log_kernel(s)
        out = np.empty(lnx.shape)
        mass = np.empty(lnx.shape)
        # chunk over x to bound memory
        step = max(1, 2_000_000 // max(t.size, 1))
        for i in range(0, lnx.size, step):
            vals = np.exp(logF[None, :] - s[None, :] * lnx[i : i + step, None])
            out[i : i + step] = (vals @ w).real / math.pi
            mass[i : i + step] = np.abs(vals) @ w / math.pi
        return out, mass

    prev, _ = level_value(0)
    errors = []
    for level in range(1, cfg.max_refinements + 1):
        cur, mass = level_value(level)
        ok, err = _check_converged(cur, prev, cfg, mass)
        errors.append(float(np.max(err)))
        if ok:
            return cur, errors
        prev = cur
    raise NonConvergence(
        f"contour quadrature did not converge after {cfg.max_refinements} refinements "
        f"(last error {errors[-1]:.3e})"
    )


def _log_args(x, log_x):
    if log_x is not None:
        la = np.asarray(log_x, dtype=float)
        if not np.all(np.isfinite(la)):
            raise ValueError("log_x must be finite")
        return la
    xa = np.asarray(x, dtype=float)
    if np.any(xa <= 0):
        raise ValueError("x must be positive")
    return np.log(xa)


def fox_h(spec: FoxHSpec, x=None, cfg: QuadratureConfig = DEFAULT_CONFIG, *, log_x=None):
    """Evaluate H(x) for positive scalar or array x.

    ``log_x`` may be passed instead of x when the argument itself would
    under- or overflow (e.g. amplitudes raised to a power above 200).
    """
    la = _log_args(x, log_x)
    out = _line_integral(_as_fox(spec), np.atleast_1d(la).ravel(), cfg)
    return float(out[0]) if la.ndim == 0 else out.reshape(la.shape)


def meijer_g(spec: MeijerGSpec, x=None, cfg: QuadratureConfig = DEFAULT_CONFIG, *, log_x=None):
    """Evaluate G(x) for positive scalar or array x (or its logarithm)."""
    return fox_h(spec.as_fox_h(), x, cfg, log_x=log_x)


def refinement_errors(spec, x: float, cfg: QuadratureConfig = DEFAULT_CONFIG) -> list[float]:
    """Successive-level error estimates for a scalar evaluation (diagnostics)."""
    _, errs = _line_integral(_as_fox(spec), np.atleast_1d(math.log(x)), cfg, return_error=True)
    return errs


# ---------------------------------------------------------------------------
# multivariate evaluation


@dataclass
class _Dim:
    fox: FoxHSpec
    c: float
    h0: float
    lnx: float


def _outer_blocks(spec: MultiFoxHSpec):
    return [(a, ws, 1.0) for a, ws in spec.outer_upper] + [(b, ws, -1.0) for b, ws in spec.outer_lower]


def _outer_log(spec: MultiFoxHSpec, s_list):
    """Sum of log outer Gamma factors on broadcast arrays of s_l."""
    out = 0.0
    for coef, ws, sign in _outer_blocks(spec):
        arg = coef + sum(w * s for w, s in zip(ws, s_list) if w != 0.0)
        out = out + sign * loggamma(np.asarray(arg, dtype=complex))
    return out


def _joint_abscissae(spec: MultiFoxHSpec, cs, strips):
    """Pull the per-variable abscissae towards the strip edges that open up
    the outer Gamma arguments, maximizing the smallest pole clearance.

    Every c_l moves on the segment from its own choice to the strip edge in
    the direction that increases the upper outer arguments it enters; the
    common fraction theta in (0, 1] is picked on a grid.
    """
    uppers = [(coef, np.array(ws)) for coef, ws in spec.outer_upper]
    cs = np.array(cs)
    drive = sum(ws for _, ws in uppers)
    edges = []
    for l, (left, right) in enumerate(strips):
        edge = left if drive[l] < 0 else right if drive[l] > 0 else cs[l]
        if not math.isfinite(edge):
            # unbounded side: a finite excursion of a few units is enough
            edge = cs[l] + math.copysign(4.0, drive[l])
        edges.append(edge)
    edges = np.array(edges)

    def clearance(theta):
        c = edges + theta * (cs - edges)
        gap = [coef + ws @ c for coef, ws in uppers]
        side = [min(c[l] - lo, hi - c[l]) for l, (lo, hi) in enumerate(strips)]
        return min(gap + side), c

    best = max((clearance(th) for th in np.linspace(0.01, 1.0, 100)), key=lambda v: v[0])
    if best[0] <= 0:
        raise ContourInfeasible("no common contour separates the outer and per-variable poles")
    return [float(v) for v in best[1]]


def _setup_dims(spec: MultiFoxHSpec) -> list[_Dim]:
    dims = []
    for fox, x in zip(spec.per_dim, spec.args):
        c, h0 = _abscissa(fox)
        dims.append(_Dim(fox=fox, c=c, h0=h0, lnx=math.log(fox.arg_scale * x)))
    cs = [d.c for d in dims]
    if any(coef + sum(w * c for w, c in zip(ws, cs)) <= 0 for coef, ws in spec.outer_upper):
        strips = [d.fox.strip() for d in dims]
        cs = _joint_abscissae(spec, cs, strips)
        for d, c, (lo, hi) in zip(dims, cs, strips):
            d.c = c
            d.h0 = min(c - lo, hi - c)
    for coef, ws, sign in _outer_blocks(spec):
        re = coef + sum(w * c for w, c in zip(ws, cs))
        if sign > 0 and re <= 0:
            raise ContourInfeasible(f"outer Gamma argument has non-positive real part {re:.4g}")
        if re > 0:
            # the nearest outer pole bounds the panel scale of every coupled variable
            for d, w in zip(dims, ws):
                if w != 0.0:
                    d.h0 = min(d.h0, re / abs(w))
    return dims


def _coupling_frame(spec: MultiFoxHSpec) -> np.ndarray:
    """Orthonormal frame whose first axis follows the common outer weight vector.

    When every outer factor depends on the variables through one direction w,
    the coupling decays only along w and the per-variable factors carry the
    decay across it.  Integrating in this rotated frame lets the transverse
    axes use wide panels where the integrand is smooth.  Without a common
    direction the identity frame is returned.
    """
    M = spec.dim
    blocks = _outer_blocks(spec)
    if M == 1 or not blocks:
        return np.eye(M)
    w0 = np.array(blocks[0][1])
    n0 = np.linalg.norm(w0)
    if n0 == 0.0:
        return np.eye(M)
    d = w0 / n0
    for _, ws, _ in blocks[1:]:
        w = np.array(ws)
        if np.linalg.norm(w - np.dot(w, d) * d) > 1e-12 * max(np.linalg.norm(w), 1.0):
            return np.eye(M)
    # QR of [d, e_1, ..., e_M] gives d as the first column up to sign
    q, _ = np.linalg.qr(np.column_stack([d, np.eye(M)]))
    q = q[:, :M]
    return q * np.sign(np.dot(q[:, 0], d))


def _candidate_frames(spec: MultiFoxHSpec):
    Q = _coupling_frame(spec)
    eye = np.eye(spec.dim)
    return [eye] if np.allclose(Q, eye) else [eye, Q]


def _grid_plan(spec, dims, Q, tail_tol, osc):
    """Integrand, panel scales, half heights and base node count in frame Q.

    A rotated frame helps when the variables decay only through the coupling
    factors, but hurts when a per-variable factor already decays fast and the
    rotation spreads its oscillation over the long axes; the caller keeps the
    cheaper plan.
    """
    f = _Integrand(spec, dims, Q)
    h0s = [f.axis_h0(j) for j in range(spec.dim)]
    Ts = _envelope_truncation(f, h0s, tail_tol)
    hmax = [lambda r, j=j: osc / (f.axis_rate(j, r) + 1e-3) for j in range(spec.dim)]
    panels = math.prod(len(_panel_edges(T, h0, hm, 0, grade=1.0)) - 1 for T, h0, hm in zip(Ts, h0s, hmax))
    return f, h0s, Ts, hmax, panels


class _Integrand:
    """log of the M-fold integrand on rotated coordinates r (t = Q r)."""

    def __init__(self, spec: MultiFoxHSpec, dims: list[_Dim], Q: np.ndarray):
        self.spec, self.dims, self.Q = spec, dims, Q
        self.c = np.array([d.c for d in dims])

    def __call__(self, axes):
        """log f on the tensor grid spanned by the 1-D arrays in ``axes``."""
        M = len(axes)
        grids = []
        for j, r in enumerate(axes):
            sh = [1] * M
            sh[j] = r.size
            grids.append(r.reshape(sh))
        out = 0.0
        for l, d in enumerate(self.dims):
            t = sum(self.Q[l, j] * g for j, g in enumerate(grids) if self.Q[l, j] != 0.0)
            s = d.c + 1j * (t if not np.isscalar(t) else np.asarray(t))
            out = out + d.fox.log_kernel(s) - s * d.lnx
        if _outer_blocks(self.spec):
            s_list = []
            for l, d in enumerate(self.dims):
                t = sum(self.Q[l, j] * g for j, g in enumerate(grids) if self.Q[l, j] != 0.0)
                s_list.append(d.c + 1j * t)
            out = out + _outer_log(self.spec, s_list)
        return out

    def axis_h0(self, j):
        # moving r_j by delta moves every t_l by at most delta
        return min(d.h0 for l, d in enumerate(self.dims) if self.Q[l, j] != 0.0)

    def axis_rate(self, j, r):
        """Bound on the phase rate of the integrand along axis j at |r_j| = r."""
        col = self.Q[:, j]
        rate = abs(sum(q * d.lnx for q, d in zip(col, self.dims)))
        for q, d in zip(col, self.dims):
            if q != 0.0:
                rate = rate + abs(q) * d.fox.phase_rate(np.abs(q) * r)
        for coef, ws, _ in _outer_blocks(self.spec):
            wq = abs(float(np.dot(ws, col)))
            if wq > 1e-14:
                rate = rate + wq * np.log(2.0 + abs(coef) + wq * r)
        return rate


# coarse envelope grid: points per octave and the largest radius probed
_ENV_PER_OCTAVE = 2
_ENV_RMAX = 1e6
_ENV_MAX_POINTS = 2_000_000


def _envelope_truncation(f: _Integrand, h0s, tail_tol: float):
    """Per-axis half heights from the sampled sup-envelope of |f|.

    |f| is sampled on a coarse geometric tensor grid.  For each axis the
    maximum over the other axes gives an envelope E_j(r); the half height is
    the first point of a doubling ladder beyond which E_j(r) r stays below
    tail_tol times the peak.
    """
    M = len(h0s)
    axes = []
    for j, h0 in enumerate(h0s):
        n_oct = math.log2(_ENV_RMAX / (h0 / 8.0))
        pts = (h0 / 8.0) * 2.0 ** (np.arange(int(n_oct * _ENV_PER_OCTAVE) + 1) / _ENV_PER_OCTAVE)
        axes.append(np.concatenate([[0.0], pts]) if j == 0 else np.concatenate([-pts[::-1], [0.0], pts]))
    # thin the transverse grids if the tensor would be too large
    while math.prod(a.size for a in axes) > _ENV_MAX_POINTS:
        axes = [axes[0]] + [a[::2] if a.size > 9 else a for a in axes[1:]]
        if all(a.size <= 9 for a in axes[1:]):
            break
    with np.errstate(over="ignore", invalid="ignore"):
        chunks = []
        step = max(1, _ENV_MAX_POINTS // max(1, math.prod(a.size for a in axes[1:])))
        for i in range(0, axes[0].size, step):
            chunks.append(f([axes[0][i : i + step]] + axes[1:]).real)
        logf = np.concatenate(chunks, axis=0)
    logf = np.where(np.isfinite(logf), logf, -np.inf)
    peak = logf.max()
    if not math.isfinite(peak):
        raise NonConvergence("integrand vanishes on the sampled grid")
    out = []
    for j, (r, h0) in enumerate(zip(axes, h0s)):
        env = logf.max(axis=tuple(k for k in range(M) if k != j))
        ar = np.abs(r)
        score = env + np.log(np.maximum(ar, h0))
        above = ar[score > peak + math.log(tail_tol)]
        last = above.max() if above.size else h0
        if last >= ar.max():
            raise NonConvergence("integrand does not decay along the contour")
        T = h0 * 4.0
        while T < last * 2.0:
            T *= 2.0
        out.append(T)
    return out


def multivariate_fox_h(spec: MultiFoxHSpec, cfg: QuadratureConfig = DEFAULT_CONFIG, return_error=False):
    """Tensor-product Gauss-Legendre evaluation of an M-fold Mellin-Barnes integral.

    The grid lives in a frame aligned with the coupling Gamma factors (see
    :func:`_coupling_frame`); the first rotated variable is folded onto the
    half line using conjugate symmetry.
    """
    M = spec.dim
    if M > cfg.max_dim_exact:
        raise DimensionTooHigh(f"dimension {M} exceeds the exact-evaluation cap {cfg.max_dim_exact}")
    dims = _setup_dims(spec)
    n = cfg.gl_nodes_multi
    # the tolerated phase advance per panel scales with the node count
    osc = _OSC * n / 32.0
    f, h0s, Ts, hmax = min(
        (_grid_plan(spec, dims, Q, cfg.rel_tol * 1e-3, osc) for Q in _candidate_frames(spec)),
        key=lambda plan: plan[-1],
    )[:4]

    def level_value(level, nodes):
        rules = [_rule(_panel_edges(T, h0, hm, level, grade=1.0), nodes, symmetric=(j > 0))
                 for j, (T, h0, hm) in enumerate(zip(Ts, h0s, hmax))]
        total = math.prod(r[0].size for r in rules)
        if total > cfg.max_tensor_nodes:
            raise NonConvergence(f"tensor grid of {total} nodes exceeds max_tensor_nodes")
        return _tensor_sum(f, rules) * 2.0 / (2.0 * math.pi) ** M

    # lower-order rules on the same panels first: the difference between two
    # orders bounds the error of the coarser one, so the full order and panel
    # doubling are only paid for when that check fails
    stages = [(0, max(4, n // 2)), (0, max(4, (3 * n) // 4))] + [(level, n) for level in range(cfg.max_refinements)]
    prev = level_value(*stages[0])
    errors = []
    for stage in stages[1:]:
        cur = level_value(*stage)
        err = abs(cur - prev)
        errors.append(err)
        if err <= cfg.rel_tol * abs(cur) + cfg.abs_tol:
            return (cur, errors) if return_error else cur
        prev = cur
    raise NonConvergence(
        f"multivariate quadrature did not converge (last error {errors[-1]:.3e}, value {prev:.6e})"
    )


_CHUNK = 1_000_000


def _tensor_sum(f: _Integrand, rules) -> float:
    """Re sum of f * weights over the tensor grid.

    Chunks along the first axis are fixed by the grid alone and combined with
    math.fsum, so the result does not depend on how the work is scheduled.
    """
    axes = [r[0] for r in rules]
    logw = 0.0
    M = len(rules)
    for j, (_, w) in enumerate(rules):
        sh = [1] * M
        sh[j] = w.size
        logw = logw + np.log(w).reshape(sh)
    inner = math.prod(a.size for a in axes[1:])
    step = max(1, _CHUNK // max(inner, 1))
    parts = []
    for i in range(0, axes[0].size, step):
        sl = slice(i, i + step)
        lw = logw[sl] if M > 1 else logw[sl]
        with np.errstate(under="ignore"):
            vals = np.exp(f([axes[0][sl]] + axes[1:]) + lw)
        parts.append(float(np.sum(vals.real)))
    return math.fsum(parts)
