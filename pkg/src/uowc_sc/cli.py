"""Command-line front end: ``uowc-sc {ber,capacity,sweep,validate}``.

Sweeps write CSV rows ``snr_db,metric,method,value,std_error,runtime_ms``
followed by ``error`` (empty on success) and ``series``.  Exit codes: 0 on
success, 1 when any row or check failed, 2 for configuration errors.
"""
from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import sys
import time
import warnings
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import metrics, oracle
from .channel import TURBULENCE_PRESETS, make_channel, snr_cdf, snr_pdf
from .config import (
    METHODS,
    SeriesConfig,
    SweepConfig,
    build_array,
    load_config,
    parse_methods,
    parse_modulation,
    snr_grid,
)
from .diversity import ApertureArray
from .errors import ConfigError, DimensionTooHigh, SizeLimit, TieWarning, UowcError
from .mellin import FoxHSpec, MeijerGSpec, MultiFoxHSpec, fox_h, meijer_g, multivariate_fox_h
from .oracle import McConfig

HEADER = ("snr_db", "metric", "method", "value", "std_error", "runtime_ms", "error", "series")
ROUTED = "->quadrature"


# ---------------------------------------------------------------------------
# one sweep point


def _exact(arr: ApertureArray, metric: str, mod):
    if metric == "ber":
        return metrics.ber_iid_exact(arr, mod) if arr.iid else metrics.ber_inid_exact(arr, mod)
    return metrics.capacity_inid_exact(arr)


def _approx(arr: ApertureArray, metric: str, mod):
    if metric == "ber":
        return metrics.ber_iid_approx(arr, mod)
    return metrics.capacity_iid_approx_omega0(arr)


def _asymptotic(arr: ApertureArray, metric: str, mod, snr):
    if metric != "ber":
        raise ConfigError("no asymptotic capacity expression")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TieWarning)
        return metrics.ber_asymptotic(arr, mod)(snr)


def evaluate_point(series: SeriesConfig, snr: float, method: str, mod, mc: McConfig, timing: bool = True) -> dict:
    """One CSV row; evaluator failures land in the error column."""
    arr = series.array.with_snr(snr)
    metric = series.metric
    row = {"snr_db": snr, "metric": metric, "method": method, "value": "", "std_error": "",
           "runtime_ms": "", "error": "", "series": series.name}
    t0 = time.perf_counter()
    try:
        if method == "exact":
            try:
                value = _exact(arr, metric, mod)
            except (DimensionTooHigh, SizeLimit):
                # beyond the exact-evaluation cap: fall back to the 1-D oracle and say so
                row["method"] = method + ROUTED
                value = _quadrature(arr, metric, mod)
        elif method == "approx":
            value = _approx(arr, metric, mod)
        elif method == "asymptotic":
            value = _asymptotic(arr, metric, mod, snr)
        elif method == "quadrature":
            value = _quadrature(arr, metric, mod)
        elif method == "monte-carlo":
            res = oracle.ber_monte_carlo(arr, mod, mc) if metric == "ber" else oracle.capacity_monte_carlo(arr, mc)
            value = res.estimate
            row["std_error"] = _fmt(res.std_error)
        else:
            raise ConfigError(f"unknown method {method!r}")
        if not math.isfinite(value) or value < 0 or (metric == "ber" and value > 0.5 + 1e-9):
            raise UowcError(f"value {value!r} outside the admissible range")
        row["value"] = _fmt(value)
    except (UowcError, ValueError, ArithmeticError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}".replace("\n", " ")
    if timing:
        row["runtime_ms"] = f"{1e3 * (time.perf_counter() - t0):.1f}"
    return row


def _quadrature(arr, metric, mod):
    return oracle.ber_quadrature(arr, mod) if metric == "ber" else oracle.capacity_quadrature(arr)


def _fmt(v: float) -> str:
    return repr(float(v))


def _point_task(args):
    return evaluate_point(*args)


def run_sweep(cfg: SweepConfig, workers: int = 1, timing: bool = True) -> list[dict]:
    """All rows of a sweep ordered by (series, metric, method, snr_db)."""
    tasks = []
    for s in cfg.series:
        for method in s.methods:
            for snr in snr_grid(s.snr_db_range or cfg.snr_db_range):
                tasks.append((s, float(snr), method, cfg.modulation, cfg.mc, timing))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_point_task, tasks))
    else:
        rows = [_point_task(t) for t in tasks]
    order = {s.name: i for i, s in enumerate(cfg.series)}
    rows.sort(key=lambda r: (order[r["series"]], r["metric"], r["method"].replace(ROUTED, ""), r["snr_db"]))
    return rows


def write_csv(rows, path=None) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=HEADER, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{r[k]:g}" if k == "snr_db" else r[k]) for k in HEADER})
    text = buf.getvalue()
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text


# ---------------------------------------------------------------------------
# validate


def _rel(a, b):
    return abs(a - b) / abs(b)


def _pdf_mass(ch):
    ln_g = math.log(ch.effective_snr)
    fn = lambda u: snr_pdf(ch, np.exp(u)) * np.exp(u)  # noqa: E731
    lo, hi = oracle._trim_window(fn, ln_g - 80.0, ln_g + 30.0)
    return oracle.integrate_log_domain(fn, lo, hi, splits=(ln_g,), rel_tol=1e-8)


def validation_checks(seed: int = 20240607):
    """(name, callable returning (passed, detail)) pairs of the invariant suite."""
    checks = []
    xs = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)

    def identities():
        e = MeijerGSpec(1, 0, (), (0.0,))
        r = MeijerGSpec(1, 1, (1.0,), (1.0,))
        worst = max(max(_rel(meijer_g(e, x), math.exp(-x)), _rel(meijer_g(r, x), x / (1 + x))) for x in xs)
        return worst < 1e-8, f"max rel err {worst:.2e}"

    def reductions():
        fx = FoxHSpec(2, 1, ((1.0, 1.0), (1.9751, 1.0)), ((1.0, 1.0), (0.9751, 1.0), (0.0, 1.0)))
        g = MeijerGSpec(2, 1, (1.0, 1.9751), (1.0, 0.9751, 0.0))
        worst = 0.0
        for x in xs:
            ref = meijer_g(g, x)
            worst = max(worst, _rel(fox_h(fx, x), ref), _rel(multivariate_fox_h(MultiFoxHSpec((fx,), (x,))), ref))
        return worst < 1e-10, f"max rel err {worst:.2e}"

    checks += [("identity suite", identities), ("reduction chain", reductions)]

    for name in ("weak", "moderate-a", "moderate-b", "strong"):
        def norm(name=name):
            ch = make_channel(name, 30.0)
            m = _pdf_mass(ch)
            g = ch.effective_snr
            # the pointing tail decays like gamma^(rho^2/2), so the lower limit
            # is probed far below the bulk
            lo, hi = snr_cdf(ch, g * 1e-40), snr_cdf(ch, g * 1e6)
            ok = abs(m - 1) < 1e-4 and lo < 1e-6 and 1 - hi < 1e-6
            return ok, f"mass {m:.8f}, F(1e-40 gbar) {lo:.1e}, 1-F(1e6 gbar) {1 - hi:.1e}"
        checks.append((f"normalization {name}", norm))

    bpsk = metrics.MODULATION_PRESETS["bpsk"]
    for n in (1, 2):
        def ber_agree(n=n):
            arr = ApertureArray.identical(make_channel("strong", 30.0), n)
            a, b = metrics.ber_iid_exact(arr, bpsk), oracle.ber_quadrature(arr, bpsk)
            return _rel(a, b) < 1e-3, f"exact {a:.8g} quadrature {b:.8g}"

        def cap_agree(n=n):
            arr = ApertureArray.identical(make_channel("strong", 30.0), n)
            a, b = metrics.capacity_inid_exact(arr), oracle.capacity_quadrature(arr)
            return _rel(a, b) < 1e-3, f"exact {a:.8g} quadrature {b:.8g}"
        checks += [(f"ber exact vs oracle N={n}", ber_agree), (f"capacity exact vs oracle N={n}", cap_agree)]

    mc = McConfig(samples=200_000, master_seed=seed)

    def mc_agree():
        arr = ApertureArray.identical(make_channel("strong", 30.0), 2)
        r, q = oracle.ber_monte_carlo(arr, bpsk, mc), oracle.ber_quadrature(arr, bpsk)
        z = abs(r.estimate - q) / r.std_error
        return z < 3.0, f"|MC - quadrature| = {z:.2f} std errors"

    def seed_stable():
        arr = ApertureArray.identical(make_channel("strong", 30.0), 2)
        a = oracle.ber_monte_carlo(arr, bpsk, mc)
        b = oracle.ber_monte_carlo(arr, bpsk, dataclasses.replace(mc, workers=4))
        return a == b, f"{a.estimate!r} vs {b.estimate!r}"

    checks += [("monte carlo vs quadrature", mc_agree), ("seed stability", seed_stable)]

    for n in (1, 2):
        def slope(n=n):
            arr = ApertureArray.identical(make_channel("strong", 50.0), n)
            b50 = metrics.ber_iid_exact(arr, bpsk)
            b60 = metrics.ber_iid_exact(arr.with_snr(60.0), bpsk)
            s = math.log10(b50 / b60)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TieWarning)
                gd = metrics.diversity_order(arr)
            return abs(s / gd - 1) < 0.1, f"slope {s:.4f} vs G_d {gd:.4f}"
        checks.append((f"diversity slope 50-60 dB N={n}", slope))
    return checks


def run_validate(out=sys.stdout, seed: int = 20240607) -> int:
    failed = 0
    for name, fn in validation_checks(seed):
        try:
            ok, detail = fn()
        except UowcError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        failed += not ok
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}", file=out, flush=True)
    print(f"{'all checks passed' if not failed else f'{failed} check(s) failed'}", file=out)
    return 0 if not failed else 1


# ---------------------------------------------------------------------------
# argument handling


def _snr_range(text: str):
    parts = text.split(":")
    try:
        vals = [float(p) for p in parts]
    except ValueError:
        raise ConfigError(f"--snr-db expects X or START:STOP:STEP, got {text!r}") from None
    if len(vals) == 1:
        # a single point is a one-element range
        return (vals[0], vals[0] + 1.0, 2.0)
    if len(vals) != 3:
        raise ConfigError(f"--snr-db expects X or START:STOP:STEP, got {text!r}")
    return tuple(vals)


def _single_series_config(args, metric: str) -> SweepConfig:
    if args.config:
        cfg = load_config(args.config)
        cfg = dataclasses.replace(
            cfg, series=tuple(dataclasses.replace(s, metric=metric) for s in cfg.series)
        )
    else:
        if args.preset not in TURBULENCE_PRESETS:
            raise ConfigError(f"unknown preset {args.preset!r}")
        sec = {"preset": args.preset, "n": str(args.n)}
        for key in ("omega", "lam", "a", "b", "c", "a0", "rho"):
            v = getattr(args, key)
            if v is not None:
                sec[key] = v
        series = SeriesConfig(f"{args.preset}-N{args.n}", build_array("cli", sec), metric, ("exact",))
        cfg = SweepConfig((series,), (0.0, 1.0, 1.0), parse_modulation(args.modulation))
    if args.method:
        methods = parse_methods(args.method)
        cfg = dataclasses.replace(cfg, series=tuple(dataclasses.replace(s, methods=methods) for s in cfg.series))
    if args.snr_db is not None:
        series = tuple(dataclasses.replace(s, snr_db_range=None) for s in cfg.series)
        cfg = dataclasses.replace(cfg, snr_db_range=_snr_range(args.snr_db), series=series)
    return cfg


def _apply_common(cfg: SweepConfig, args) -> SweepConfig:
    mc = cfg.mc
    if args.seed is not None:
        mc = dataclasses.replace(mc, master_seed=args.seed)
    if args.samples is not None:
        mc = dataclasses.replace(mc, samples=args.samples)
    return dataclasses.replace(cfg, mc=mc)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="uowc-sc", description="BER and ergodic capacity of SC multi-aperture UOWC links.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="sweep config file")
        sp.add_argument("--seed", type=int, help="Monte Carlo master seed")
        sp.add_argument("--samples", type=int, help="Monte Carlo sample count")
        sp.add_argument("--out", help="CSV output path (default stdout)")
        sp.add_argument("--workers", type=int, default=1, help="processes for sweep points")
        sp.add_argument("--no-timing", action="store_true", help="leave runtime_ms empty for byte-stable output")

    for name in ("ber", "capacity"):
        sp = sub.add_parser(name, help=f"{name} at one SNR or over a range")
        common(sp)
        sp.add_argument("--preset", default="strong", help="turbulence preset")
        sp.add_argument("--n", type=int, default=1, help="number of apertures")
        sp.add_argument("--snr-db", help="X or START:STOP:STEP (stop included)")
        sp.add_argument("--method", help=f"comma list from {', '.join(METHODS)} (default exact)")
        sp.add_argument("--modulation", default="bpsk", help="bpsk, dpsk or 'p,q'")
        for key in ("omega", "lam", "a", "b", "c", "a0", "rho"):
            sp.add_argument(f"--{key}", help=f"override {key} (one value or one per aperture)")
    sp = sub.add_parser("sweep", help="run a sweep config")
    common(sp)
    sp.add_argument("--method", help="override the methods of every series")
    sp = sub.add_parser("validate", help="run the invariant suite")
    sp.add_argument("--config", help="also check that this config parses")
    sp.add_argument("--seed", type=int, default=20240607)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "validate":
            if args.config:
                load_config(args.config)
                print(f"PASS  config {args.config}")
            return run_validate(seed=args.seed)
        if args.command == "sweep":
            if not args.config:
                raise ConfigError("sweep needs --config")
            cfg = load_config(args.config)
            if args.method:
                methods = parse_methods(args.method)
                cfg = dataclasses.replace(cfg, series=tuple(dataclasses.replace(s, methods=methods) for s in cfg.series))
        else:
            cfg = _single_series_config(args, args.command)
        cfg = _apply_common(cfg, args)
        if args.workers < 1:
            raise ConfigError("--workers must be positive")
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    rows = run_sweep(cfg, workers=args.workers, timing=not args.no_timing)
    out = args.out or cfg.output_path
    text = write_csv(rows, out)
    if not out:
        sys.stdout.write(text)
    failed = [r for r in rows if r["error"]]
    for r in failed:
        print(f"row failed: {r['series']} {r['method']} {r['snr_db']} dB: {r['error']}", file=sys.stderr)
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
