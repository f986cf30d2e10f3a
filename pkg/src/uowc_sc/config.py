"""Sweep configuration files.

A config is an INI-style text file read with :mod:`configparser`::

    [sweep]
    metric = ber              ; ber or capacity
    modulation = bpsk         ; preset name or "p, q"
    snr_db = 0, 60, 2         ; start, stop, step (stop included)
    methods = exact, quadrature
    output = out.csv

    [mc]
    samples = 1000000
    seed = 20240607
    workers = 1

    [series strong-N2]
    preset = strong
    n = 2
    a = 0.0075, 0.01          ; optional per-aperture overrides (one value or n values)

Every ``[series NAME]`` block is one aperture array; a block may override
``methods``, ``metric`` and ``snr_db``.  Keys recognised in a series block:
preset, n, omega, lam, a, b, c, a0, rho, fold_path_loss, methods, metric,
snr_db.
"""
from __future__ import annotations

import configparser
import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .channel import TURBULENCE_PRESETS, ApertureChannel, make_channel
from .diversity import ApertureArray
from .errors import ConfigError
from .metrics import ModulationParams, modulation
from .oracle import McConfig

__all__ = ["METHODS", "METRICS", "SeriesConfig", "SweepConfig", "load_config", "parse_config", "snr_grid"]

METHODS = ("exact", "approx", "asymptotic", "quadrature", "monte-carlo")
METRICS = ("ber", "capacity")
_EGG_KEYS = ("omega", "lam", "a", "b", "c")
_PT_KEYS = ("a0", "rho")
_SERIES_KEYS = set(_EGG_KEYS + _PT_KEYS + ("preset", "n", "fold_path_loss", "methods", "metric", "snr_db"))


@dataclass(frozen=True)
class SeriesConfig:
    name: str
    array: ApertureArray
    metric: str
    methods: tuple[str, ...]
    # None: use the sweep-wide grid
    snr_db_range: tuple[float, float, float] | None = None


@dataclass(frozen=True)
class SweepConfig:
    series: tuple[SeriesConfig, ...]
    snr_db_range: tuple[float, float, float]
    modulation: ModulationParams
    mc: McConfig = field(default_factory=McConfig)
    output_path: str | None = None

    def __post_init__(self):
        _check_range(self.snr_db_range)
        if not self.series:
            raise ConfigError("no series defined")
        for s in self.series:
            if not s.methods:
                raise ConfigError(f"series {s.name!r}: methods list is empty")
            if s.snr_db_range is not None:
                _check_range(s.snr_db_range)


def _check_range(rng):
    start, stop, step = rng
    if not start < stop:
        raise ConfigError("snr_db start must be below stop")
    if not step > 0:
        raise ConfigError("snr_db step must be positive")


def snr_grid(rng) -> np.ndarray:
    start, stop, step = rng
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return np.round(start + step * np.arange(n), 10)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise ConfigError(f"expected numbers, got {text!r}") from None


def _range(text: str) -> tuple[float, float, float]:
    rng = _floats(text)
    if len(rng) != 3:
        raise ConfigError("snr_db needs start, stop, step")
    return tuple(rng)


def parse_methods(text: str) -> tuple[str, ...]:
    items = tuple(m.strip() for m in text.split(",") if m.strip())
    if not items:
        raise ConfigError("methods list is empty")
    for m in items:
        if m not in METHODS:
            raise ConfigError(f"unknown method {m!r}; choose from {', '.join(METHODS)}")
    return items


def _metric(text: str) -> str:
    text = text.strip()
    if text not in METRICS:
        raise ConfigError(f"unknown metric {text!r}")
    return text


def parse_modulation(text: str) -> ModulationParams:
    text = text.strip()
    if "," in text or " " in text:
        vals = _floats(text)
        if len(vals) != 2:
            raise ConfigError("modulation needs a preset name or 'p, q'")
        return ModulationParams(*vals)
    return modulation(text)


def _per_aperture(name, key, text, n):
    vals = _floats(text)
    if len(vals) == 1:
        return vals * n
    if len(vals) != n:
        raise ConfigError(f"series {name!r}: {key} needs 1 or {n} values, got {len(vals)}")
    return vals


def build_array(name: str, sec) -> ApertureArray:
    unknown = set(sec) - _SERIES_KEYS
    if unknown:
        raise ConfigError(f"series {name!r}: unknown keys {sorted(unknown)}")
    preset = sec.get("preset", "strong").strip()
    if preset not in TURBULENCE_PRESETS:
        raise ConfigError(f"series {name!r}: unknown preset {preset!r}")
    try:
        n = int(sec.get("n", "1"))
    except ValueError:
        raise ConfigError(f"series {name!r}: n must be an integer") from None
    if n < 1:
        raise ConfigError(f"series {name!r}: n must be at least 1")
    base = make_channel(preset, 0.0, fold_path_loss=sec.get("fold_path_loss", "off").strip())
    overrides = {k: _per_aperture(name, k, sec[k], n) for k in _EGG_KEYS + _PT_KEYS if k in sec}
    chans = []
    for i in range(n):
        egg = dataclasses.replace(base.egg, **{k: overrides[k][i] for k in _EGG_KEYS if k in overrides})
        pt = dataclasses.replace(base.pointing, **{k: overrides[k][i] for k in _PT_KEYS if k in overrides})
        chans.append(ApertureChannel(egg, pt, 0.0, base.fold_path_loss))
    chans = tuple(chans)
    return ApertureArray(chans, iid=all(ch == chans[0] for ch in chans))


def parse_config(text: str) -> SweepConfig:
    """Parse config text; every problem surfaces as ConfigError."""
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"config syntax: {exc}") from None
    if not cp.has_section("sweep"):
        raise ConfigError("missing [sweep] section")
    sw = cp["sweep"]
    metric = _metric(sw.get("metric", "ber"))
    methods = parse_methods(sw.get("methods", ""))
    rng = _range(sw.get("snr_db", "0, 60, 2"))
    mod = parse_modulation(sw.get("modulation", "bpsk"))
    mc = McConfig()
    if cp.has_section("mc"):
        sec = cp["mc"]
        try:
            mc = McConfig(
                samples=int(float(sec.get("samples", mc.samples))),
                master_seed=int(sec.get("seed", mc.master_seed)),
                workers=int(sec.get("workers", mc.workers)),
            )
        except ValueError as exc:
            raise ConfigError(f"[mc]: {exc}") from None
    series = []
    for sect in cp.sections():
        if not sect.startswith("series"):
            if sect not in ("sweep", "mc"):
                raise ConfigError(f"unknown section [{sect}]")
            continue
        name = sect[len("series"):].strip() or f"s{len(series)}"
        sec = cp[sect]
        series.append(
            SeriesConfig(
                name=name,
                array=build_array(name, sec),
                metric=_metric(sec["metric"]) if "metric" in sec else metric,
                methods=parse_methods(sec["methods"]) if "methods" in sec else methods,
                snr_db_range=_range(sec["snr_db"]) if "snr_db" in sec else None,
            )
        )
    return SweepConfig(tuple(series), tuple(rng), mod, mc, sw.get("output"))


def load_config(path) -> SweepConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)
