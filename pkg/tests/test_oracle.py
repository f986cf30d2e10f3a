import math

import numpy as np
import pytest
from scipy import special, stats

from conftest import PAPER_PRESETS, iid
from uowc_sc import oracle
from uowc_sc.channel import make_channel
from uowc_sc.diversity import ApertureArray
from uowc_sc.errors import ConfigError
from uowc_sc.oracle import (
    McConfig,
    ber_monte_carlo,
    ber_quadrature,
    capacity_monte_carlo,
    capacity_quadrature,
    conditional_ber,
    empirical_cdf_check,
    integrate_log_domain,
)


def test_conditional_ber_limits(bpsk, dpsk):
    assert conditional_ber(0.0, bpsk.p, bpsk.q) == 0.5
    assert conditional_ber(1e4, dpsk.p, dpsk.q) == 0.0
    g = np.logspace(-3, 1.5, 20)
    # BPSK is Q(sqrt(2 g)), DPSK is exp(-g)/2
    assert np.allclose(conditional_ber(g, bpsk.p, bpsk.q), 0.5 * special.erfc(np.sqrt(g)), rtol=1e-12)
    assert np.allclose(conditional_ber(g, dpsk.p, dpsk.q), 0.5 * np.exp(-g), rtol=1e-12)


def test_log_domain_quadrature_on_a_known_integral():
    # int_0^inf g e^{-g} dg = 1 written in u = ln g
    val = integrate_log_domain(lambda u: np.exp(2 * u - np.exp(u)), -40.0, 5.0, splits=(0.0,), rel_tol=1e-10)
    assert val == pytest.approx(1.0, rel=1e-10)


def test_mc_config_validation():
    with pytest.raises(ConfigError):
        McConfig(samples=0)
    with pytest.raises(ConfigError):
        McConfig(workers=0)
    with pytest.raises(ConfigError):
        McConfig(master_seed=-1)


# quadrature harness checks


@pytest.mark.parametrize("mod", ["bpsk", "dpsk"])
def test_ber_with_unit_cdf_is_one_half(mod, request):
    m = request.getfixturevalue(mod)
    val = ber_quadrature(iid("strong", 1, 30.0), m, cdf=lambda g: np.ones_like(g))
    assert val == pytest.approx(0.5, rel=1e-9)


def test_capacity_of_a_point_mass_at_one():
    # a lognormal of width 1e-4 around gamma = 1 stands in for the point mass
    s = 1e-4
    val = capacity_quadrature(iid("strong", 1, 0.0), pdf=lambda g: stats.lognorm.pdf(g, s))
    assert val == pytest.approx(1.0, abs=1e-6)


def test_ber_quadrature_single_aperture_against_monte_carlo(dpsk):
    arr = iid("strong", 1, 30.0)
    mc = ber_monte_carlo(arr, dpsk, McConfig(samples=2_000_000, master_seed=5))
    assert abs(ber_quadrature(arr, dpsk) - mc.estimate) < 3 * mc.std_error


# Monte Carlo


def _constant_sampler(value):
    def sample(arr, rng, size=None):
        rng.random(size)
        return np.full(size, float(value))

    return sample


def test_mc_zero_snr_gives_one_half(monkeypatch, bpsk):
    monkeypatch.setattr(oracle, "sample_sc_snr", _constant_sampler(0.0))
    r = ber_monte_carlo(iid("strong", 1), bpsk, McConfig(samples=10_000))
    assert r.estimate == 0.5 and r.std_error == 0.0 and r.samples_used == 10_000


def test_mc_constant_snr_three_gives_two_bits(monkeypatch):
    monkeypatch.setattr(oracle, "sample_sc_snr", _constant_sampler(3.0))
    r = capacity_monte_carlo(iid("strong", 1), McConfig(samples=10_000))
    assert r.estimate == pytest.approx(2.0, rel=1e-15)


def test_mc_pair_against_quadrature(bpsk):
    arr = iid("strong", 2, 40.0)
    mc = ber_monte_carlo(arr, bpsk, McConfig(samples=10_000_000, master_seed=21))
    assert abs(mc.estimate - ber_quadrature(arr, bpsk)) < 3 * mc.std_error


@pytest.mark.parametrize("kind", ["ber", "capacity"])
def test_mc_is_identical_across_worker_counts(kind, bpsk):
    arr = iid("strong", 2, 30.0)
    results = []
    for w in (1, 4, 16):
        cfg = McConfig(samples=300_000, master_seed=77, workers=w)
        results.append(ber_monte_carlo(arr, bpsk, cfg) if kind == "ber" else capacity_monte_carlo(arr, cfg))
    assert results[0] == results[1] == results[2]


def test_mc_samples_are_not_a_multiple_of_the_block():
    r = capacity_monte_carlo(iid("weak", 1, 10.0), McConfig(samples=oracle.BLOCK + 17))
    assert r.samples_used == oracle.BLOCK + 17


def test_mc_capacity_weak_against_quadrature():
    arr = iid("weak", 1, 30.0)
    mc = capacity_monte_carlo(arr, McConfig(samples=2_000_000, master_seed=8))
    assert abs(mc.estimate - capacity_quadrature(arr)) < 3 * mc.std_error


def test_mc_capacity_grows_with_n():
    vals = [capacity_monte_carlo(iid("strong", n, 30.0), McConfig(samples=200_000, master_seed=9)).estimate for n in (1, 2, 5)]
    assert vals[0] < vals[1] < vals[2]


@pytest.mark.parametrize(
    "arr",
    [
        iid("weak", 1, 20.0),
        iid("moderate-a", 2, 20.0),
        ApertureArray((make_channel("strong", 30.0), make_channel("inid-varied", 25.0))),
    ],
    ids=["weak-N1", "moderate-a-N2", "inid-pair"],
)
def test_empirical_cdf_check(arr):
    report = empirical_cdf_check(arr, McConfig(samples=1_000_000, master_seed=3))
    assert report["grid"].size == 50
    assert report["passed"], report["max_z"]


@pytest.mark.parametrize("preset", PAPER_PRESETS)
def test_quadrature_and_monte_carlo_agree_across_the_grid(preset, bpsk):
    mc = McConfig(samples=1_000_000, master_seed=31)
    for n in (1, 2, 5):
        for snr in (10.0, 30.0, 50.0):
            arr = iid(preset, n, snr)
            r = ber_monte_carlo(arr, bpsk, mc)
            q = ber_quadrature(arr, bpsk)
            assert abs(r.estimate - q) < 3 * r.std_error + 1e-15, (n, snr, r, q)


def test_quadrature_works_beyond_the_fox_h_cap(bpsk):
    val = ber_quadrature(iid("strong", 12, 30.0), bpsk)
    assert 0 < val < ber_quadrature(iid("strong", 5, 30.0), bpsk)
    assert math.isfinite(capacity_quadrature(iid("strong", 12, 30.0)))
