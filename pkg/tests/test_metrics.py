import dataclasses
import math
import warnings

import numpy as np
import pytest

from conftest import PAPER_PRESETS, iid, omega0
from uowc_sc.channel import TURBULENCE_PRESETS, make_channel
from uowc_sc.diversity import ApertureArray
from uowc_sc.errors import ConfigError, PreconditionViolation, TieWarning
from uowc_sc.metrics import (
    AsymptoticResult,
    KernelTransform,
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
    modulation,
)
from uowc_sc.oracle import McConfig, ber_monte_carlo, ber_quadrature, capacity_monte_carlo, capacity_quadrature


def rel(a, b):
    return abs(a / b - 1.0)


def strong_w0(snr_db, n=1):
    return ApertureArray.identical(make_channel(omega0("strong"), snr_db), n)


# parameters


def test_modulation_rejects_bad_params():
    with pytest.raises(ConfigError):
        ModulationParams(0.0, 1.0)
    with pytest.raises(ConfigError):
        ModulationParams(1.0, -2.0)
    with pytest.raises(ConfigError):
        modulation("qam")


def test_kernel_transform_tags():
    with pytest.raises(ConfigError):
        KernelTransform("nope")
    with pytest.raises(ConfigError):
        KernelTransform("ber_kernel")
    outer, scale, _ = KernelTransform("ber_kernel", ModulationParams(0.5, 2.0)).ber_blocks([0.5])
    assert outer == ((0.5, (-0.5,)),)
    assert scale[0] == pytest.approx(2.0**-0.5)


def test_asymptotic_result_needs_positive_order():
    with pytest.raises(ValueError):
        AsymptoticResult(1.0, 0.0)
    r = AsymptoticResult(2.0, 1.0)
    assert r(10.0) == pytest.approx(0.2)


# exact BER


def test_single_aperture_ber_matches_oracle(dpsk):
    arr = iid("strong", 1, 30.0)
    assert rel(ber_inid_exact(arr, dpsk), ber_quadrature(arr, dpsk)) < 1e-4
    assert rel(ber_iid_exact(arr, dpsk), ber_quadrature(arr, dpsk)) < 1e-4


def test_inid_pair_matches_oracle(dpsk):
    arr = ApertureArray((make_channel("strong", 40.0), make_channel("inid-varied", 40.0)))
    assert rel(ber_inid_exact(arr, dpsk), ber_quadrature(arr, dpsk)) < 1e-3


@pytest.mark.parametrize("preset", ["strong", "weak"])
def test_inid_with_identical_channels_equals_iid(preset, bpsk):
    ch = make_channel(preset, 30.0)
    a = ber_inid_exact(ApertureArray((ch, ch)), bpsk)
    b = ber_iid_exact(ApertureArray.identical(ch, 2), bpsk)
    assert rel(a, b) < 1e-6


def test_iid_pair_matches_oracle(bpsk):
    arr = iid("strong", 2, 40.0)
    assert rel(ber_iid_exact(arr, bpsk), ber_quadrature(arr, bpsk)) < 1e-3


def test_iid_exact_needs_identical_channels(bpsk):
    arr = ApertureArray((make_channel("strong", 30.0), make_channel("weak", 30.0)))
    with pytest.raises(PreconditionViolation):
        ber_iid_exact(arr, bpsk)


def test_ber_monotone_in_snr_and_n(bpsk):
    grid = [0.0, 10.0, 20.0, 30.0, 40.0]
    prev_curve = None
    for n in (1, 2):
        curve = [ber_iid_exact(iid("strong", n, s), bpsk) for s in grid]
        assert all(0 < v <= 0.5 for v in curve)
        assert np.all(np.diff(curve) <= 0)
        if prev_curve is not None:
            assert all(v <= u for v, u in zip(curve, prev_curve))
        prev_curve = curve


# approximation


def test_approx_single_aperture_equals_exact(bpsk):
    arr = iid("strong", 1, 30.0)
    assert rel(ber_iid_approx(arr, bpsk), ber_iid_exact(arr, bpsk)) < 1e-6


def test_approx_three_apertures_against_monte_carlo(bpsk):
    arr = iid("strong", 3, 50.0)
    mc = ber_monte_carlo(arr, bpsk, McConfig(samples=10_000_000, master_seed=11))
    assert abs(ber_iid_approx(arr, bpsk) - mc.estimate) < 3 * mc.std_error + 0.1 * mc.estimate


# diversity and asymptotics


def test_diversity_order_strong_five():
    assert diversity_order(iid("strong", 5)) == pytest.approx(5 * 0.9875**2 / 2, rel=1e-12)
    assert diversity_order(iid("strong", 5)) == pytest.approx(2.4378, abs=1e-4)


def test_diversity_order_without_pointing_error():
    for n in (1, 3):
        assert diversity_order(iid("weak", n, rho=1e3)) == pytest.approx(n / 2)


def test_diversity_order_inid_sums_apertures():
    arr = ApertureArray((make_channel("strong", 30.0), make_channel("weak", 30.0, rho=0.5)))
    assert diversity_order(arr) == pytest.approx(0.9875**2 / 2 + 0.125)


def test_diversity_order_tie_warns():
    with pytest.warns(TieWarning):
        assert diversity_order(iid("weak", 2, rho=1.0)) == pytest.approx(1.0)


def test_exact_slope_approaches_diversity_order(bpsk):
    arr = iid("strong", 2)
    b50 = ber_iid_exact(arr.with_snr(50.0), bpsk)
    b60 = ber_iid_exact(arr.with_snr(60.0), bpsk)
    slope = -math.log10(b60 / b50)
    assert slope == pytest.approx(diversity_order(arr), rel=0.1)


@pytest.mark.parametrize("n", [1, 2])
def test_asymptote_tracks_exact_at_high_snr(n, bpsk):
    arr = iid("strong", n, 60.0)
    asym = ber_asymptotic(arr, bpsk)
    assert asym.diversity_order == pytest.approx(diversity_order(arr))
    assert asym(60.0) == pytest.approx(ber_iid_exact(arr, bpsk), rel=0.02)


def test_asymptote_falls_back_on_coincident_poles(bpsk):
    arr = iid("weak", 1, 30.0, rho=1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TieWarning)
        asym = ber_asymptotic(arr, bpsk)
    assert asym.diversity_order == pytest.approx(0.5)
    assert asym(60.0) == pytest.approx(ber_iid_exact(arr.with_snr(60.0), bpsk), rel=1e-6)


# omega = 0


def test_omega0_single_aperture_matches_oracle(bpsk):
    arr = strong_w0(30.0)
    assert rel(ber_omega0(arr, bpsk), ber_quadrature(arr, bpsk)) < 1e-4


@pytest.mark.parametrize("n", [1, 2])
def test_exact_paths_accept_zero_omega(n, bpsk):
    arr = strong_w0(30.0, n)
    ref = ber_quadrature(arr, bpsk)
    assert rel(ber_iid_exact(arr, bpsk), ref) < 1e-4
    assert rel(ber_inid_exact(arr, bpsk), ref) < 1e-4


@pytest.mark.parametrize("n", [2, 3])
def test_omega0_agrees_with_equal_contour_approx(n, bpsk):
    arr = strong_w0(40.0, n)
    assert rel(ber_omega0(arr, bpsk), ber_iid_approx(arr, bpsk)) < 1e-3


@pytest.mark.parametrize("n", [1, 2])
def test_omega0_asymptote_ratio(n, bpsk):
    arr = strong_w0(70.0, n)
    assert ber_omega0_asymptotic(arr, bpsk) / ber_omega0(arr, bpsk) == pytest.approx(1.0, abs=0.1)


def test_omega0_requires_zero_omega(bpsk):
    with pytest.raises(PreconditionViolation):
        ber_omega0(iid("strong", 2), bpsk)
    with pytest.raises(PreconditionViolation):
        capacity_iid_exact_omega0(iid("strong", 1))
    with pytest.raises(PreconditionViolation):
        capacity_iid_approx_omega0(iid("strong", 2))


# capacity


def test_capacity_single_aperture_matches_oracle():
    arr = iid("strong", 1, 20.0)
    assert rel(capacity_inid_exact(arr), capacity_quadrature(arr)) < 1e-3


def test_capacity_identical_pair_inid_equals_iid_path():
    ch = make_channel(omega0("strong"), 30.0)
    a = capacity_inid_exact(ApertureArray((ch, ch)))
    b = capacity_iid_exact_omega0(ApertureArray.identical(ch, 2))
    assert rel(a, b) < 1e-4


def test_capacity_omega0_single_aperture_matches_oracle():
    arr = strong_w0(30.0)
    assert rel(capacity_iid_exact_omega0(arr), capacity_quadrature(arr)) < 1e-3


def test_capacity_omega0_monotone_in_snr():
    vals = [capacity_iid_exact_omega0(strong_w0(s)) for s in np.linspace(0.0, 45.0, 10)]
    assert np.all(np.diff(vals) >= 0)


def test_capacity_omega0_pair_against_monte_carlo():
    arr = strong_w0(30.0, 2)
    mc = capacity_monte_carlo(arr, McConfig(samples=10_000_000, master_seed=12))
    assert abs(capacity_iid_exact_omega0(arr) - mc.estimate) < 3 * mc.std_error


def test_capacity_monotone_in_n():
    vals = [capacity_inid_exact(iid("weak", n, 20.0)) for n in (1, 2)]
    assert vals[1] > vals[0] > 0


def test_capacity_approx_pair_matches_exact():
    arr = strong_w0(30.0, 2)
    assert rel(capacity_iid_approx_omega0(arr), capacity_iid_exact_omega0(arr)) < 0.05


def test_capacity_approx_single_aperture_matches_oracle():
    arr = strong_w0(30.0)
    assert rel(capacity_iid_approx_omega0(arr), capacity_quadrature(arr)) < 1e-3


def test_capacity_approx_match_point_is_validated():
    with pytest.raises(ConfigError):
        capacity_iid_approx_omega0(strong_w0(30.0, 3), match_point="middle")


def test_capacity_approx_error_shrinks_with_snr():
    errs = []
    for s in (20.0, 30.0, 40.0, 50.0, 60.0):
        arr = strong_w0(s, 3)
        errs.append(rel(capacity_iid_approx_omega0(arr), capacity_quadrature(arr)))
    assert all(b < a for a, b in zip(errs, errs[1:])), errs


@pytest.mark.parametrize("preset", PAPER_PRESETS)
def test_capacity_matches_oracle_on_presets(preset):
    arr = iid(preset, 1, 30.0)
    assert rel(capacity_inid_exact(arr), capacity_quadrature(arr)) < 1e-3


def test_omega0_preset_helper_is_gg_only():
    assert omega0("strong") == dataclasses.replace(TURBULENCE_PRESETS["strong"], omega=0.0)
