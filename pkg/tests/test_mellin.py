import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from uowc_sc.errors import ContourInfeasible, DimensionTooHigh, PoleError
from uowc_sc.mellin import (
    FoxHSpec,
    MeijerGSpec,
    MultiFoxHSpec,
    QuadratureConfig,
    choose_contour,
    fox_h,
    log_gamma_complex,
    meijer_g,
    multivariate_fox_h,
    refinement_errors,
)

XS = (0.1, 0.5, 1.0, 2.0, 5.0, 10.0)
EXP = MeijerGSpec(1, 0, (), (0.0,))
RATIO = MeijerGSpec(1, 1, (1.0,), (1.0,))
RHO2 = 0.9875**2


def cdf_spec(r2=RHO2):
    return MeijerGSpec(2, 1, (1.0, r2 + 1.0), (1.0, r2, 0.0))


# log-Gamma


def test_log_gamma_trivial_values():
    assert abs(log_gamma_complex(1.0)) < 1e-15
    assert log_gamma_complex(0.5).real == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)


@pytest.mark.parametrize("z", [1 + 1j, 0.3 - 7j, -4.5 + 0.2j, 150 + 190j, -49.7 - 3j, 2 + 200j])
def test_log_gamma_against_mpmath(z):
    ref = complex(mpmath.loggamma(mpmath.mpc(z.real, z.imag)))
    got = complex(log_gamma_complex(z))
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


@given(st.floats(-50, 200), st.floats(-200, 200))
@settings(max_examples=60, deadline=None)
def test_log_gamma_exp_matches_gamma(re, im):
    z = complex(re, im)
    if abs(z - round(re)) < 1e-6 and round(re) <= 0:
        return
    ref = mpmath.loggamma(mpmath.mpc(re, im))
    got = complex(log_gamma_complex(z))
    # compare exp of both sides through the real part and the phase modulo 2 pi
    assert abs(got.real - float(ref.real)) <= 1e-12 * max(1.0, abs(float(ref.real)))
    dphase = (got.imag - float(ref.imag) + math.pi) % (2 * math.pi) - math.pi
    assert abs(dphase) <= 1e-12 * max(1.0, abs(float(ref.imag)))


@pytest.mark.parametrize("z", [0.0, -1.0, -7.0, -3.0 + 1e-13])
def test_log_gamma_pole_error(z):
    with pytest.raises(PoleError):
        log_gamma_complex(z)


# contour placement


def test_contour_single_pole_family():
    assert choose_contour(EXP).real_part > 0


@pytest.mark.parametrize("c_egg", [1.0, 216.8356])
def test_contour_inside_strip_by_enumeration(c_egg):
    a = 0.0075
    beta = RHO2 / c_egg
    spec = MeijerGSpec(2, 1, (1.0, beta + 1.0), (a, beta, 0.0))
    cont = choose_contour(spec)
    left_poles = [-a - k for k in range(20)] + [-beta - k for k in range(20)]
    right_poles = [k for k in range(0, 20)]  # Gamma(1 - 1 + s)... poles of Gamma(-s) at s = 0, 1, ...
    assert max(left_poles) < cont.real_part < min(right_poles)
    assert cont.half_height > 0 and cont.nodes >= 16


def test_contour_overlap_is_infeasible():
    spec = MeijerGSpec(1, 1, (0.0,), (1.5,))  # strip (-1.5, 1)
    bad = MeijerGSpec(1, 1, (2.0,), (0.0,))  # left edge 0, right edge -1
    choose_contour(spec)
    with pytest.raises(ContourInfeasible):
        choose_contour(bad)
    with pytest.raises(ContourInfeasible):
        meijer_g(bad, 1.0)


# identities and reductions


@pytest.mark.parametrize("x", XS)
def test_identity_suite(x):
    assert meijer_g(EXP, x) == pytest.approx(math.exp(-x), rel=1e-8)
    assert meijer_g(RATIO, x) == pytest.approx(x / (1 + x), rel=1e-8)


def test_fox_h_exponential_identity():
    assert fox_h(FoxHSpec(1, 0, (), ((0.0, 1.0),)), 2.0) == pytest.approx(math.exp(-2.0), rel=1e-10)


def test_cdf_term_against_residue_series():
    # G^{2,1}_{2,3}(1, r2+1; 1, r2, 0 | u) = sum over left poles of the residues
    u, r2 = 0.5, RHO2
    ref = mpmath.meijerg([[1], [r2 + 1]], [[1, r2], [0]], u)
    assert meijer_g(cdf_spec(r2), u) == pytest.approx(float(ref), rel=1e-10)


rng = np.random.default_rng(7)
GRID = [(float(rng.uniform(0.1, 3)), float(rng.uniform(0.05, 2)), float(np.exp(rng.uniform(-3, 3)))) for _ in range(20)]


@pytest.mark.parametrize("b1,b2,x", GRID)
def test_reduction_chain_random_grid(b1, b2, x):
    g = MeijerGSpec(2, 1, (1.0, b2 + 1.0), (b1, b2, 0.0))
    h = FoxHSpec(2, 1, ((1.0, 1.0), (b2 + 1.0, 1.0)), ((b1, 1.0), (b2, 1.0), (0.0, 1.0)))
    ref = meijer_g(g, x)
    assert fox_h(h, x) == pytest.approx(ref, rel=1e-10)
    assert multivariate_fox_h(MultiFoxHSpec((h,), (x,))) == pytest.approx(ref, rel=1e-10)


def test_fox_h_with_exponent_multipliers_against_mpmath():
    # H^{1,0}_{0,1}((b, B) | x) = x^{b/B} exp(-x^{1/B}) / B
    b, B, x = 0.7, 2.5, 1.7
    spec = FoxHSpec(1, 0, (), ((b, B),))
    ref = x ** (b / B) * math.exp(-(x ** (1 / B))) / B
    assert fox_h(spec, x) == pytest.approx(ref, rel=1e-9)


def test_conjugate_symmetry_of_the_integrand():
    spec = FoxHSpec(2, 1, ((1.0, 1.0), (1.97, 1.0)), ((0.0075, 1 / 216.8), (0.97, 1.0), (0.0, 1.0)))
    c, t = -0.003, np.linspace(0.1, 50, 40)
    up = spec.log_kernel(c + 1j * t)
    dn = spec.log_kernel(c - 1j * t)
    assert np.allclose(np.exp(up), np.conj(np.exp(dn)), rtol=1e-12, atol=0)


@pytest.mark.parametrize("x", XS)
def test_refinement_errors_do_not_grow(x):
    errs = refinement_errors(EXP, x, QuadratureConfig(rel_tol=1e-12, residues=False))
    assert all(b <= a * (1 + 1e-9) + 1e-16 for a, b in zip(errs, errs[1:]))


# multivariate


def test_multivariate_m1_exponential():
    spec = MultiFoxHSpec((FoxHSpec(1, 0, (), ((0.0, 1.0),)),), (0.8,))
    assert multivariate_fox_h(spec) == pytest.approx(math.exp(-0.8), rel=1e-10)


def test_multivariate_separable_product():
    e = FoxHSpec(1, 0, (), ((0.0, 1.0),))
    r = FoxHSpec(1, 1, ((1.0, 1.0),), ((1.0, 1.0),))
    got = multivariate_fox_h(MultiFoxHSpec((e, r), (0.5, 2.0)))
    assert got == pytest.approx(math.exp(-0.5) * 2.0 / 3.0, rel=1e-8)


@pytest.mark.parametrize("p,x1,x2", [(1.0, 0.5, 2.0), (0.5, 1.0, 1.0), (2.5, 3.0, 0.2)])
def test_multivariate_coupled_closed_form(p, x1, x2):
    # (2 pi i)^-2 int int Gamma(s1) Gamma(s2) Gamma(p - s1 - s2) x1^-s1 x2^-s2 = Gamma(p) / (1 + x1 + x2)^p
    e = FoxHSpec(1, 0, (), ((0.0, 1.0),))
    spec = MultiFoxHSpec((e, e), (x1, x2), outer_upper=((p, (-1.0, -1.0)),))
    ref = math.gamma(p) / (1 + x1 + x2) ** p
    assert multivariate_fox_h(spec, QuadratureConfig(rel_tol=1e-8)) == pytest.approx(ref, rel=1e-7)


def test_dimension_cap():
    e = FoxHSpec(1, 0, (), ((0.0, 1.0),))
    with pytest.raises(DimensionTooHigh):
        multivariate_fox_h(MultiFoxHSpec((e,) * 4, (1.0,) * 4), QuadratureConfig(max_dim_exact=3))


@given(st.floats(0.05, 20.0))
@settings(max_examples=25, deadline=None)
def test_property_ratio_identity(x):
    assert meijer_g(RATIO, x) == pytest.approx(x / (1 + x), rel=1e-8)


@given(st.floats(0.05, 3.0), st.floats(0.05, 3.0), st.floats(0.01, 100.0))
@settings(max_examples=25, deadline=None)
def test_property_cdf_term_is_a_distribution(b1, b2, x):
    # weight * G^{2,1}_{2,3} is the CDF of a product of independent variates: within (0, 1)
    g = MeijerGSpec(2, 1, (1.0, b2 + 1.0), (b1, b2, 0.0))
    val = b2 * meijer_g(g, x) / math.gamma(b1)
    assert -1e-9 < val < 1 + 1e-9
