import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twointerval import model
from twointerval.errors import BranchPointError, ConfigurationError
from twointerval.gaussian_core import CovarianceKind
from twointerval.rh.fisher_hartwig import (Side, fh_data, fh_exponent, mean_log_symbol,
                                           szego_check, x_log_inside, x_log_outside)
from twointerval.symbol import from_occupation, from_profile, from_step

PLAIN, NEG = CovarianceKind.PLAIN, CovarianceKind.NEGATIVITY
HALF = from_step(math.pi / 2)
SMOOTH = from_profile(1.1, lambda p: 0.6 + 0.3 * np.cos(p), grid_size=24)


def random_lambdas(count, seed):
    rng = np.random.default_rng(seed)
    re = rng.uniform(-3, 3, count)
    im = rng.uniform(0.1, 3, count) * rng.choice([-1, 1], count)
    return re + 1j * im


# -- exponents ------------------------------------------------------------------
def test_exponent_closed_form_at_two():
    beta = fh_exponent(2.0, 1.0, -1.0, 1.0)
    assert beta == pytest.approx(-1j * math.log(3) / (2 * math.pi), abs=1e-16)


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(0.01, 3), st.sampled_from([1.0, -1.0]))
def test_exponent_schwarz_reflection(re, im, sigma2):
    lam = complex(re, im)
    b = fh_exponent(lam, 1.0, -1.0, sigma2)
    assert fh_exponent(lam.conjugate(), 1.0, -1.0, sigma2) == pytest.approx(-b.conjugate(), abs=1e-14)
    assert -0.5 < b.real <= 0.5


@pytest.mark.parametrize("lam", [-0.5, 0.0, 0.7])
def test_exponent_on_the_cut_has_half_real_part(lam):
    assert abs(fh_exponent(lam + 0j, 1.0, -1.0, 1.0).real) == pytest.approx(0.5)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(0.05, 3))
def test_amplitude_squares_to_product(re, im):
    lam = complex(re, im)
    for kind in CovarianceKind:
        fh = fh_data(HALF, lam, kind)
        t2 = kind.tau2
        assert fh.r ** 2 == pytest.approx((lam - 1) * (lam + 1), rel=1e-13)
        assert fh.r_tilde ** 2 == pytest.approx((lam - t2) * (lam + t2), rel=1e-13)


def test_deformed_exponent_differs_only_for_negativity():
    plain = fh_data(HALF, 0.4 + 0.9j, PLAIN)
    neg = fh_data(HALF, 0.4 + 0.9j, NEG)
    assert plain.beta_tilde == plain.beta
    assert neg.beta_tilde == pytest.approx(fh_exponent(0.4 + 0.9j, 1.0, -1.0, -1.0))
    assert neg.beta_tilde != neg.beta


@pytest.mark.parametrize("lam", [1.0, -1.0])
def test_branch_points_raise(lam):
    with pytest.raises(BranchPointError):
        fh_data(HALF, lam)


def test_local_exponents_flip_at_the_right_point():
    fh = fh_data(SMOOTH, 0.2 + 0.5j, NEG)
    assert fh.local_exponents(Side.L) == (fh.beta, fh.beta_tilde)
    assert fh.local_exponents("r") == (-fh.beta, -fh.beta_tilde)
    assert fh.point("R") == pytest.approx(1 / fh.fermi_point)
    with pytest.raises(ConfigurationError):
        Side.parse("middle")


def test_to_dict_is_json_ready():
    data = fh_data(HALF, 2j, NEG).to_dict()
    assert data["kind"] == "NEGATIVITY"
    assert set(data) == {"lambda", "kind", "beta", "beta_tilde", "r", "r_tilde"}
    assert all(isinstance(v, float) for v in data["beta"])


# -- x(z) logarithms ---------------------------------------------------------------
@pytest.mark.parametrize("z", [0.3 + 0.1j, -0.5j, 0.8])
def test_x_log_inside_exponentiates_to_x(z):
    pf = 1.1
    zf = cmath.exp(1j * pf)
    assert cmath.exp(x_log_inside(z, pf)) == pytest.approx((z - zf) / (z - 1 / zf), rel=1e-14)
    assert x_log_inside(0.0, pf) == pytest.approx(2j * pf)


@pytest.mark.parametrize("z", [3 + 1j, -2.0, 1e8j])
def test_x_log_outside_exponentiates_to_x(z):
    pf = 1.1
    zf = cmath.exp(1j * pf)
    assert cmath.exp(x_log_outside(z, pf)) == pytest.approx((z - zf) / (z - 1 / zf), rel=1e-14)
    assert abs(x_log_outside(1e12, pf)) < 1e-11


# -- Wiener-Hopf factors --------------------------------------------------------
@pytest.mark.parametrize("kind", list(CovarianceKind))
def test_half_filled_step_factors_are_constant(kind):
    # f = +-1 makes the factorization target constant: F+ = e^L, F- = 1
    lam = 0.4 + 0.9j
    fh = fh_data(HALF, lam, kind)
    for tilde, s2, b in ((False, 1.0, fh.beta), (True, kind.tau2, fh.beta_tilde)):
        fac = fh.factor_tilde if tilde else fh.factor
        const = cmath.log(lam + s2) - 1j * math.pi * b
        for z in (0.0, 0.5j, -0.3 + 0.2j, 0.999):
            assert fac.log_plus(z) == pytest.approx(const, abs=1e-13)
        for z in (1.5, -4j, 1.001 + 0.1j):
            assert abs(fac.log_minus(z)) <= 1e-13


def test_plus_factor_matches_mpmath_cauchy_integral():
    fh = fh_data(SMOOTH, 0.3 + 0.7j, NEG)
    fac = fh.factor_tilde
    pf = SMOOTH.fermi_momentum
    z = 0.5j

    def integrand(t):
        xi = mpmath.expj(t)
        return complex(fac.log_target(np.array([float(t)]))[0]) * xi / (xi - z)

    mpmath.mp.dps = 20
    val = mpmath.quad(integrand, [-math.pi, -pf, 0, pf, math.pi]) / (2 * mpmath.pi)
    assert fac.log_plus(z) == pytest.approx(complex(val), abs=1e-10)


def test_plus_factor_mean_value_property():
    fac = fh_data(SMOOTH, -0.6 + 0.4j, PLAIN).factor
    t = 2 * np.pi * np.arange(64) / 64
    mean = np.mean([fac.log_plus(0.5 * cmath.exp(1j * s)) for s in t])
    assert mean == pytest.approx(fac.log_plus(0.0), abs=1e-12)


def test_minus_factor_tends_to_one():
    fac = fh_data(SMOOTH, 1.5 + 0.2j, NEG).factor
    assert abs(fac.log_minus(1e6)) < 1e-5
    assert abs(fac.log_minus(1e3)) > abs(fac.log_minus(1e6))


@pytest.mark.parametrize("sym", [SMOOTH, from_occupation(model.demo_spec(), grid_size=64)])
def test_factorization_residual(sym):
    fh = fh_data(sym, 0.3 + 0.8j, NEG)
    thetas = np.linspace(-3.0, 3.0, 13)
    assert fh.factor.residual(thetas) <= 1e-9
    assert fh.factor_tilde.residual(thetas) <= 1e-9


def test_discontinuous_target_is_reported():
    fh = fh_data(SMOOTH, 0.3 + 0.8j, NEG)
    with pytest.raises(BranchPointError, match="discontinuous"):
        type(fh.factor)(SMOOTH, fh.lam, 1.0, fh.beta + 1.0)


# -- Szego ------------------------------------------------------------------
def test_mean_log_step_closed_form():
    pf = 1.2
    sym = from_step(pf)
    lam = 0.5 + 1.5j
    expected = (pf * cmath.log(lam + 1) + (math.pi - pf) * cmath.log(lam - 1)) / math.pi
    assert mean_log_symbol(sym, lam, 1.0) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("sigma", ["1", "tau"])
@pytest.mark.parametrize("pf", [math.pi / 2, 1.0])
def test_szego_relation_at_random_lambdas(sigma, pf):
    sym = from_step(pf)
    worst = max(szego_check(sym, lam, sigma).residual for lam in random_lambdas(20, 5))
    assert worst <= 1e-8


def test_szego_relation_smooth_symbol():
    for lam in random_lambdas(5, 8):
        assert szego_check(SMOOTH, lam, "tau").residual <= 1e-8


def test_szego_rejects_unknown_sigma():
    with pytest.raises(ConfigurationError):
        szego_check(HALF, 2j, "2")
