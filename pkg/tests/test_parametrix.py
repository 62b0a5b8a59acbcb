import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from twointerval.gaussian_core import CovarianceKind
from twointerval.rh import parametrix as px
from twointerval.rh.fisher_hartwig import Side, fh_data
from twointerval.symbol import from_profile, from_step
from twointerval.verify import loglog_slope

PLAIN, NEG = CovarianceKind.PLAIN, CovarianceKind.NEGATIVITY
HALF = from_step(math.pi / 2)
SMOOTH = from_profile(1.1, lambda p: 0.6 + 0.3 * np.cos(p), grid_size=24)


# -- outer solution -----------------------------------------------------------
@pytest.mark.parametrize("sym", [HALF, SMOOTH])
@pytest.mark.parametrize("kind", list(CovarianceKind))
def test_outer_solution_has_the_circle_jump(sym, kind):
    fh = fh_data(sym, 0.3 + 0.7j, kind)
    assert px.outer_jump_residual(fh, np.linspace(-3.0, 3.0, 11)) <= 1e-7


@pytest.mark.parametrize("z", [0.2 + 0.3j, -0.6j, 2.0 + 1j, -5.0])
def test_outer_solution_has_unit_determinant(z):
    fh = fh_data(SMOOTH, -0.4 + 0.5j, NEG)
    assert np.linalg.det(px.y_out(fh, z).value) == pytest.approx(1.0, abs=1e-12)


def test_outer_solution_tends_to_identity_at_infinity():
    fh = fh_data(SMOOTH, 0.3 + 0.7j, NEG)
    assert np.max(np.abs(px.y_out(fh, 1e7).value - np.eye(4))) < 1e-6


def test_outer_solution_undefined_on_the_circle():
    with pytest.raises(ValueError):
        px.y_out(fh_data(HALF, 2j), 1j)


# -- local variables ----------------------------------------------------------------
@settings(max_examples=50, deadline=None)
@given(st.floats(1e-6, 10), st.floats(math.pi / 2 + 1e-6, 3 * math.pi / 2 - 1e-6))
def test_region_two_argument_range(r, ang):
    zb = px.region_two_zeta(r * cmath.exp(1j * ang))
    assert math.pi / 2 < zb.argument < 3 * math.pi / 2
    assert zb.argument == pytest.approx(ang, abs=1e-12)


def test_region_two_rejects_the_outside():
    with pytest.raises(ValueError):
        px.region_two_zeta(0.1 + 0.2j)


@pytest.mark.parametrize("w", [1e-17 + 2e-17j, 3e-9 - 1e-9j, 0.4 + 2.0j, -3 + 0.1j])
def test_expm1_complex_matches_mpmath(w):
    mpmath.mp.dps = 40
    ref = complex(mpmath.expm1(mpmath.mpc(w.real, w.imag)))
    assert abs(px.expm1_complex(w) - ref) <= 1e-15 * abs(ref)


# -- middle solution ----------------------------------------------------------------
@pytest.mark.parametrize("side", list(Side))
def test_middle_inverse_is_closed_form(side):
    fh = fh_data(SMOOTH, 0.3 + 0.7j, NEG)
    zeta = 0.03 * cmath.exp(2.4j)
    y = px.y_mid_II(fh, side, zeta, 40, 30).value
    inv = px.y_mid_II_inverse(fh, side, zeta, 40, 30)
    assert np.max(np.abs(inv @ y - np.eye(4))) <= 1e-10


def test_monodromy_coefficients_are_jump_sizes():
    fh = fh_data(SMOOTH, 0.3 + 0.7j, NEG)
    fi, fo = SMOOTH.jump_values
    zeta = px.region_two_zeta(0.02 * cmath.exp(2.2j))
    mono = px.mid_monodromy(fh, Side.L, zeta, 0, 0)
    assert mono[0, 3] == pytest.approx(fi - fo, rel=1e-12)
    assert mono[1, 2] == pytest.approx(fh.kind.tau2 * (fi - fo), rel=1e-12)


@pytest.mark.parametrize("side", list(Side))
@pytest.mark.parametrize("kind", list(CovarianceKind))
def test_middle_monodromy(side, kind):
    fh = fh_data(SMOOTH, 0.3 + 0.7j, kind)
    for zeta in (0.02 * cmath.exp(2.2j), 0.05 * cmath.exp(3.9j)):
        assert px.monodromy_residual(fh, side, zeta, 40, 30) <= 1e-9


def mid_out_errors(fh, side, ang, sizes, k=1e12):
    out = []
    for s in sizes:
        zb = px.region_two_zeta(s / k * cmath.exp(1j * ang))
        z = px.point_from_zeta(fh, side, zb)
        dev = px.y_mid_II(fh, side, zb, k, k).value @ px.y_out(fh, z).inverse() - np.eye(4)
        out.append((np.max(np.abs(dev)), np.max(np.abs(dev - px.delta_r_mid_out(fh, side, zb, k, k)))))
    return np.array(out)


@pytest.mark.parametrize("side", list(Side))
@pytest.mark.parametrize("ang", [2.0, 3.6])
def test_middle_matches_outer_at_first_and_second_order(side, ang):
    fh = fh_data(HALF, 0.3 + 0.7j, NEG)
    sizes = np.array([30.0, 60.0, 120.0, 300.0])
    errs = mid_out_errors(fh, side, ang, sizes)
    assert -loglog_slope(sizes, errs[:, 0]) == pytest.approx(1.0, abs=0.1)
    assert -loglog_slope(sizes, errs[:, 1]) >= 1.9


# -- inner solution ---------------------------------------------------------------
@pytest.mark.parametrize("side", list(Side))
@pytest.mark.parametrize("kind", list(CovarianceKind))
def test_inner_deviation_matches_closed_form_and_scales_as_one_over_m(side, kind):
    fh = fh_data(SMOOTH, -0.4 + 0.5j, kind)
    zb = px.region_two_zeta(1e-12 * cmath.exp(2.3j))
    ms = np.array([1e21, 1e22])
    sizes = []
    for m in ms:
        dev = px.inner_mid_deviation(fh, side, zb, 1.0, 1.3, m)
        ref = px.delta_r_in_mid(fh, side, zb, 1.0, 1.3, m)
        assert np.max(np.abs(dev - ref)) <= 1e-8 * np.max(np.abs(ref))
        sizes.append(np.max(np.abs(dev)))
    assert -loglog_slope(ms, sizes) >= 0.9


def test_inner_deviation_equals_direct_product():
    fh = fh_data(SMOOTH, -0.4 + 0.5j, NEG)
    zb = px.region_two_zeta(0.01 * cmath.exp(2.3j))
    y_in = px.y_in_II(fh, Side.L, zb, 3.0, 4.0, 50.0).value
    direct = y_in @ np.linalg.inv(px.y_mid_II(fh, Side.L, zb, 3.0, 4.0).value) - np.eye(4)
    dev = px.inner_mid_deviation(fh, Side.L, zb, 3.0, 4.0, 50.0)
    assert np.max(np.abs(dev - direct)) <= 1e-10 * max(1.0, np.max(np.abs(direct)))


# -- change of basis -----------------------------------------------------------------
@settings(max_examples=40, deadline=None)
@given(st.floats(-math.pi, math.pi), st.floats(-2, 2), st.floats(0.1, 2), st.floats(-1, 1),
       st.integers(0, 6), st.integers(0, 6), st.integers(1, 12), st.sampled_from(list(CovarianceKind)))
def test_reduced_jump_is_unipotent(theta, re, im, f, k, l, m, kind):
    z = cmath.exp(1j * theta)
    v = px.reduced_jump(z, complex(re, im), f, k, l, m, kind)
    ref = np.eye(4, dtype=complex)
    ref[0, 3] = f
    assert np.max(np.abs(v - ref)) <= 1e-12


def test_full_jump_block_structure():
    v = px.full_jump(1j, 0.5, 0.3, 2, 3, 4, NEG)
    assert np.all(v[2:, :2] == 0)
    assert v[0, 3] == 0.8 and v[1, 2] == pytest.approx(0.5 - 0.3)
