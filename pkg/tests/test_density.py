import math

import numpy as np
import pytest
from scipy.integrate import simpson

from twointerval.errors import ContourError, MultivaluedInverseError
from twointerval.gaussian_core import CovarianceKind, Geometry, build_covariance, spectrum
from twointerval.orthopoly import Growth
from twointerval.rh.density import (boundary_jump, circle_nodes, counting_atoms,
                                    counting_density, exact_root_moment, richardson,
                                    root_moment, spectral_density_change)
from twointerval.symbol import constant_symbol, from_profile, from_step

PLAIN, NEG = CovarianceKind.PLAIN, CovarianceKind.NEGATIVITY
SMOOTH = from_profile(1.1, lambda p: 0.6 + 0.3 * np.cos(p), grid_size=48)


def exact_moments(sym, geo, kind, qs):
    smaller = Geometry(geo.k, geo.l - 1, geo.n)
    big = spectrum(build_covariance(sym, geo, kind)).eigenvalues
    small = spectrum(build_covariance(sym, smaller, kind)).eigenvalues
    return [exact_root_moment(big, small, q) for q in qs]


# -- counting part --------------------------------------------------------------
def test_step_atoms_carry_unit_weight():
    atoms = counting_atoms(from_step(1.0), 1.0)
    assert [a.location for a in atoms] == [-1.0, 1.0]
    assert sum(a.weight for a in atoms) == pytest.approx(1.0, abs=1e-15)
    assert atoms[0].weight == pytest.approx(1.0 / math.pi)


def test_constant_symbol_has_one_atom():
    atoms = counting_atoms(constant_symbol(0.3), -1.0)
    assert len(atoms) == 1 and atoms[0].location == pytest.approx(0.3)


def test_counting_measure_of_a_monotone_profile_is_normalized():
    pf = SMOOTH.fermi_momentum
    lo, hi = -0.9, -(0.6 + 0.3 * math.cos(pf))
    # x = lo + u^2 absorbs the inverse square root at the band edge f = 0.9
    # (the interpolated inverse is piecewise cubic, so a dense Simpson rule fits)
    u = np.linspace(0.0, math.sqrt(hi - lo), 20001)
    density = simpson(2 * u * counting_density(SMOOTH, lo + u * u, 1.0), x=u)
    assert density == pytest.approx(pf / math.pi, rel=1e-4)
    atoms = counting_atoms(SMOOTH, 1.0)
    assert density + sum(a.weight for a in atoms) == pytest.approx(1.0, rel=1e-4)


def test_counting_density_matches_inverse_slope():
    # f = 0.6 + 0.3 cos p  =>  |dp/df| = 1 / (0.3 sin p)
    p = 0.7
    lam = -(0.6 + 0.3 * math.cos(p))
    expected = 1.0 / (0.3 * math.sin(p)) / math.pi
    assert float(counting_density(SMOOTH, lam, 1.0)) == pytest.approx(expected, rel=1e-3)


def test_non_monotone_profile_is_refused():
    wavy = from_profile(1.5, lambda p: 0.5 + 0.3 * np.cos(3 * p), grid_size=48)
    with pytest.raises(MultivaluedInverseError):
        counting_density(wavy, [-0.5], 1.0)
    assert np.all(counting_density(wavy, [-0.5], 1.0, branches="sum") > 0)


# -- boundary values ---------------------------------------------------------------
def test_richardson_removes_linear_and_quadratic_terms():
    g = lambda e: 2.0 + 3.0 * e - 5.0 * e * e  # noqa: E731
    assert richardson(g(4e-2), g(2e-2), g(1e-2)) == pytest.approx(2.0, abs=1e-14)


def test_boundary_jump_of_the_logarithm():
    # log has jump 2 pi i across the negative axis and none across the positive one
    x = np.array([-2.0, -0.5, 0.5, 3.0])
    jump = boundary_jump(lambda z: np.log(z.astype(complex)), x)
    assert np.allclose(jump, [-1, -1, 0, 0], atol=1e-10)  # eta differences of O(1e-16/1e-4)


@pytest.mark.parametrize("kind", list(CovarianceKind))
def test_density_result_and_csv(kind):
    grid = np.linspace(-0.9, 0.9, 7)
    res = spectral_density_change(from_step(math.pi / 2), Geometry(8, 8, 40), grid, kind)
    assert res.total.shape == grid.shape
    assert np.all(np.isfinite(res.correction))
    assert np.all(res.counting == 0)  # the step has only atoms
    text = res.to_csv({"command": "test"})
    assert "re_lambda,density_term_counting,density_term_correction,total" in text
    assert "r11_phase" in text
    assert len(res.atoms) == 2


def test_constant_symbol_has_no_correction():
    res = spectral_density_change(constant_symbol(0.3), Geometry(4, 4, 20), [0.1, 0.5])
    assert np.all(res.correction == 0)


# -- integrated moments ------------------------------------------------------------
def test_circle_nodes_integrate_dz_over_z():
    z, w = circle_nodes(4.0, 64)
    assert np.sum(w / z) == pytest.approx(1.0, abs=1e-14)
    assert abs(np.sum(w * z ** 3)) < 1e-12


@pytest.mark.parametrize("kind", list(CovarianceKind))
@pytest.mark.parametrize("pf", [math.pi / 2, math.pi / 3])
def test_total_weight_and_moments(kind, pf):
    sym = from_step(pf)
    geo = Geometry(16, 16, 128)
    exact = exact_moments(sym, geo, kind, (0, 1, 2))
    got = [root_moment(sym, geo, q, kind) for q in (0, 1, 2)]
    assert abs(got[0] - 1) <= 0.05
    assert abs(got[1] - exact[1]) <= 0.05 * max(abs(exact[1]), 1e-12) + 1e-10
    assert abs(got[2] - exact[2]) <= 0.05 * abs(exact[2])


def test_grow_k_moments():
    sym = from_step(math.pi / 3)
    geo = Geometry(16, 16, 128)
    smaller = Geometry(15, 16, 127)
    big = spectrum(build_covariance(sym, geo)).eigenvalues
    small = spectrum(build_covariance(sym, smaller)).eigenvalues
    exact = exact_root_moment(big, small, 2)
    assert root_moment(sym, geo, 2, which=Growth.GROW_K) == pytest.approx(exact, rel=0.05)


def test_contour_too_close_to_the_cut_is_refused():
    with pytest.raises(ContourError, match="Re beta"):
        root_moment(from_step(1.0), Geometry(4, 4, 20), 0, radius=1.2)
