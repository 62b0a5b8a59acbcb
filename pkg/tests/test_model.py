import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq

from twointerval import model
from twointerval.errors import (ConfigurationError, DegenerateOccupationError,
                                NumericalError)


def spec_with(coupling=0.1, couplings=(1.0,), band_bottom=2.5, spacing=0.25,
              fermi_energy=1.0, hopping=1.0):
    return model.ReservoirSpec(hopping_scale=hopping, coupling=coupling,
                               band_bottom=band_bottom, level_spacing=spacing,
                               couplings=tuple(couplings), fermi_energy=fermi_energy)


@st.composite
def random_specs(draw, max_levels=64):
    n = draw(st.integers(1, max_levels))
    hs = draw(st.lists(st.floats(0.05, 1.0), min_size=n, max_size=n))
    return spec_with(coupling=draw(st.floats(0.01, 0.5)), couplings=hs,
                     band_bottom=draw(st.floats(-1.0, 3.0)),
                     spacing=draw(st.floats(0.05, 0.5)))


# -- dispersion roots -----------------------------------------------------------
def test_single_level_matches_quadratic():
    spec = spec_with(coupling=0.3, couplings=(0.8,), band_bottom=0.5, spacing=0.4)
    p = 1.1
    e = spec.chain_energy(p)
    g = spec.levels[0]
    c2 = spec.level_strengths[0]
    disc = math.sqrt((e - g) ** 2 + 4 * c2)
    expected = sorted([(e + g - disc) / 2, (e + g + disc) / 2])
    sol = model.dispersion_roots(spec, p)
    assert np.allclose(sol.roots, expected, rtol=1e-13, atol=1e-14)


def test_decoupled_roots_are_chain_and_levels():
    spec = spec_with(coupling=0.0, couplings=(1.0, 0.5, 0.2))
    p = 0.7
    sol = model.dispersion_roots(spec, p)
    expected = np.sort(np.concatenate([[spec.chain_energy(p)], spec.levels]))
    assert np.allclose(sol.roots, expected, atol=1e-14)
    chain = np.argmin(np.abs(sol.roots - spec.chain_energy(p)))
    assert sol.weights[chain] == pytest.approx(1.0)
    assert np.sum(np.delete(sol.weights, chain)) == pytest.approx(0.0, abs=1e-15)


def test_zero_coupling_level_keeps_weight_zero():
    spec = spec_with(couplings=(1.0, 0.0, 0.5))
    sol = model.dispersion_roots(spec, 0.4)
    assert len(sol) == 4
    at_level = np.isclose(sol.roots, spec.levels[1], atol=1e-14)
    assert at_level.sum() == 1
    assert sol.weights[at_level][0] == 0.0
    assert sol.weights.sum() == pytest.approx(1.0, abs=1e-12)


def test_roots_and_weights_match_brentq_oracle():
    spec = spec_with(coupling=0.4, couplings=(0.9, 0.6), band_bottom=0.2, spacing=0.5)
    p = 0.9
    e = spec.chain_energy(p)
    g = spec.levels
    c2 = spec.level_strengths

    def secular(w):
        return w - e - np.sum(c2 / (w - g))

    eps = 1e-12
    brackets = [(-50.0, g[0] - eps), (g[0] + eps, g[1] - eps), (g[1] + eps, 50.0)]
    roots = np.array([brentq(secular, a, b, xtol=1e-15) for a, b in brackets])
    weights = 1.0 / (1.0 + np.array([np.sum(c2 / (w - g) ** 2) for w in roots]))
    sol = model.dispersion_roots(spec, p)
    assert np.allclose(sol.roots, roots, rtol=1e-12)
    assert np.allclose(sol.weights, weights, rtol=1e-10)


@settings(max_examples=40, deadline=None)
@given(random_specs(), st.floats(-math.pi, math.pi))
def test_weights_sum_to_one(spec, p):
    sol = model.dispersion_roots(spec, p)
    assert len(sol) == spec.level_count + 1
    assert np.all((sol.weights >= 0) & (sol.weights <= 1))
    assert abs(sol.weights.sum() - 1.0) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(random_specs(max_levels=16), st.floats(-math.pi, math.pi))
def test_roots_interlace_levels(spec, p):
    roots = model.dispersion_roots(spec, p).roots
    g = spec.levels
    assert roots[0] < g[0]
    assert roots[-1] > g[-1]
    for j in range(1, len(g)):
        assert g[j - 1] < roots[j] < g[j]


def test_nonfinite_momentum_rejected():
    with pytest.raises(ConfigurationError):
        model.dispersion_roots(spec_with(), float("nan"))


# -- occupation ---------------------------------------------------------------
def test_decoupled_occupation_is_step():
    spec = spec_with(coupling=0.0, fermi_energy=0.7)
    p = model.sample_momenta(64)
    occ = model.occupation_grid(spec, p)
    pf = math.acos(1 - spec.fermi_energy / spec.hopping_scale)
    assert np.array_equal(occ, (np.abs(p) < pf).astype(float))


def test_band_minimum_is_occupied_when_reservoir_is_empty_and_decoupled():
    spec = spec_with(coupling=0.0, band_bottom=5.0)
    assert model.occupation(spec, 0.0) == 1.0


def test_small_coupling_occupation_is_weight_of_sub_fermi_root():
    spec = spec_with(coupling=0.1, couplings=(1.0, 0.8, 0.6))
    sol = model.dispersion_roots(spec, 0.3)
    below = sol.roots < spec.fermi_energy
    assert below.sum() == 1
    occ = model.occupation(spec, 0.3)
    assert occ == pytest.approx(sol.weights[below][0], rel=1e-14)
    assert occ < 1.0


@settings(max_examples=30, deadline=None)
@given(random_specs(max_levels=16), st.floats(0, math.pi))
def test_occupation_even_in_momentum(spec, p):
    try:
        a = model.occupation(spec, p)
    except DegenerateOccupationError:
        return
    assert a == model.occupation(spec, -p)
    assert 0.0 <= a <= 1.0


def test_occupation_nonincreasing_in_abs_p_when_reservoir_above():
    spec = model.demo_spec()
    p = np.linspace(0, math.pi, 401)
    occ = model.occupation_grid(spec, p)
    assert np.all(np.diff(occ) <= 1e-15)


def test_degenerate_fermi_energy_needs_side():
    spec = spec_with(coupling=0.0)
    p_at = math.acos(1 - spec.fermi_energy)
    with pytest.raises(DegenerateOccupationError):
        model.occupation(spec, p_at)
    assert model.occupation(spec, p_at, side="inside") == 1.0
    assert model.occupation(spec, p_at, side="outside") == 0.0


# -- Fermi momentum -----------------------------------------------------------
def test_decoupled_fermi_momentum_closed_form():
    spec = spec_with(coupling=0.0, fermi_energy=0.6, hopping=1.3)
    assert model.fermi_momentum(spec) == pytest.approx(math.acos(1 - 0.6 / 1.3), rel=1e-15)


def test_band_center_gives_half_filling():
    spec = spec_with(coupling=0.0, fermi_energy=1.0, hopping=1.0)
    assert model.fermi_momentum(spec) == pytest.approx(math.pi / 2, rel=1e-15)


def test_fermi_momentum_shift_is_quadratic_in_coupling():
    base = model.fermi_momentum(spec_with(coupling=0.0))
    shifts = [model.fermi_momentum(spec_with(coupling=a)) - base for a in (0.1, 0.05)]
    assert shifts[0] / shifts[1] == pytest.approx(4.0, rel=1e-2)


def test_fermi_momentum_solves_condition():
    spec = model.demo_spec()
    pf = model.fermi_momentum(spec)
    ef = spec.fermi_energy
    lhs = spec.chain_energy(pf) + float(spec.self_energy(ef))
    assert lhs == pytest.approx(ef, rel=1e-13)


def test_fermi_energy_outside_band_raises():
    with pytest.raises(NumericalError, match="band"):
        model.fermi_momentum(spec_with(coupling=0.0, fermi_energy=3.0))


# -- validation and serialization --------------------------------------------------
@pytest.mark.parametrize("kwargs", [dict(spacing=0.0), dict(hopping=-1.0), dict(couplings=())])
def test_invalid_spec_rejected(kwargs):
    with pytest.raises(ConfigurationError):
        spec_with(**kwargs)


def test_dict_round_trip():
    spec = model.demo_spec()
    assert model.ReservoirSpec.from_dict(spec.to_dict()) == spec


def test_from_dict_rejects_unknown_and_missing_fields():
    data = model.demo_spec().to_dict()
    with pytest.raises(ConfigurationError):
        model.ReservoirSpec.from_dict({**data, "temperature": 1.0})
    data.pop("coupling")
    with pytest.raises(ConfigurationError):
        model.ReservoirSpec.from_dict(data)
