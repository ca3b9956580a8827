import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from apframe.spectral import (DensityFamily, SpectralAtom, SpectralMeasure,
                              TabulatedDensity, covariance, decompose,
                              filter_measure, measure_from_atoms, spectral_moment,
                              uniform_density_measure)


def quad_oracle_covariance(mu, tau):
    """Independent adaptive quadrature of the density part plus exact atoms."""
    val = sum(a.mass * np.exp(1j * a.location * tau) for a in mu.atoms)
    if mu.density is not None:
        grid, dens = mu.density.grid, mu.density.values
        re, _ = integrate.quad(lambda l: np.interp(l, grid, dens) * math.cos(l * tau),
                               grid[0], grid[-1], limit=400)
        im, _ = integrate.quad(lambda l: np.interp(l, grid, dens) * math.sin(l * tau),
                               grid[0], grid[-1], limit=400)
        val += re + 1j * im
    return val


def test_covariance_constant_atom():
    mu = measure_from_atoms([(0.0, 1.0)])
    for tau in (0.0, 1.0, -3.7, 100.0):
        assert covariance(mu, tau) == pytest.approx(1.0, abs=1e-15)


def test_covariance_symmetric_pair_is_cosine(atom_pair):
    for tau in (0.0, 0.5, 1.0, 2.0, -4.0):
        assert covariance(atom_pair, tau) == pytest.approx(math.cos(tau), abs=1e-14)


def test_covariance_uniform_density_vs_quadrature_oracle():
    mu = uniform_density_measure(-math.pi, math.pi, 1.0, n_points=2049)
    got = covariance(mu, 1.0)
    oracle = quad_oracle_covariance(mu, 1.0)
    # closed form sin(pi)/pi = 0; the tabulated object carries O(h^2) of it
    assert abs(got - oracle) < 5e-6
    assert abs(got) < 5e-6


def test_covariance_at_zero_is_total_mass(mixed_measure):
    assert covariance(mixed_measure, 0.0) == pytest.approx(mixed_measure.total_mass,
                                                           abs=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.floats(-5, 5), st.floats(0, 2)), min_size=1,
                max_size=6, unique_by=lambda t: round(t[0], 6)),
       st.floats(-10, 10))
def test_covariance_hermitian_symmetry(pairs, tau):
    mu = measure_from_atoms(pairs, symmetric=False)
    r_plus = covariance(mu, tau)
    r_minus = covariance(mu, -tau)
    assert r_minus == pytest.approx(np.conj(r_plus), abs=1e-12)


def test_covariance_positive_definite_spot_check(mixed_measure):
    rng = np.random.default_rng(0)
    times = rng.uniform(-5, 5, size=8)
    weights = rng.standard_normal(8) + 1j * rng.standard_normal(8)
    lags = times[:, None] - times[None, :]
    gram = covariance(mixed_measure, lags.ravel()).reshape(8, 8)
    q = np.real(np.vdot(weights, gram @ weights))
    assert q >= -1e-10


def test_spectral_moment_atoms(atom_pair):
    value, diag = spectral_moment(atom_pair, 1.0)
    assert value == pytest.approx(1.0, abs=1e-14)
    assert not diag.divergent


def test_spectral_moment_zero_atom():
    mu = measure_from_atoms([(0.0, 1.0)])
    for alpha in (0.25, 0.5, 1.0, 2.0):
        value, _ = spectral_moment(mu, alpha)
        assert value == 0.0


def test_spectral_moment_uniform_closed_form():
    # |lambda| has its kink on a grid node, so the trapezoid value is exact
    mu = uniform_density_measure(-1.0, 1.0, 1.0, n_points=2049)
    value, diag = spectral_moment(mu, 0.5)
    oracle, _ = integrate.quad(lambda l: abs(l) * 0.5, -1, 1, points=[0.0])
    assert oracle == pytest.approx(0.5, abs=1e-14)
    assert value == pytest.approx(oracle, abs=1e-12)
    assert not diag.divergent


def test_spectral_moment_rejects_bad_alpha(atom_pair):
    with pytest.raises(ValueError):
        spectral_moment(atom_pair, 0.0)
    with pytest.raises(ValueError):
        spectral_moment(atom_pair, 2.5)


def test_decompose_atoms_only(atom_pair):
    cont, disc = decompose(atom_pair)
    assert cont.total_mass == 0.0
    assert disc.atoms == atom_pair.atoms


def test_decompose_density_only(compact_density):
    cont, disc = decompose(compact_density)
    assert disc.total_mass == 0.0
    assert cont.density is compact_density.density


def test_decompose_mass_additivity(mixed_measure):
    cont, disc = decompose(mixed_measure)
    assert cont.total_mass + disc.total_mass == pytest.approx(
        mixed_measure.total_mass, rel=1e-14)


def test_filter_identity_and_zero(mixed_measure):
    same = filter_measure(mixed_measure, lambda l: np.ones_like(l))
    assert same.total_mass == pytest.approx(mixed_measure.total_mass, rel=1e-14)
    gone = filter_measure(mixed_measure, lambda l: np.zeros_like(l))
    assert gone.total_mass == 0.0


def test_filter_indicator_recovers_continuous_part(mixed_measure):
    # indicator of the density support kills the atoms (the support of the
    # continuous part excludes the atom locations by construction here)
    def indicator(l):
        l = np.asarray(l, dtype=float)
        return ((np.abs(l) >= 1.4) & (np.abs(l) <= 2.5)).astype(float)

    filtered = filter_measure(mixed_measure, indicator)
    assert all(a.mass == 0.0 for a in filtered.atoms)
    cont, _ = decompose(mixed_measure)
    band_mass = cont.integrate(indicator)
    assert filtered.total_mass == pytest.approx(band_mass, rel=1e-12)


def test_filter_total_mass_is_weighted_integral(mixed_measure):
    f = lambda l: 1.0 / (1.0 + np.asarray(l, dtype=float) ** 2)
    filtered = filter_measure(mixed_measure, f)
    oracle = mixed_measure.integrate(lambda l: np.abs(f(l)) ** 2)
    assert filtered.total_mass == pytest.approx(float(np.real(oracle)), rel=1e-12)


def test_filter_reports_nonfinite_response(atom_pair):
    with pytest.raises(ValueError, match="non-finite"):
        filter_measure(atom_pair, lambda l: 1.0 / (np.asarray(l) - 1.0))


def test_atoms_must_be_distinct():
    with pytest.raises(ValueError, match="distinct"):
        SpectralMeasure(atoms=(SpectralAtom(1.0, 0.5), SpectralAtom(1.0, 0.2)))


def test_symmetry_flag_is_checked():
    with pytest.raises(ValueError, match="symmetric"):
        SpectralMeasure(atoms=(SpectralAtom(1.0, 0.5),), symmetric=True)


def test_negative_mass_rejected():
    with pytest.raises(ValueError):
        SpectralAtom(1.0, -0.1)


def test_json_round_trip(mixed_measure):
    text = mixed_measure.to_json()
    back = SpectralMeasure.from_json(text)
    assert back.atoms == mixed_measure.atoms
    assert back.symmetric == mixed_measure.symmetric
    np.testing.assert_array_equal(back.density.values, mixed_measure.density.values)
    assert back.to_json() == text


def test_json_schema_fields(atom_pair):
    d = json.loads(atom_pair.to_json())
    assert d["atoms"][0].keys() == {"lambda", "mass"}
    assert d["density"] is None


def test_family_round_trip_and_regeneration():
    fam = DensityFamily("rational_decay", {"beta": 1.5})
    mu = fam.measure(8.0, n_points=513)
    back = SpectralMeasure.from_json(mu.to_json())
    assert back.family == fam
    bigger = fam.measure(16.0, n_points=513)
    assert bigger.max_frequency == 16.0


def test_family_moment_diagnostics_discriminate():
    fam = DensityFamily("rational_decay", {"beta": 1.0})
    mu = fam.measure(8.0, nodes_per_unit=16.0)
    _, finite_diag = spectral_moment(mu, 0.25)
    _, divergent_diag = spectral_moment(mu, 0.9)
    assert not finite_diag.divergent
    assert divergent_diag.divergent


def test_unknown_family_rejected():
    with pytest.raises(ValueError, match="unknown density family"):
        DensityFamily("nope", {})


def test_density_validation():
    with pytest.raises(ValueError):
        TabulatedDensity(0.0, 1.0, np.array([1.0, -0.5, 1.0]))
    with pytest.raises(ValueError):
        TabulatedDensity(1.0, 0.0, np.array([1.0, 1.0]))
