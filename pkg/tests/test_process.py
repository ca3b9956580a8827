import math

import mpmath
import numpy as np
import pytest

from apframe.process import (GaussianProcess, d_alpha, derivative_quotient_error,
                             fractional_derivative, hypersingular_time_domain,
                             hypersingular_truncated, khat, sample_path, synthesize)
from apframe.spectral import (DensityFamily, covariance, measure_from_atoms,
                              uniform_density_measure)

N_STREAMS = 10_000


def mc_paths_at(mu, times, n_streams, seed=1234, mode="complex"):
    out = np.empty((n_streams, len(times)), dtype=complex)
    for r in range(n_streams):
        out[r] = sample_path(synthesize(mu, seed, r, mode=mode), times)
    return out


def test_zero_mass_atom_gives_null_process():
    mu = measure_from_atoms([(1.0, 0.0)])
    proc = synthesize(mu, seed=1, stream_id=0)
    t = np.linspace(0, 10, 21)
    assert np.all(sample_path(proc, t) == 0)


def test_monte_carlo_power(atom_pair):
    vals = mc_paths_at(atom_pair, np.array([0.0]), N_STREAMS)[:, 0]
    power = np.abs(vals) ** 2
    mc_se = np.std(power, ddof=1) / math.sqrt(N_STREAMS)
    assert abs(np.mean(power) - 1.0) < 3 * mc_se


def test_monte_carlo_covariance_vs_spectral(atom_pair):
    times = np.array([1.0, 2.0])
    paths = mc_paths_at(atom_pair, times, N_STREAMS)
    prods = paths[:, 1] * np.conj(paths[:, 0])
    se = math.sqrt((np.var(prods.real, ddof=1) + np.var(prods.imag, ddof=1))
                   / N_STREAMS)
    target = covariance(atom_pair, 1.0)
    assert abs(np.mean(prods) - target) < 3 * se


def test_monte_carlo_covariance_continuous(compact_density):
    times = np.array([1.0, 2.0])
    paths = mc_paths_at(compact_density, times, 2000)
    prods = paths[:, 1] * np.conj(paths[:, 0])
    se = math.sqrt((np.var(prods.real, ddof=1) + np.var(prods.imag, ddof=1)) / 2000)
    target = covariance(compact_density, 1.0)
    assert abs(np.mean(prods) - target) < 3 * se


def test_constant_path_single_zero_atom():
    mu = measure_from_atoms([(0.0, 1.0)])
    proc = synthesize(mu, seed=5, stream_id=2)
    t = np.linspace(-3, 3, 13)
    path = sample_path(proc, t)
    assert np.all(path == path[0])
    assert path[0] == proc.spectrum.atom_coeffs[0]


def test_zero_weight_kills_path(atom_pair):
    proc = synthesize(atom_pair, seed=5, stream_id=0)
    from apframe.process import apply_filter
    dead = apply_filter(proc, lambda l: np.zeros_like(np.asarray(l, float)))
    assert np.all(sample_path(dead, np.linspace(0, 5, 6)) == 0)


def test_path_matches_direct_formula(atom_pair):
    proc = synthesize(atom_pair, seed=42, stream_id=7)
    t = np.linspace(-2, 2, 41)
    c = proc.spectrum.atom_coeffs
    locs = proc.spectrum.atom_locations
    direct = c[0] * np.exp(1j * locs[0] * t) + c[1] * np.exp(1j * locs[1] * t)
    np.testing.assert_allclose(sample_path(proc, t), direct, atol=1e-15)


def test_determinism_bit_for_bit(mixed_measure):
    t = np.linspace(0, 100, 256)
    a = sample_path(synthesize(mixed_measure, seed=9, stream_id=3), t)
    b = sample_path(synthesize(mixed_measure, seed=9, stream_id=3), t)
    assert np.array_equal(a, b)
    c = sample_path(synthesize(mixed_measure, seed=9, stream_id=4), t)
    assert not np.array_equal(a, c)


def test_real_mode_gives_real_paths(mixed_measure):
    proc = synthesize(mixed_measure, seed=21, stream_id=0, mode="real")
    path = sample_path(proc, np.linspace(0, 50, 501))
    assert np.max(np.abs(path.imag)) < 1e-12


def test_real_mode_conjugate_draws(atom_pair):
    proc = synthesize(atom_pair, seed=21, stream_id=0, mode="real")
    c = proc.spectrum.atom_coeffs
    assert c[0] == np.conj(c[1])


def test_real_mode_power(atom_pair):
    vals = mc_paths_at(atom_pair, np.array([0.3]), N_STREAMS, mode="real")[:, 0]
    power = vals.real ** 2
    mc_se = np.std(power, ddof=1) / math.sqrt(N_STREAMS)
    assert abs(np.mean(power) - 1.0) < 3 * mc_se


def test_real_mode_requires_symmetry():
    mu = measure_from_atoms([(1.0, 0.5)], symmetric=False)
    with pytest.raises(ValueError, match="symmetric"):
        synthesize(mu, seed=1, stream_id=0, mode="real")


def test_circularity_complex_mode(atom_pair):
    # E[X(t) X(s)] = 0 without conjugation in circular mode
    paths = mc_paths_at(atom_pair, np.array([0.0, 1.0]), N_STREAMS)
    prods = paths[:, 0] * paths[:, 1]
    se = math.sqrt((np.var(prods.real, ddof=1) + np.var(prods.imag, ddof=1))
                   / N_STREAMS)
    assert abs(np.mean(prods)) < 3 * se


def test_fractional_derivative_zero_frequency():
    mu = measure_from_atoms([(0.0, 1.0)])
    proc = synthesize(mu, seed=3, stream_id=0)
    d = fractional_derivative(proc, 0.5)
    assert np.all(sample_path(d, np.linspace(0, 5, 11)) == 0)


def test_fractional_derivative_couples_pathwise(atom_pair):
    proc = synthesize(atom_pair, seed=11, stream_id=0)
    alpha = 0.7
    d = fractional_derivative(proc, alpha)
    t = np.linspace(0, 10, 101)
    np.testing.assert_allclose(sample_path(d, t), sample_path(proc, t), atol=1e-14)


def test_first_derivative_power(atom_pair):
    vals = []
    for r in range(N_STREAMS):
        proc = synthesize(atom_pair, seed=31, stream_id=r)
        d = fractional_derivative(proc, 1.0)
        vals.append(abs(sample_path(d, np.array([0.0]))[0]) ** 2)
    vals = np.asarray(vals)
    mc_se = np.std(vals, ddof=1) / math.sqrt(N_STREAMS)
    assert abs(np.mean(vals) - 1.0) < 3 * mc_se


def test_single_atom_derivative_variance_closed_form():
    lam0, m = 1.7, 0.6
    mu = measure_from_atoms([(lam0, m)], symmetric=False)
    alpha = 0.4
    proc = synthesize(mu, seed=2, stream_id=0)
    d = fractional_derivative(proc, alpha)
    assert d.second_moment(0.0) == pytest.approx(m * lam0 ** (2 * alpha), rel=1e-14)


def test_divergent_family_moment_warns():
    fam = DensityFamily("rational_decay", {"beta": 0.75})
    mu = fam.measure(8.0, n_points=513)
    proc = synthesize(mu, seed=1, stream_id=0)
    with pytest.warns(RuntimeWarning, match="divergent"):
        fractional_derivative(proc, 0.9)


def test_khat_normalization():
    for alpha in (0.3, 0.5, 1.0, 1.5):
        assert khat(alpha, 0.0) == 1.0


def test_khat_vanishes_at_infinity():
    for alpha in (0.5, 0.7, 1.3):
        assert abs(khat(alpha, 1e3)) < 0.05


def test_khat_continuity_at_route_switch():
    for alpha in (0.5, 1.3):
        assert khat(alpha, 49.99) == pytest.approx(khat(alpha, 50.01), abs=1e-4)


def test_d_alpha_dual_quadrature_oracle():
    # independent scheme: high-precision mpmath tanh-sinh quadrature of the
    # defining integrand on the same split
    alpha = 0.5
    got = d_alpha(alpha)
    inner = mpmath.quad(lambda u: (mpmath.cos(u) - 1) * u ** (-1 - alpha), [0, 1])
    outer = mpmath.quadosc(lambda u: mpmath.cos(u) * u ** (-1 - alpha),
                           [1, mpmath.inf], period=2 * mpmath.pi)
    oracle = float(2 * (inner - 1 / mpmath.mpf(alpha) + outer))
    assert got == pytest.approx(oracle, abs=1e-8)
    # closed form for this alpha: -2 sqrt(2 pi)
    assert got == pytest.approx(-2 * math.sqrt(2 * math.pi), abs=1e-9)


def test_d_alpha_signed_negative():
    for alpha in (0.25, 0.5, 1.0, 1.3, 1.7):
        assert d_alpha(alpha) < 0
    assert d_alpha(1.0) == pytest.approx(-math.pi, abs=1e-9)


def test_hypersingular_zero_atom():
    mu = measure_from_atoms([(0.0, 1.0)])
    proc = synthesize(mu, seed=1, stream_id=0)
    for eps in (0.5, 0.25, 0.125):
        sample, second = hypersingular_truncated(proc, 0.5, eps, 0.3)
        assert sample == 0
        assert second == 0.0


def test_hypersingular_frequency_vs_time_domain(atom_pair):
    proc = synthesize(atom_pair, seed=77, stream_id=0)
    alpha, eps, t = 0.5, 0.25, 0.7
    freq, _ = hypersingular_truncated(proc, alpha, eps, t)
    time = hypersingular_time_domain(proc, alpha, eps, t)
    assert abs(freq - time) < 1e-4


def test_hypersingular_second_moment_formula(atom_pair):
    proc = synthesize(atom_pair, seed=77, stream_id=0)
    alpha, eps = 0.7, 0.25
    _, second = hypersingular_truncated(proc, alpha, eps, 0.0)
    expect = d_alpha(alpha) ** 2 * khat(alpha, eps) ** 2  # |lam| = 1, mass 1
    assert second == pytest.approx(expect, rel=1e-9)


def test_hypersingular_error_decreases_with_eps(atom_pair):
    proc = synthesize(atom_pair, seed=4, stream_id=0)
    alpha = 0.6
    d1 = fractional_derivative(proc, alpha)
    c = d_alpha(alpha)
    t = np.array([0.45])
    target = c * sample_path(d1, t)[0]
    errs = []
    for eps in (0.5, 0.25, 0.125, 0.0625):
        sample, _ = hypersingular_truncated(proc, alpha, eps, float(t[0]))
        errs.append(abs(sample - target))
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_derivative_quotient_zero_atom():
    mu = measure_from_atoms([(0.0, 1.0)])
    for h in (1.0, 0.5, 0.25):
        assert derivative_quotient_error(mu, h) == pytest.approx(0.0, abs=1e-30)


def test_derivative_quotient_closed_form_and_monotone(atom_pair):
    hs = [1.0, 0.5, 0.25, 0.125, 0.0625]
    errs = [derivative_quotient_error(atom_pair, h) for h in hs]
    for h, e in zip(hs, errs):
        closed = abs((np.exp(1j * h) - 1) / h - 1j) ** 2
        assert e == pytest.approx(closed, rel=1e-12)
    assert all(a > b for a, b in zip(errs, errs[1:]))


def test_derivative_quotient_taylor_bound(compact_density):
    m4 = compact_density.integrate(lambda l: np.abs(l) ** 4)
    for h in (0.5, 0.25, 0.125):
        err = derivative_quotient_error(compact_density, h)
        assert err <= h ** 2 * m4 / 4 + 1e-12


def test_derivative_quotient_guards():
    mu = measure_from_atoms([(0.0, 1.0)])
    with pytest.raises(ValueError):
        derivative_quotient_error(mu, 0.0)
    with pytest.raises(ValueError):
        derivative_quotient_error(mu, 0.5, alpha=0.5)


def test_restrict_parts_share_draws(mixed_measure):
    proc = synthesize(mixed_measure, seed=8, stream_id=1)
    t = np.linspace(0, 20, 101)
    total = sample_path(proc, t)
    parts = (sample_path(proc.restrict("atoms"), t)
             + sample_path(proc.restrict("bins"), t))
    np.testing.assert_allclose(total, parts, atol=1e-12)


def test_nonfinite_weight_reported(atom_pair):
    proc = synthesize(atom_pair, seed=1, stream_id=0)
    from apframe.process import apply_filter
    bad = apply_filter(proc, lambda l: 1.0 / (np.asarray(l, dtype=float) - 1.0))
    with pytest.raises(ValueError, match="non-finite"):
        sample_path(bad, np.linspace(0, 1, 5))
