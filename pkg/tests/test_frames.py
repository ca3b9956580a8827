import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from apframe.frames import (AdicRational, GramianFiber, OffLattice,
                            affine_product, fiber_j_window,
                            fiber_rayleigh_bounds, frame_bounds_bandlimited,
                            gramian_fiber, gramian_fiber_terms, octave_grid,
                            q_lattice, valuation)
from apframe.wavelet import AffineSystem, MotherWavelet, littlewood_paley, riesz_potential, shannon

NEG_INF = float("-inf")
POS_INF = float("inf")


def brute_force_affine_product(sys, mu, mu_prime, kappa, j_lo=-40, j_hi=40):
    total = 0j
    lo = j_lo if kappa == NEG_INF else max(j_lo, int(kappa))
    for j in range(lo, j_hi + 1):
        aj = float(sys.a) ** j
        total += complex(sys.psi_hat(aj * mu)) * np.conj(complex(sys.psi_hat(aj * mu_prime)))
    return total


def test_valuation_zero_is_minus_infinity():
    assert valuation(AdicRational(0, 5, 2)) == NEG_INF
    assert valuation(0.0) == NEG_INF


def test_valuation_definition_unwind():
    # lam = (2 pi / b) * 3 * a^{-2} with a = 2 not dividing 3
    assert valuation(AdicRational(3, 2, 2)) == 2


def test_valuation_off_lattice():
    assert valuation(math.sqrt(2) * 2 * math.pi) == POS_INF
    assert valuation(OffLattice(1.23)) == POS_INF


def test_canonicalization():
    q = AdicRational(6, 3, 2)   # 6 = 2 * 3 -> (3, 2)
    assert (q.numerator, q.a_power) == (3, 2)
    q = AdicRational(8, 1, 2)   # 8 = 2^3 -> (1, -2)
    assert (q.numerator, q.a_power) == (1, -2)


@settings(max_examples=60, deadline=None)
@given(st.integers(-200, 200), st.integers(-6, 6), st.sampled_from([2, 3, 5]))
def test_valuation_shift_property(n, m, a):
    q = AdicRational(n, m, a)
    if q.is_zero:
        assert valuation(q.scale_by_a(1)) == NEG_INF
    else:
        assert valuation(q.scale_by_a(1)) == valuation(q) - 1


@settings(max_examples=60, deadline=None)
@given(st.integers(-50, 50), st.integers(-4, 4),
       st.integers(-50, 50), st.integers(-4, 4))
def test_exact_arithmetic_matches_floats(n1, m1, n2, m2):
    a, unit = 2, 2 * math.pi
    q1, q2 = AdicRational(n1, m1, a), AdicRational(n2, m2, a)
    s = q1 + q2
    assert s.value(unit) == pytest.approx(q1.value(unit) + q2.value(unit), rel=1e-12,
                                          abs=1e-12)
    d = q1 - q2
    assert d.value(unit) == pytest.approx(q1.value(unit) - q2.value(unit), rel=1e-12,
                                          abs=1e-12)


def test_q_lattice_sorted_within_bound(shannon_system):
    qs = q_lattice(shannon_system, depth=2, q_max=10.0)
    vals = [q.value(shannon_system.dual_step) for q in qs]
    assert vals == sorted(vals)
    assert all(abs(v) <= 10.0 + 1e-9 for v in vals)
    assert any(q.is_zero for q in qs)


def test_affine_product_diagonal_equals_lp(shannon_system):
    q = AdicRational(0, 0, 2)
    lam = 1.37
    got = affine_product(shannon_system, lam + q.value(shannon_system.dual_step),
                         lam + q.value(shannon_system.dual_step), kappa=NEG_INF)
    assert got == pytest.approx(littlewood_paley(shannon_system, lam), abs=1e-14)


def test_affine_product_off_lattice_is_zero(shannon_system):
    assert affine_product(shannon_system, 1.0, 2.0, kappa=POS_INF) == 0j


def test_affine_product_exact_points_vs_bruteforce(shannon_system):
    unit = shannon_system.dual_step
    q1 = AdicRational(1, 2, 2)    # 2 pi / 4
    q2 = AdicRational(-1, 1, 2)   # -pi
    kappa = valuation(q1 - q2)
    base = math.pi / 2 + 1e-3
    got = affine_product(shannon_system, base + q1.value(unit), base + q2.value(unit),
                         kappa=kappa)
    oracle = brute_force_affine_product(shannon_system, base + q1.value(unit),
                                        base + q2.value(unit), kappa)
    assert got == pytest.approx(oracle, abs=1e-14)
    # and the exact-point interface computes the same kappa itself
    got2 = affine_product(shannon_system, q1, q2)
    oracle2 = brute_force_affine_product(shannon_system, q1.value(unit),
                                         q2.value(unit), kappa)
    assert got2 == pytest.approx(oracle2, abs=1e-14)


def test_affine_product_requires_kappa_for_floats(shannon_system):
    with pytest.raises(ValueError, match="kappa"):
        affine_product(shannon_system, 1.0, 2.0)


def test_gramian_diagonal_is_lp(shannon_system):
    qs = q_lattice(shannon_system, depth=1, q_max=12.0)
    lam = 0.7231
    fib = gramian_fiber(shannon_system, lam, qs, fiber_j_window(shannon_system, lam, qs))
    for i, q in enumerate(qs):
        lp = littlewood_paley(shannon_system, lam + q.value(shannon_system.dual_step))
        assert fib.entries[i, i].real == pytest.approx(lp, abs=1e-14)
        assert fib.entries[i, i].imag == 0.0


def test_gramian_zero_wavelet():
    w = MotherWavelet(psi_hat=lambda l: np.zeros_like(np.asarray(l, float)),
                      band=(1.0, 2.0))
    sys0 = AffineSystem(w, a=2, b=1.0)
    qs = q_lattice(sys0, depth=1, q_max=8.0)
    fib = gramian_fiber(sys0, 0.3, qs, (-4, 4))
    assert np.all(fib.entries == 0)


def test_gramian_entries_match_bruteforce(shannon_system):
    unit = shannon_system.dual_step
    qs = q_lattice(shannon_system, depth=1, q_max=12.0)
    lam = 0.41
    window = fiber_j_window(shannon_system, lam, qs)
    fib = gramian_fiber(shannon_system, lam, qs, window)
    for i in range(len(qs)):
        for l in range(len(qs)):
            kap = valuation(qs[i] - qs[l])
            if kap == POS_INF:
                oracle = 0j
            else:
                oracle = brute_force_affine_product(
                    shannon_system, lam + qs[i].value(unit), lam + qs[l].value(unit), kap)
            assert fib.entries[i, l] == pytest.approx(oracle, abs=1e-13)


def test_gramian_gate_property(shannon_system):
    qs = q_lattice(shannon_system, depth=2, q_max=8.0)
    lam = 1.77
    window = fiber_j_window(shannon_system, lam, qs)
    fib = gramian_fiber(shannon_system, lam, qs, window)
    for i in range(len(qs)):
        for l in range(len(qs)):
            if fib.entries[i, l] != 0:
                kap = valuation(qs[i] - qs[l])
                assert kap <= window[1]   # some admissible scale passes the gate


def test_gramian_hermitian(shannon_system):
    qs = q_lattice(shannon_system, depth=1, q_max=10.0)
    fib = gramian_fiber(shannon_system, 0.233, qs, (-4, 6))
    np.testing.assert_allclose(fib.entries, fib.entries.conj().T, atol=1e-15)


def test_summation_identity(shannon_system):
    # fiber entries equal the sum of the per-scale matrices on the window
    qs = q_lattice(shannon_system, depth=1, q_max=10.0)
    lam = 0.619
    window = fiber_j_window(shannon_system, lam, qs)
    fib = gramian_fiber(shannon_system, lam, qs, window)
    terms = gramian_fiber_terms(shannon_system, lam, qs, window)
    total = sum(terms.values())
    np.testing.assert_allclose(fib.entries, total, atol=1e-12)


def test_canonical_vector_bound(shannon_system):
    qs = q_lattice(shannon_system, depth=1, q_max=10.0)
    lam = 0.913
    window = fiber_j_window(shannon_system, lam, qs)
    fib = gramian_fiber(shannon_system, lam, qs, window)
    i0 = next(i for i, q in enumerate(qs) if q.is_zero)
    e0 = np.zeros(len(qs)); e0[i0] = 1.0
    quotient = np.real(np.vdot(e0, fib.entries @ e0))
    assert quotient == pytest.approx(littlewood_paley(shannon_system, lam), abs=1e-14)


def test_rayleigh_shannon_identity_fiber(shannon_system):
    qs = q_lattice(shannon_system, depth=1, q_max=10.0)
    lam = 0.3456
    fib = gramian_fiber(shannon_system, lam, qs, fiber_j_window(shannon_system, lam, qs))
    rb = fiber_rayleigh_bounds(fib, seed=3)
    assert rb.low == pytest.approx(1.0, abs=1e-12)
    assert rb.high == pytest.approx(1.0, abs=1e-12)


def test_rayleigh_zero_matrix(shannon_system):
    qs = q_lattice(shannon_system, depth=0, q_max=5.0)
    fib = GramianFiber(lam=0.1, q_set=tuple(qs),
                       entries=np.zeros((len(qs), len(qs)), dtype=complex),
                       j_window=(-2, 2))
    rb = fiber_rayleigh_bounds(fib)
    assert (rb.low, rb.high) == (0.0, 0.0)


def test_rayleigh_synthetic_2x2():
    fib = GramianFiber(lam=0.0, q_set=(AdicRational(0, 0, 2), AdicRational(1, 0, 2)),
                       entries=np.array([[2.0, 1.0], [1.0, 2.0]], dtype=complex),
                       j_window=(0, 0))
    rb = fiber_rayleigh_bounds(fib, seed=11)
    assert rb.low == pytest.approx(1.0, abs=1e-10)
    assert rb.high == pytest.approx(3.0, abs=1e-10)


def test_rayleigh_matches_eigvalsh_oracle():
    rng = np.random.default_rng(7)
    m = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
    g = m @ m.conj().T   # Hermitian PSD
    fib = GramianFiber(lam=0.0, q_set=tuple(AdicRational(n, 0, 2) for n in range(6)),
                       entries=g, j_window=(0, 0))
    rb = fiber_rayleigh_bounds(fib, seed=5)
    ev = np.linalg.eigvalsh(g)
    assert rb.high == pytest.approx(ev[-1], rel=1e-9)
    assert rb.low == pytest.approx(ev[0], rel=1e-6, abs=1e-9)


def test_rayleigh_interlacing_sanity():
    rng = np.random.default_rng(13)
    m = rng.standard_normal((7, 7)) + 1j * rng.standard_normal((7, 7))
    g = m @ m.conj().T
    qs = tuple(AdicRational(n, 0, 2) for n in range(7))
    big = GramianFiber(lam=0.0, q_set=qs, entries=g, j_window=(0, 0))
    sub = GramianFiber(lam=0.0, q_set=qs[:5], entries=g[:5, :5].copy(), j_window=(0, 0))
    rb_big = fiber_rayleigh_bounds(big, seed=1)
    rb_sub = fiber_rayleigh_bounds(sub, seed=1)
    assert rb_big.low - 1e-8 <= rb_sub.low
    assert rb_sub.high <= rb_big.high + 1e-8


def test_frame_bounds_shannon_tight(shannon_system):
    fb = frame_bounds_bandlimited(shannon_system, octave_grid(shannon_system))
    assert fb.lower == pytest.approx(1.0, abs=1e-15)
    assert fb.upper == pytest.approx(1.0, abs=1e-15)
    assert fb.is_frame


def test_frame_bounds_amplitude_homogeneity():
    c = 1.7
    sysc = AffineSystem(shannon(amplitude=c), a=2, b=1.0)
    fb = frame_bounds_bandlimited(sysc, octave_grid(sysc))
    assert fb.lower == pytest.approx(c ** 2, rel=1e-14)
    assert fb.upper == pytest.approx(c ** 2, rel=1e-14)


def test_frame_bounds_riesz_shannon_window():
    alpha = 0.5
    rsys = AffineSystem(riesz_potential(shannon(), alpha), a=2, b=1.0)
    fb = frame_bounds_bandlimited(rsys, octave_grid(rsys))
    assert fb.lower >= 1.0 / (2 * math.pi) - 1e-12
    assert fb.upper <= 1.0 / math.pi + 1e-12
    assert fb.is_frame


def test_frame_bounds_detects_gap():
    # band narrower than one octave leaves spectral holes: not a frame
    sys_gap = AffineSystem(shannon(math.pi, 1.5 * math.pi), a=2, b=1.0)
    fb = frame_bounds_bandlimited(sys_gap, octave_grid(AffineSystem(shannon(), a=2, b=1.0)))
    assert not fb.is_frame
