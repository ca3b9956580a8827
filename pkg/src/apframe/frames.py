"""Gramian fibers and frame bounds for affine systems.

Lattice membership is decided with exact integer arithmetic: a point of
Q = union_j a^{-j} D is stored as (2 pi / b) * n * a^{-m} with integers
(n, m) kept canonical (a does not divide n unless n = 0), so the indicator
gates that control fiber sparsity never touch floating comparisons.  Floats
only enter when psi_hat is evaluated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .wavelet import AffineSystem, a_pow, littlewood_paley, littlewood_paley_grid

NEG_INF = float("-inf")
POS_INF = float("inf")


@dataclass(frozen=True)
class AdicRational:
    """Exact lattice point lam = unit * numerator * a^{-a_power}.

    ``unit`` is the dual-lattice generator 2 pi / b of the enclosing system.
    Canonical form: numerator == 0 (zero) or a does not divide numerator, so
    the valuation of a nonzero point is exactly ``a_power``.
    """

    numerator: int
    a_power: int
    a: int

    def __post_init__(self):
        if self.a < 2:
            raise ValueError("a must be >= 2")
        n, m = int(self.numerator), int(self.a_power)
        if n == 0:
            m = 0
        else:
            while n % self.a == 0:
                n //= self.a
                m -= 1
        object.__setattr__(self, "numerator", n)
        object.__setattr__(self, "a_power", m)

    def value(self, unit: float) -> float:
        return unit * self.numerator * a_pow(self.a, -self.a_power)

    def __add__(self, other: "AdicRational") -> "AdicRational":
        if self.a != other.a:
            raise ValueError("mixed bases")
        m = max(self.a_power, other.a_power)
        n = (self.numerator * self.a ** (m - self.a_power)
             + other.numerator * self.a ** (m - other.a_power))
        return AdicRational(n, m, self.a)

    def __sub__(self, other: "AdicRational") -> "AdicRational":
        return self + AdicRational(-other.numerator, other.a_power, other.a)

    def __neg__(self) -> "AdicRational":
        return AdicRational(-self.numerator, self.a_power, self.a)

    def scale_by_a(self, k: int = 1) -> "AdicRational":
        """Multiply by a^k (exact)."""
        return AdicRational(self.numerator, self.a_power - k, self.a)

    @property
    def is_zero(self) -> bool:
        return self.numerator == 0


@dataclass(frozen=True)
class OffLattice:
    """A frequency declared to lie outside every a^{-j} D."""

    real: float


def valuation(lam, a=None, b=None):
    """a-adic valuation kappa: least j with a^j lam in the dual lattice.

    Exact integers for lattice points; -inf at 0; +inf for off-lattice
    points.  ``a``/``b`` are accepted for plain floats, where only zeroness
    can be decided (every nonzero plain real is treated as off-lattice).
    """
    if isinstance(lam, AdicRational):
        return NEG_INF if lam.is_zero else lam.a_power
    if isinstance(lam, OffLattice):
        return NEG_INF if lam.real == 0.0 else POS_INF
    x = float(lam)
    return NEG_INF if x == 0.0 else POS_INF


def q_lattice(sys: AffineSystem, depth: int, q_max: float):
    """All q in a^{-depth} D with |q| <= q_max, as exact points sorted by value.

    The window (depth, q_max) is the standing truncation of the full lattice
    Q; its effect should be judged by comparing nested windows.
    """
    unit = sys.dual_step
    n_max = int(math.floor(q_max * a_pow(sys.a, depth) / unit + 1e-9))
    pts = [AdicRational(n, depth, sys.a) for n in range(-n_max, n_max + 1)]
    pts.sort(key=lambda q: q.value(unit))
    return tuple(pts)


def _band_j_range(sys, mu, mu_prime, j_floor, j_ceiling):
    """j range where both a^j mu and a^j mu' can meet the band."""
    lo, hi = j_floor, j_ceiling
    if sys.wavelet.band is not None:
        amax = max(abs(mu), abs(mu_prime))
        amin = min(abs(mu), abs(mu_prime))
        if amin == 0.0:
            return 0, -1  # one factor is psi_hat(0) = 0 at every scale
        band_lo = sys.band_scale_range(amin)[0]   # smaller |.| enters the band last
        band_hi = sys.band_scale_range(amax)[1]   # larger |.| leaves the band first
        lo = band_lo if lo == NEG_INF else max(lo, band_lo)
        hi = band_hi if hi == POS_INF else min(hi, band_hi)
    if lo == NEG_INF or hi == POS_INF:
        raise ValueError("unbounded scale sum: need a band or explicit j window")
    return int(lo), int(hi)


def affine_product(sys: AffineSystem, lam, lam_prime, *, kappa=None, j_window=None):
    """Scale-gated product sum_{j >= kappa(lam - lam')} psi_hat(a^j lam)
    conj psi_hat(a^j lam').

    Pass exact ``AdicRational`` points (values are taken against the system's
    dual lattice unit) to get kappa computed exactly; plain floats require an
    explicit ``kappa``.  An empty index set (kappa = +inf) gives 0.
    """
    unit = sys.dual_step
    if kappa is None:
        if isinstance(lam, AdicRational) and isinstance(lam_prime, AdicRational):
            kappa = valuation(lam - lam_prime)
        else:
            raise ValueError("kappa must be given explicitly for non-exact points")
    mu = lam.value(unit) if isinstance(lam, AdicRational) else float(lam)
    mu_p = lam_prime.value(unit) if isinstance(lam_prime, AdicRational) else float(lam_prime)
    return _affine_product_values(sys, mu, mu_p, kappa, j_window)


def _affine_product_values(sys, mu, mu_prime, kappa, j_window=None):
    if kappa == POS_INF:
        return 0j
    lo, hi = (j_window if j_window is not None else (NEG_INF, POS_INF))
    if kappa != NEG_INF:
        lo = kappa if lo == NEG_INF else max(lo, kappa)
    lo, hi = _band_j_range(sys, mu, mu_prime, lo, hi)
    total = 0j
    for j in range(lo, hi + 1):
        aj = a_pow(sys.a, j)
        total += complex(sys.psi_hat(aj * mu)) * np.conj(complex(sys.psi_hat(aj * mu_prime)))
    return complex(total)


@dataclass(frozen=True, eq=False)
class GramianFiber:
    """Truncated Hermitian fiber matrix of affine products at base point lam.

    Entry (q, q') is [lam+q, lam+q']; it vanishes unless some admissible j
    puts a^j (q - q') in the dual lattice, which is decided exactly.
    """

    lam: float
    q_set: tuple            # exact AdicRational points
    entries: np.ndarray     # Hermitian complex matrix
    j_window: tuple         # (j_lo, j_hi) used for the scale sums

    @cached_property
    def q_values(self) -> np.ndarray:
        # values require the dual unit that built the fiber; stored at build time
        return self._q_values

    def __post_init__(self):
        self.entries.setflags(write=False)

    @property
    def dim(self) -> int:
        return len(self.q_set)


def fiber_j_window(sys: AffineSystem, lam: float, q_set, pad: int = 1):
    """Scale window covering every band interaction of the fiber points.

    Needed because a fiber records the j range it used: a window that misses
    the scales where lam+q meets the band yields spurious zero entries.
    """
    unit = sys.dual_step
    vals = np.abs(lam + np.array([q.value(unit) for q in q_set]))
    vals = vals[vals > 0]
    if len(vals) == 0 or sys.wavelet.band is None:
        return (-4, 6)
    lo = sys.band_scale_range(float(np.max(vals)))[0]
    hi = sys.band_scale_range(float(np.min(vals)))[1]
    return (lo - pad, hi + pad)


def gramian_fiber(sys: AffineSystem, lam: float, q_set, j_window) -> GramianFiber:
    """Build the fiber matrix entry-by-entry with exact kappa gates."""
    unit = sys.dual_step
    n = len(q_set)
    j_lo, j_hi = int(j_window[0]), int(j_window[1])
    vals = np.array([q.value(unit) for q in q_set])
    entries = np.zeros((n, n), dtype=complex)
    for i in range(n):
        for l in range(i, n):
            kap = valuation(q_set[i] - q_set[l])
            if kap == POS_INF:
                continue
            lo = j_lo if kap == NEG_INF else max(j_lo, int(kap))
            if lo > j_hi:
                continue
            entries[i, l] = _affine_product_values(
                sys, lam + vals[i], lam + vals[l], kap, (lo, j_hi))
            entries[l, i] = np.conj(entries[i, l])
    fiber = GramianFiber(lam=float(lam), q_set=tuple(q_set),
                         entries=entries, j_window=(j_lo, j_hi))
    object.__setattr__(fiber, "_q_values", vals)
    return fiber


def gramian_fiber_terms(sys: AffineSystem, lam: float, q_set, j_window):
    """Per-scale matrices whose sum over j reproduces the fiber entrywise."""
    unit = sys.dual_step
    n = len(q_set)
    j_lo, j_hi = int(j_window[0]), int(j_window[1])
    vals = np.array([q.value(unit) for q in q_set])
    out = {}
    for j in range(j_lo, j_hi + 1):
        aj = a_pow(sys.a, j)
        col = np.asarray(sys.psi_hat(aj * (lam + vals)), dtype=complex)
        gate = np.zeros((n, n))
        for i in range(n):
            for l in range(n):
                kap = valuation(q_set[i] - q_set[l])
                gate[i, l] = 1.0 if kap <= j else 0.0
        out[j] = np.outer(col, np.conj(col)) * gate
    return out


@dataclass(frozen=True)
class RayleighBounds:
    """Extremal Rayleigh-quotient estimates of a truncated fiber.

    Certified only for the truncation that built the matrix; enlarging the
    q-window can move the true bounds.
    """

    low: float
    high: float
    residual_low: float
    residual_high: float
    iterations: int


class PowerIterationError(RuntimeError):
    """Power iteration failed to converge; carries the last residual."""

    def __init__(self, message, residual):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


def _power_extreme(mat, v0, tol, max_iter):
    """Largest-eigenvalue Rayleigh estimate of a Hermitian PSD matrix."""
    v = v0 / np.linalg.norm(v0)
    lam_old = float(np.real(np.vdot(v, mat @ v)))
    for it in range(1, max_iter + 1):
        w = mat @ v
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0, 0.0, it
        v = w / nw
        lam = float(np.real(np.vdot(v, mat @ v)))
        resid = float(np.linalg.norm(mat @ v - lam * v))
        if abs(lam - lam_old) <= tol * max(1.0, abs(lam)) and resid <= math.sqrt(tol) * max(1.0, abs(lam)):
            return lam, resid, it
        lam_old = lam
    raise PowerIterationError("power iteration did not converge", resid)


def fiber_rayleigh_bounds(fiber: GramianFiber, trials: int = 8, seed: int = 0,
                          tol: float = 1e-12, max_iter: int = 20_000) -> RayleighBounds:
    """Extremal eigenvalue estimates by power iteration plus random probes.

    The top of the spectrum comes from power iteration on the matrix; the
    bottom from power iteration on the reflected shift sigma I - G.  Random
    Rayleigh probes seed the iterations and sanity-bracket the result.
    """
    G = np.asarray(fiber.entries)
    n = G.shape[0]
    if n == 0:
        return RayleighBounds(0.0, 0.0, 0.0, 0.0, 0)
    if not np.allclose(G, G.conj().T, atol=1e-12):
        raise ValueError("fiber matrix is not Hermitian")
    scale = float(np.linalg.norm(G))
    if scale == 0.0:
        return RayleighBounds(0.0, 0.0, 0.0, 0.0, 0)

    rng = np.random.default_rng(seed)
    probes = rng.standard_normal((max(trials, 1), n)) + 1j * rng.standard_normal((max(trials, 1), n))
    quotients = []
    for x in probes:
        x = x / np.linalg.norm(x)
        quotients.append(float(np.real(np.vdot(x, G @ x))))
    v_hi = probes[int(np.argmax(quotients))]
    v_lo = probes[int(np.argmin(quotients))]

    high, resid_hi, it1 = _power_extreme(G, v_hi, tol, max_iter)
    sigma = high * (1.0 + 1e-6) + scale * 1e-12 + 1e-300
    S = sigma * np.eye(n) - G
    top_s, resid_lo, it2 = _power_extreme(S, v_lo, tol, max_iter)
    low = sigma - top_s
    # random probes live inside the spectrum; widen if iteration undershot
    low = min(low, min(quotients))
    high = max(high, max(quotients))
    return RayleighBounds(low=float(low), high=float(high),
                          residual_low=resid_lo, residual_high=resid_hi,
                          iterations=it1 + it2)


@dataclass(frozen=True)
class FrameBounds:
    """Essential frame-bound estimates from a Littlewood-Paley grid sweep.

    Grid-certified only: the verdict holds for the sampled frequencies at the
    stated resolution, no further.
    """

    lower: float
    upper: float
    arg_lower: float
    arg_upper: float
    is_frame: bool
    n_grid: int
    tol: float


def frame_bounds_bandlimited(sys: AffineSystem, lambda_grid, tol: float = 1e-12) -> FrameBounds:
    """Essential inf/sup of the Littlewood-Paley sum over a frequency grid.

    Zero frequencies are excluded.  A positive lower bound (above ``tol``)
    is required for a frame verdict.
    """
    if sys.wavelet.band is None:
        raise ValueError("frame_bounds_bandlimited needs a band-limited wavelet")
    lams = np.asarray(lambda_grid, dtype=float)
    lams = lams[lams != 0.0]
    if lams.size == 0:
        raise ValueError("lambda grid contains no nonzero points")
    sums = littlewood_paley_grid(sys, lams)
    i_lo = int(np.argmin(sums))
    i_hi = int(np.argmax(sums))
    lower = float(sums[i_lo])
    upper = float(sums[i_hi])
    return FrameBounds(lower=lower, upper=upper,
                       arg_lower=float(lams[i_lo]), arg_upper=float(lams[i_hi]),
                       is_frame=lower > tol, n_grid=int(lams.size), tol=tol)


def octave_grid(sys: AffineSystem, n: int = 4096) -> np.ndarray:
    """Midpoint frequency grid covering one multiplicative octave [l0, a*l0).

    The Littlewood-Paley sum is invariant under lam -> a*lam, so one octave
    (both signs) determines the bounds of a band-limited system.
    """
    if sys.wavelet.band is None:
        raise ValueError("octave grid needs a band")
    l0 = sys.wavelet.band[0]
    pos = l0 * (1.0 + (np.arange(n) + 0.5) * (sys.a - 1.0) / n)
    return np.concatenate([-pos[::-1], pos])
