"""Mother wavelets in the frequency domain and affine systems over them.

Everything is evaluated through psi_hat; there is no time-domain evaluation
anywhere.  Built-ins are bandpass: the Shannon indicator (half-open band
[l0, l1) so that a-adic dilates tile the line without double counting on the
edge orbit) and the standard smooth Meyer profile.  psi_hat(0) = 0 for every
built-in, which keeps |lam|^{-alpha} transforms bounded.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import special


@dataclass(frozen=True)
class DecayCertificate:
    """Declared bound |psi_hat(lam)| <= C min(|lam|, |lam|^{-p}).

    Needed to truncate scale sums honestly when no band is known.
    """

    constant: float
    exponent: float

    def __post_init__(self):
        if self.constant <= 0 or self.exponent <= 0:
            raise ValueError("decay certificate needs positive constant and exponent")


@dataclass(frozen=True, eq=False)
class MotherWavelet:
    """Frequency-side mother wavelet.

    ``psi_hat`` must accept numpy arrays.  ``band = (l0, l1)`` with
    0 < l0 < l1 declares that psi_hat vanishes off {l0 <= |lam| <= l1};
    ``c1_bound`` is an optional declared bound on the periodized square sum.
    """

    psi_hat: object
    band: tuple | None = None
    c1_bound: float | None = None
    decay: DecayCertificate | None = None
    name: str = "custom"

    def __post_init__(self):
        if self.band is not None:
            l0, l1 = self.band
            if not 0 < l0 < l1:
                raise ValueError(f"band must satisfy 0 < l0 < l1, got {self.band}")

    def __call__(self, lam):
        return self.psi_hat(lam)

    def check_band_support(self, n_grid=10_000, pad=4.0, tol=0.0):
        """Max |psi_hat| outside the declared band on a probe grid."""
        if self.band is None:
            raise ValueError("wavelet has no declared band")
        l0, l1 = self.band
        outside = np.concatenate([
            np.linspace(-pad * l1, -l1 * (1 + 1e-9), n_grid // 4),
            np.linspace(-l0 * (1 - 1e-9), l0 * (1 - 1e-9), n_grid // 2),
            np.linspace(l1 * (1 + 1e-9), pad * l1, n_grid // 4),
        ])
        worst = float(np.max(np.abs(self.psi_hat(outside))))
        return worst


def shannon(lambda0=math.pi, lambda1=2 * math.pi, amplitude=1.0) -> MotherWavelet:
    """Bandpass indicator wavelet: psi_hat = amplitude on l0 <= |lam| < l1.

    The right edge is excluded so that for a = l1/l0 the dilated bands tile
    every lam != 0 exactly once, including the edge orbit.
    """
    l0, l1 = float(lambda0), float(lambda1)
    if not 0 < l0 < l1:
        raise ValueError("need 0 < lambda0 < lambda1")
    amp = float(amplitude)

    def psi_hat(lam):
        x = np.abs(np.asarray(lam, dtype=float))
        return np.where((x >= l0) & (x < l1), amp, 0.0)

    return MotherWavelet(psi_hat=psi_hat, band=(l0, l1), c1_bound=None,
                         name=f"shannon[{l0:g},{l1:g})x{amp:g}")


def _meyer_nu(x):
    x = np.clip(x, 0.0, 1.0)
    return x ** 4 * (35.0 - 84.0 * x + 70.0 * x ** 2 - 20.0 * x ** 3)


def meyer() -> MotherWavelet:
    """Smooth Meyer magnitude profile on the band (2pi/3, 8pi/3).

    Real-valued (the usual half-shift phase is dropped; nothing here depends
    on it).  Dyadic dilates satisfy sum_j |psi_hat(2^j lam)|^2 = 1 for every
    lam != 0 via the sin/cos complementarity of the nu polynomial.
    """
    lo = 2 * math.pi / 3
    mid = 4 * math.pi / 3
    hi = 8 * math.pi / 3

    def psi_hat(lam):
        x = np.abs(np.asarray(lam, dtype=float))
        out = np.zeros_like(x)
        m1 = (x >= lo) & (x <= mid)
        m2 = (x > mid) & (x <= hi)
        out[m1] = np.sin(0.5 * math.pi * _meyer_nu(3.0 * x[m1] / (2 * math.pi) - 1.0))
        out[m2] = np.cos(0.5 * math.pi * _meyer_nu(3.0 * x[m2] / (4 * math.pi) - 1.0))
        return out

    return MotherWavelet(psi_hat=psi_hat, band=(lo, hi), c1_bound=None, name="meyer")


def tabulated_wavelet(grid, values, band=None, decay=None, name="tabulated") -> MotherWavelet:
    """Wavelet from a tabulated psi_hat; linear interpolation, 0 off-table."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=complex)
    if grid.ndim != 1 or grid.shape != values.shape or len(grid) < 2:
        raise ValueError("grid and values must be equal-length 1-d arrays")
    if np.any(np.diff(grid) <= 0):
        raise ValueError("grid must be strictly increasing")

    def psi_hat(lam):
        lam = np.asarray(lam, dtype=float)
        re = np.interp(lam, grid, values.real, left=0.0, right=0.0)
        im = np.interp(lam, grid, values.imag, left=0.0, right=0.0)
        return re + 1j * im

    return MotherWavelet(psi_hat=psi_hat, band=band, decay=decay, name=name)


def load_tabulated_wavelet(path) -> MotherWavelet:
    """Read a tabulated wavelet from JSON {grid, values_re, values_im?}."""
    with open(path) as fh:
        d = json.load(fh)
    grid = np.asarray(d["grid"], dtype=float)
    re = np.asarray(d["values_re"], dtype=float)
    im = np.asarray(d.get("values_im", np.zeros_like(re)), dtype=float)
    band = tuple(d["band"]) if d.get("band") else None
    decay = None
    if d.get("decay"):
        decay = DecayCertificate(d["decay"]["constant"], d["decay"]["exponent"])
    return tabulated_wavelet(grid, re + 1j * im, band=band, decay=decay,
                             name=d.get("name", "tabulated"))


_BUILTINS = {"shannon": shannon, "meyer": meyer}


def builtin_wavelet(name, **params) -> MotherWavelet:
    if name not in _BUILTINS:
        raise ValueError(f"unknown built-in wavelet {name!r}; known: {sorted(_BUILTINS)}")
    return _BUILTINS[name](**params)


@dataclass(frozen=True)
class AffineSystem:
    """Time-scale shift system (psi, a, b) with its derived lattices.

    Scales are integer powers of a (a natural number >= 2), translates run
    over K = b Z; the dual lattice is D = (2 pi / b) Z.
    """

    wavelet: MotherWavelet
    a: int = 2
    b: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.a, (int, np.integer)) and self.a >= 2):
            raise ValueError(f"a must be an integer >= 2, got {self.a!r}")
        if not self.b > 0:
            raise ValueError("b must be positive")

    @property
    def shift_step(self) -> float:
        """Generator of the translation lattice K = b Z."""
        return self.b

    @property
    def dual_step(self) -> float:
        """Generator of the dual lattice D = (2 pi / b) Z."""
        return 2 * math.pi / self.b

    def psi_hat(self, lam):
        return self.wavelet.psi_hat(lam)

    def band_scale_range(self, abs_lam):
        """Integer j range with band[0] <= |a^j lam| <= band[1] (inclusive).

        Returns (j_lo, j_hi) possibly empty (j_lo > j_hi); requires a band.
        """
        if self.wavelet.band is None:
            raise ValueError("wavelet has no band; pass an explicit j range")
        if abs_lam == 0:
            return (0, -1)
        l0, l1 = self.wavelet.band
        la = math.log(self.a)
        j_lo = math.ceil(math.log(l0 / abs_lam) / la - 1e-12) - 1
        j_hi = math.floor(math.log(l1 / abs_lam) / la + 1e-12) + 1
        return (j_lo, j_hi)


def a_pow(a, j):
    """a**j as a float (j may be any integer)."""
    return float(a) ** j


def psi_jk_hat(sys: AffineSystem, j: int, k: float, lam, normalization="L1"):
    """Fourier transform of the (j, k) system element at ``lam``.

    L1 normalization: psi_hat(a^j lam) e^{-i k a^j lam} (transform of
    a^{-j} psi(a^{-j} t - k)); L2 multiplies by a^{j/2}.
    """
    if normalization not in ("L1", "L2"):
        raise ValueError("normalization must be 'L1' or 'L2'")
    aj = a_pow(sys.a, j)
    x = np.asarray(lam, dtype=float)
    val = sys.psi_hat(aj * x) * np.exp(-1j * k * aj * x)
    if normalization == "L2":
        val = val * a_pow(sys.a, j / 2.0)
    if np.ndim(lam) == 0:
        return complex(val)
    return val


def riesz_potential(w: MotherWavelet, alpha: float) -> MotherWavelet:
    """Riesz-potential transform: new psi_hat(lam) = |lam|^{-alpha} psi_hat(lam).

    Defined as 0 at lam = 0.  For wavelets without a declared band the values
    near 0 are probed and the transform is refused if psi_hat does not vanish
    there (|lam|^{-alpha} would be unbounded on the support).
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    if w.band is None:
        probe = np.geomspace(1e-12, 1e-3, 64)
        probe = np.concatenate([-probe[::-1], probe])
        if np.max(np.abs(w.psi_hat(probe))) > 0:
            raise ValueError(
                "Riesz potential of a non-bandpass wavelet is unbounded near 0")

    base = w.psi_hat

    def psi_hat(lam):
        lam = np.asarray(lam, dtype=float)
        x = np.abs(lam)
        with np.errstate(divide="ignore"):
            scale = np.where(x > 0, x ** (-alpha), 0.0)
        return base(lam) * scale

    c1 = None
    if w.c1_bound is not None and w.band is not None:
        c1 = w.c1_bound / w.band[0] ** (2 * alpha)
    return MotherWavelet(psi_hat=psi_hat, band=w.band, c1_bound=c1,
                         decay=None, name=f"riesz[{alpha:g}]({w.name})")


def gamma_constant(alpha: float) -> float:
    """Normalizer pi^{1/2} 2^alpha Gamma(alpha/2) / Gamma((1-alpha)/2) that
    makes the |t|^{alpha-1} convolution kernel act as |lam|^{-alpha} in
    frequency."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must be in (0, 1), got {alpha}")
    return float(math.sqrt(math.pi) * 2.0 ** alpha
                 * special.gamma(alpha / 2) / special.gamma((1 - alpha) / 2))


def littlewood_paley(sys: AffineSystem, lam: float, j_range=None) -> float:
    """Scale-sum sum_j |psi_hat(a^j lam)|^2 at a single frequency.

    For band-limited wavelets the contributing j are derived exactly from the
    band, so no truncation error enters.  Otherwise an explicit ``j_range``
    is required; its tail bound is available via :func:`lp_tail_bound`.
    """
    lam = float(lam)
    if lam == 0.0:
        return 0.0
    if j_range is None:
        j_lo, j_hi = sys.band_scale_range(abs(lam))
    else:
        j_lo, j_hi = j_range
    total = 0.0
    for j in range(j_lo, j_hi + 1):
        total += abs(sys.psi_hat(a_pow(sys.a, j) * lam)) ** 2
    return float(total)


def littlewood_paley_grid(sys: AffineSystem, lams, j_range=None) -> np.ndarray:
    """Vectorized Littlewood-Paley sums over an array of frequencies."""
    lams = np.asarray(lams, dtype=float)
    out = np.zeros(lams.shape)
    nz = lams != 0
    if not np.any(nz):
        return out
    absnz = np.abs(lams[nz])
    if j_range is None:
        lo_j, _ = sys.band_scale_range(float(np.max(absnz)))
        _, hi_j = sys.band_scale_range(float(np.min(absnz)))
    else:
        lo_j, hi_j = j_range
    acc = np.zeros(absnz.shape)
    for j in range(lo_j, hi_j + 1):
        acc += np.abs(sys.psi_hat(a_pow(sys.a, j) * lams[nz])) ** 2
    out[nz] = acc
    return out


def lp_tail_bound(sys: AffineSystem, lam: float, j_range) -> float:
    """Bound on the scale-sum mass outside ``j_range`` from the decay
    certificate |psi_hat(x)| <= C min(|x|, |x|^{-p})."""
    cert = sys.wavelet.decay
    if cert is None:
        raise ValueError("tail bound needs a decay certificate on the wavelet")
    lam = abs(float(lam))
    if lam == 0:
        return 0.0
    j_lo, j_hi = j_range
    C2 = cert.constant ** 2
    a = float(sys.a)
    p = cert.exponent
    # j > j_hi: |a^j lam|^{-2p} geometric with ratio a^{-2p}
    hi_tail = C2 * (a ** (j_hi + 1) * lam) ** (-2 * p) / (1 - a ** (-2 * p))
    # j < j_lo: |a^j lam|^{2} geometric with ratio a^{-2}
    lo_tail = C2 * (a ** (j_lo - 1) * lam) ** 2 / (1 - a ** (-2.0))
    return float(hi_tail + lo_tail)


def c1_supremum(sys: AffineSystem, j: int, grid=4096, d_range=None):
    """Grid supremum over the fundamental domain of the periodized square sum
    sum_d |psi_hat(a^j (lam + d))|^2, d in the dual lattice.

    Midpoint sampling of [0, 2 pi / b) is used so measure-zero band-edge
    coincidences do not inflate the supremum; this estimates the essential
    supremum.  Returns (value, within_declared_bound_or_None).
    """
    step = sys.dual_step
    if isinstance(grid, (int, np.integer)):
        lams = (np.arange(int(grid)) + 0.5) * (step / int(grid))
    else:
        lams = np.asarray(grid, dtype=float)
    aj = a_pow(sys.a, j)
    if d_range is None:
        if sys.wavelet.band is None:
            raise ValueError("need a band or an explicit d_range")
        l1 = sys.wavelet.band[1]
        reach = l1 / aj
        n_max = int(math.floor((reach + float(np.max(lams))) / step)) + 1
        d_indices = np.arange(-n_max, n_max + 1)
    else:
        d_indices = np.arange(d_range[0], d_range[1] + 1)
    total = np.zeros_like(lams)
    for n in d_indices:
        total += np.abs(sys.psi_hat(aj * (lams + n * step))) ** 2
    value = float(np.max(total))
    within = None
    if sys.wavelet.c1_bound is not None:
        within = value <= sys.wavelet.c1_bound + 1e-12
    return value, within
