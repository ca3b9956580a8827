"""Numerical toolkit for affine AP-frame checks and fractional-smoothness
analysis of Gaussian stationary random processes.

Everything runs in the frequency domain: spectral measures are atoms plus a
tabulated density, processes are synthesized from seeded random spectra, and
frame/smoothness criteria are evaluated against those representations.
"""

__version__ = "0.1.0"

from .quadrature import DIVERGENCE_SLOPE, GrowthDiagnostic, QuadratureError
from .spectral import (
    Covariance,
    DensityFamily,
    SpectralAtom,
    SpectralMeasure,
    TabulatedDensity,
    covariance,
    decompose,
    filter_measure,
    spectral_moment,
)
from .process import (
    GaussianProcess,
    RandomSpectrum,
    d_alpha,
    derivative_quotient_error,
    fractional_derivative,
    hypersingular_time_domain,
    hypersingular_truncated,
    khat,
    sample_path,
    synthesize,
)
from .wavelet import (
    AffineSystem,
    MotherWavelet,
    c1_supremum,
    gamma_constant,
    littlewood_paley,
    meyer,
    psi_jk_hat,
    riesz_potential,
    shannon,
    tabulated_wavelet,
)
from .frames import (
    AdicRational,
    FrameBounds,
    GramianFiber,
    RayleighBounds,
    affine_product,
    fiber_rayleigh_bounds,
    frame_bounds_bandlimited,
    gramian_fiber,
    q_lattice,
    valuation,
)
from .ergodic import (
    AverageTrace,
    ap_frame_sum,
    autocorrelation_estimate,
    b2_norm_continuous,
    b2_norm_sequence,
    bohr_transform,
    bohr_transform_sequence,
    coeff_covariance,
    coefficient_sequence,
    decomposition_check,
)
from .smoothness import (
    SmoothnessReport,
    covariance_singular_integral,
    f_alpha,
    f_alpha_constant,
    hypersingular_convergence,
    second_difference_integral,
    smoothness_verdict,
    weighted_ap_sum,
)
