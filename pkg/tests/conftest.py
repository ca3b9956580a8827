import numpy as np
import pytest

from apframe.spectral import (SpectralAtom, SpectralMeasure, measure_from_atoms,
                              uniform_density_measure)
from apframe.wavelet import AffineSystem, meyer, shannon


@pytest.fixture
def atom_pair():
    """Unit-mass symmetric pair at +-1: R(tau) = cos(tau)."""
    return measure_from_atoms([(1.0, 0.5), (-1.0, 0.5)])


@pytest.fixture
def shannon_system():
    return AffineSystem(shannon(), a=2, b=1.0)


@pytest.fixture
def meyer_system():
    return AffineSystem(meyer(), a=2, b=1.0)


@pytest.fixture
def compact_density():
    """Unit-mass uniform density on +-[0.5, 2.5]."""
    return uniform_density_measure(0.5, 2.5, 1.0, n_points=1025, symmetric_pair=True)


@pytest.fixture
def mixed_measure():
    """Atoms (+-1, 0.25) plus uniform density mass 0.5 on +-[0.5, 2.5]."""
    dens = uniform_density_measure(0.5, 2.5, 0.5, n_points=1025,
                                   symmetric_pair=True).density
    return SpectralMeasure(atoms=(SpectralAtom(1.0, 0.25), SpectralAtom(-1.0, 0.25)),
                           density=dens, symmetric=True)
