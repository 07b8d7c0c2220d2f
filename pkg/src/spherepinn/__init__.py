"""Spherical microphone array upsampling with physics-informed networks.

Subpackages and modules
-----------------------
specfun
    Spherical harmonics, spherical Bessel/Hankel functions, radial terms.
sma_core
    Array geometry, SH encoding and the order-limited baseline upsampler.
synth
    Plane waves, point sources, shoebox image-source impulse responses.
pinn
    Rowdy-activated sinusoidal networks, exact Laplacians, training.
evalkit
    NMSE metrics, Helmholtz residuals, time/frequency transforms.
cli
    Experiment driver (``spherepinn`` / ``python -m spherepinn``).
"""

from . import evalkit, fileio, pinn, sma_core, specfun, synth
from .evalkit import TimeSignalSet, freq_to_time, nmse_freq, nmse_time, time_to_freq
from .exceptions import (BesselNullError, EnclosureUnsupportedError, FileFormatError, GeometryError,
                         NonFiniteLossError, OrderTooHighError, ShapeMismatchError, SpherePinnError)
from .sma_core import (ArrayGeometry, ComplexPressureField, SpectrumInfo, baseline_upsample,
                       reference_geometry, subset_select)
from .specfun import Enclosure

__version__ = "0.1.0"

__all__ = [
    "ArrayGeometry",
    "BesselNullError",
    "ComplexPressureField",
    "Enclosure",
    "EnclosureUnsupportedError",
    "FileFormatError",
    "GeometryError",
    "NonFiniteLossError",
    "OrderTooHighError",
    "ShapeMismatchError",
    "SpectrumInfo",
    "SpherePinnError",
    "TimeSignalSet",
    "baseline_upsample",
    "evalkit",
    "fileio",
    "freq_to_time",
    "nmse_freq",
    "nmse_time",
    "pinn",
    "reference_geometry",
    "sma_core",
    "specfun",
    "subset_select",
    "synth",
    "time_to_freq",
]
