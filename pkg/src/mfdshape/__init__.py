"""Fractal dimension and multi-scale fractal dimension of binary shapes."""

__version__ = "0.1.0"

from .errors import ConsistencyError, MfdShapeError, ParseError, PreconditionError
from .raster import BinaryShape, load_pbm, pad, save_pbm
from .edt import DistanceMap, brute_force_edt, squared_edt
from .minkowski import FdFit, InfluenceHistogram, LogLogCurve, fit_fd, influence_histogram, loglog_curve
from .mfd import (
    MfdCurve,
    UniformCurve,
    compute_mfd,
    reflect_pad,
    resample_uniform,
    spectral_derivative,
    trim_low_sampling,
)
from .spectral import DescriptorVector, dft, fourier_descriptors, idft, reconstruction_distance

__all__ = [
    "BinaryShape", "ConsistencyError", "DescriptorVector", "DistanceMap", "FdFit", "InfluenceHistogram",
    "LogLogCurve", "MfdCurve", "MfdShapeError", "ParseError", "PreconditionError", "UniformCurve",
    "brute_force_edt", "compute_mfd", "dft", "fit_fd", "fourier_descriptors", "idft", "influence_histogram",
    "load_pbm", "loglog_curve", "pad", "reconstruction_distance", "reflect_pad", "resample_uniform",
    "save_pbm", "spectral_derivative", "squared_edt", "trim_low_sampling",
]
