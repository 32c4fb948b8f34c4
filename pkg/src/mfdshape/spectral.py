"""Discrete Fourier transform helpers and Fourier descriptors of MFD curves."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import PreconditionError

if TYPE_CHECKING:
    from .mfd import MfdCurve

DEFAULT_DESCRIPTORS = 50
_DEGENERATE_DC = 1e-12


def dft(signal) -> np.ndarray:
    """Forward DFT, ``X[k] = sum_n x[n] exp(-2j pi k n / L)``, any length >= 1."""
    x = np.asarray(signal)
    if x.ndim != 1 or x.size < 1:
        raise PreconditionError("dft needs a non-empty 1-D signal")
    return np.fft.fft(x)


def idft(coefficients) -> np.ndarray:
    """Inverse of :func:`dft` (includes the ``1/L`` factor)."""
    X = np.asarray(coefficients)
    if X.ndim != 1 or X.size < 1:
        raise PreconditionError("idft needs a non-empty 1-D spectrum")
    return np.fft.ifft(X)


@dataclass(frozen=True, eq=False)
class DescriptorVector:
    """Low-frequency spectral magnitudes divided by the DC magnitude."""

    magnitudes: np.ndarray

    def __post_init__(self):
        m = np.array(self.magnitudes, dtype=np.float64, copy=True)
        if m.ndim != 1 or m.size < 1:
            raise PreconditionError("descriptor vector must be non-empty and 1-D")
        if not np.all(np.isfinite(m)) or np.any(m < 0):
            raise PreconditionError("descriptors must be finite and nonnegative")
        m.flags.writeable = False
        object.__setattr__(self, "magnitudes", m)

    @property
    def k(self) -> int:
        return self.magnitudes.size

    def to_csv_row(self) -> str:
        return ",".join(repr(float(v)) for v in self.magnitudes) + "\n"


def _check_k(k: int, length: int) -> int:
    k = int(k)
    if not 1 <= k <= length:
        raise PreconditionError(f"descriptor count k must be in [1, {length}], got {k}")
    return k


def fourier_descriptors(curve: "MfdCurve", k: int = DEFAULT_DESCRIPTORS) -> DescriptorVector:
    """Magnitudes of DFT coefficients ``0..k-1`` normalised by coefficient 0.

    Dividing by the DC magnitude makes the vector invariant to positive
    scaling of the curve, and its first entry is exactly 1.

    Raises
    ------
    PreconditionError
        If ``k`` is outside ``[1, len(curve)]`` or the DC term vanishes.
    """
    values = np.asarray(curve.values, dtype=np.float64)
    k = _check_k(k, values.size)
    mags = np.abs(dft(values)[:k])
    dc = mags[0]
    if dc < _DEGENERATE_DC:
        raise PreconditionError("degenerate signature: DC magnitude is ~0")
    out = mags / dc
    out[0] = 1.0
    return DescriptorVector(out)


def truncated_reconstruction(values, k: int) -> np.ndarray:
    """Curve rebuilt from coefficients ``0..k-1`` and their conjugate mirrors."""
    values = np.asarray(values, dtype=np.float64)
    n = values.size
    k = _check_k(k, n)
    X = dft(values)
    keep = np.zeros(n, dtype=bool)
    keep[:k] = True
    # mirrors of 1..k-1 keep the reconstruction real
    keep[(n - np.arange(1, k)) % n] = True
    return idft(np.where(keep, X, 0)).real


def reconstruction_distance(curve: "MfdCurve", k: int) -> float:
    """Euclidean distance between a curve and its ``k``-coefficient rebuild."""
    values = np.asarray(curve.values, dtype=np.float64)
    return float(np.linalg.norm(values - truncated_reconstruction(values, k)))
