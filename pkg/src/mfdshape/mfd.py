"""Multi-scale fractal dimension: ``MFD(t) = 2 - du/dt`` of the log-log curve.

Pipeline: distance transform -> influence areas -> log-log curve -> drop the
sparsely sampled small radii -> linear resampling onto a uniform ``t`` grid ->
reflection padding to length ``4N`` -> Gaussian-regularised spectral
derivative -> crop the verbatim copy of the curve.

``sigma`` is measured in samples of the uniform grid; it is converted to
log-radius units with the grid step before entering the frequency response.
"""

from __future__ import annotations

import io
import json
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .edt import squared_edt
from .errors import ConsistencyError, PreconditionError
from .minkowski import InfluenceHistogram, LogLogCurve, influence_histogram, loglog_curve
from .raster import BinaryShape, pad
from .spectral import dft, idft

DEFAULT_R_MAX = 100
DEFAULT_SIGMA = 10.0
DEFAULT_SAMPLES = 256
DEFAULT_R_MIN = 5
MIN_SAMPLES = 8

_IMAG_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class UniformCurve:
    """``samples[k]`` is ``u(t0 + k*dt)``."""

    t0: float
    dt: float
    samples: np.ndarray

    def __post_init__(self):
        s = np.array(self.samples, dtype=np.float64, copy=True)
        if s.ndim != 1 or s.size < MIN_SAMPLES:
            raise PreconditionError(f"uniform curve needs >= {MIN_SAMPLES} samples, got {s.size}")
        if not self.dt > 0:
            raise PreconditionError(f"dt must be positive, got {self.dt}")
        if not np.all(np.isfinite(s)):
            raise PreconditionError("uniform curve samples must be finite")
        s.flags.writeable = False
        object.__setattr__(self, "samples", s)
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", float(self.dt))

    def __len__(self):
        return self.samples.size

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)


@dataclass(frozen=True, eq=False)
class MfdCurve:
    t0: float
    dt: float
    values: np.ndarray
    r_max: int
    sigma: float

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    @property
    def t(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.values.size)

    @property
    def params(self) -> dict:
        return {"r_max": self.r_max, "sigma": self.sigma, "n": len(self), "t0": self.t0, "dt": self.dt}

    def __eq__(self, other):
        if not isinstance(other, MfdCurve):
            return NotImplemented
        return (
            self.t0 == other.t0
            and self.dt == other.dt
            and self.r_max == other.r_max
            and self.sigma == other.sigma
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def to_csv(self, extra_params: dict | None = None) -> str:
        """``# {json params}`` line, a ``t,mfd`` header, then one row per sample."""
        params = dict(self.params)
        if extra_params:
            params.update(extra_params)
        buf = io.StringIO()
        buf.write("# " + json.dumps(params, sort_keys=True) + "\n")
        buf.write("t,mfd\n")
        for t, m in zip(self.t.tolist(), self.values.tolist()):
            buf.write(f"{t!r},{m!r}\n")
        return buf.getvalue()


def trim_low_sampling(curve: LogLogCurve, r_min: float = DEFAULT_R_MIN) -> LogLogCurve:
    """Drop points with radius below ``r_min``; at least 8 must survive."""
    if not r_min >= 1:
        raise PreconditionError(f"r_min must be >= 1, got {r_min}")
    keep = curve.t >= np.log(r_min)
    if np.count_nonzero(keep) < MIN_SAMPLES:
        raise PreconditionError(
            f"curve too short after trim: {np.count_nonzero(keep)} points with r >= {r_min}"
        )
    return LogLogCurve(curve.t[keep], curve.u[keep])


def resample_uniform(curve: LogLogCurve, n: int = DEFAULT_SAMPLES) -> UniformCurve:
    """Piecewise-linear resampling onto ``n`` equally spaced ``t`` values.

    The grid spans the first to the last point of ``curve`` so both end
    samples are reproduced exactly.
    """
    n = int(n)
    if n < MIN_SAMPLES:
        raise PreconditionError(f"sample count must be >= {MIN_SAMPLES}, got {n}")
    if len(curve) < 2:
        raise PreconditionError("resampling needs at least 2 points")
    t0, t1 = curve.t[0], curve.t[-1]
    dt = (t1 - t0) / (n - 1)
    grid = t0 + dt * np.arange(n)
    grid[-1] = t1
    samples = np.interp(grid, curve.t, curve.u)
    samples[0] = curve.u[0]
    samples[-1] = curve.u[-1]
    return UniformCurve(t0, dt, samples)


def reflect_pad(curve: UniformCurve) -> np.ndarray:
    """``[u, u[::-1], u, u[::-1]]``; block 3 (``[2N, 3N)``) is ``u`` verbatim."""
    u = np.asarray(curve.samples if isinstance(curve, UniformCurve) else curve, dtype=np.float64)
    r = u[::-1]
    return np.concatenate([u, r, u, r])


def spectral_derivative(v, dt: float, sigma: float) -> np.ndarray:
    """Gaussian-smoothed derivative of a periodic signal via the DFT.

    Each coefficient at signed frequency ``f`` is multiplied by
    ``2j*pi*f * exp(-2*pi**2 * (sigma*dt)**2 * f**2)``, the transform of the
    derivative of a unit-area Gaussian with standard deviation ``sigma``
    samples. The Nyquist term is zeroed.

    Raises
    ------
    ConsistencyError
        If the inverse transform leaves a non-negligible imaginary part.
    """
    v = np.asarray(v, dtype=np.float64)
    if not sigma >= 0:
        raise PreconditionError(f"sigma must be >= 0, got {sigma}")
    if not dt > 0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    length = v.size
    if length < 4 * MIN_SAMPLES:
        raise PreconditionError(f"padded signal must have >= {4 * MIN_SAMPLES} samples, got {length}")
    f = np.fft.fftfreq(length, d=dt)
    sigma_t = sigma * dt
    response = 2j * np.pi * f * np.exp(-2.0 * np.pi**2 * sigma_t**2 * f**2)
    if length % 2 == 0:
        response[length // 2] = 0.0
    out = idft(dft(v) * response)
    scale = max(float(np.max(np.abs(out.real))), 1.0)
    residue = float(np.max(np.abs(out.imag)))
    if residue > _IMAG_TOLERANCE * scale:
        raise ConsistencyError(f"spectral derivative has imaginary residue {residue:.3g}")
    return out.real


@contextmanager
def _stage(name: str):
    try:
        yield
    except PreconditionError as exc:
        raise PreconditionError(f"{name}: {exc}") from exc


def shape_histogram(shape: BinaryShape, r_max: int) -> InfluenceHistogram:
    """Influence areas of ``shape`` for radii up to ``r_max``.

    The shape is padded by ``r_max + 1`` so no dilation disc reaches the
    canvas edge.
    """
    r_max = int(r_max)
    if r_max < 1:
        raise PreconditionError(f"influence_histogram: r_max must be >= 1, got {r_max}")
    with _stage("squared_edt"):
        dmap = squared_edt(pad(shape, r_max + 1))
    with _stage("influence_histogram"):
        return influence_histogram(dmap, r_max)


def trimmed_curve(hist: InfluenceHistogram, r_min: float = DEFAULT_R_MIN) -> LogLogCurve:
    with _stage("loglog_curve"):
        curve = loglog_curve(hist)
    with _stage("trim_low_sampling"):
        return trim_low_sampling(curve, r_min)


def mfd_from_histogram(
    hist: InfluenceHistogram,
    sigma: float = DEFAULT_SIGMA,
    n: int = DEFAULT_SAMPLES,
    r_min: float = DEFAULT_R_MIN,
) -> MfdCurve:
    curve = trimmed_curve(hist, r_min)
    with _stage("resample_uniform"):
        uniform = resample_uniform(curve, n)
    padded = reflect_pad(uniform)
    with _stage("spectral_derivative"):
        deriv = spectral_derivative(padded, uniform.dt, sigma)
    n = len(uniform)
    return MfdCurve(uniform.t0, uniform.dt, 2.0 - deriv[2 * n:3 * n], hist.r_max, float(sigma))


def compute_mfd(
    shape: BinaryShape,
    r_max: int = DEFAULT_R_MAX,
    sigma: float = DEFAULT_SIGMA,
    n: int = DEFAULT_SAMPLES,
    r_min: float = DEFAULT_R_MIN,
) -> MfdCurve:
    """Multi-scale fractal dimension curve of ``shape``.

    Parameters
    ----------
    shape : BinaryShape
        Shape with at least one foreground pixel; padded internally.
    r_max : int
        Largest dilation radius in pixels.
    sigma : float
        Gaussian smoothing width in samples of the uniform grid.
    n : int
        Number of uniform samples (the length of the returned curve).
    r_min : float
        Radii below this are discarded before resampling.

    Returns
    -------
    MfdCurve
        ``2 - du/dt`` on ``n`` samples from ``ln(r_min')`` to ``ln(r_max')``,
        where the primes denote the smallest/largest attained radii in range.
    """
    return mfd_from_histogram(shape_histogram(shape, r_max), sigma, n, r_min)
