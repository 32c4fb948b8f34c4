"""Influence area of the dilated shape and the scalar fractal dimension.

The area covered by dilating a shape with a disc of radius ``r`` equals the
number of pixels whose squared distance to the shape is at most ``r**2``, so
a single distance transform yields the whole area-versus-radius staircase.
Radii are the exactly attained values ``sqrt(a**2 + b**2)``; logarithms are
natural throughout, which makes the fitted intercept ``ln(mu)`` in
``A(r) = mu * r**(2 - D)``.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from .edt import DistanceMap
from .errors import PreconditionError


@dataclass(frozen=True, eq=False)
class InfluenceHistogram:
    """Cumulative dilation areas at every attained squared radius.

    ``r2[i]`` is strictly increasing and starts at 0; ``area[i]`` counts the
    pixels with squared distance ``<= r2[i]``.
    """

    r2: np.ndarray
    area: np.ndarray
    r_max: int

    def __post_init__(self):
        r2 = np.array(self.r2, dtype=np.int64, copy=True)
        area = np.array(self.area, dtype=np.int64, copy=True)
        if r2.shape != area.shape or r2.ndim != 1 or r2.size == 0:
            raise PreconditionError("histogram needs matching non-empty r2/area arrays")
        if r2[0] != 0 or np.any(np.diff(r2) <= 0) or np.any(np.diff(area) <= 0):
            raise PreconditionError("histogram entries must start at r2=0 and increase strictly")
        if r2[-1] > int(self.r_max) ** 2:
            raise PreconditionError("histogram extends beyond r_max")
        r2.flags.writeable = False
        area.flags.writeable = False
        object.__setattr__(self, "r2", r2)
        object.__setattr__(self, "area", area)
        object.__setattr__(self, "r_max", int(self.r_max))

    @property
    def entries(self) -> list[tuple[int, int]]:
        return list(zip(self.r2.tolist(), self.area.tolist()))

    def truncate(self, r_max: int) -> "InfluenceHistogram":
        """The histogram the same shape would give for a smaller ``r_max``."""
        r_max = int(r_max)
        if r_max > self.r_max:
            raise PreconditionError(f"cannot extend histogram from r_max={self.r_max} to {r_max}")
        keep = self.r2 <= r_max * r_max
        return InfluenceHistogram(self.r2[keep], self.area[keep], r_max)

    def __eq__(self, other):
        if not isinstance(other, InfluenceHistogram):
            return NotImplemented
        return (
            self.r_max == other.r_max
            and np.array_equal(self.r2, other.r2)
            and np.array_equal(self.area, other.area)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class LogLogCurve:
    """Points ``(t, u) = (ln r, ln A(r))`` with ``t`` strictly ascending."""

    t: np.ndarray
    u: np.ndarray

    def __post_init__(self):
        t = np.array(self.t, dtype=np.float64, copy=True)
        u = np.array(self.u, dtype=np.float64, copy=True)
        if t.shape != u.shape or t.ndim != 1:
            raise PreconditionError("t and u must be 1-D arrays of equal length")
        if np.any(np.diff(t) <= 0):
            raise PreconditionError("t must be strictly ascending")
        t.flags.writeable = False
        u.flags.writeable = False
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "u", u)

    def __len__(self):
        return self.t.size

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.t.tolist(), self.u.tolist()))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t,u\n")
        for t, u in zip(self.t.tolist(), self.u.tolist()):
            buf.write(f"{t!r},{u!r}\n")
        return buf.getvalue()


@dataclass(frozen=True)
class FdFit:
    slope: float
    intercept: float
    dimension: float
    residual: float
    n_points: int

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "intercept": self.intercept,
            "dimension": self.dimension,
            "residual": self.residual,
            "n_points": self.n_points,
        }


def influence_histogram(dmap: DistanceMap, r_max: int) -> InfluenceHistogram:
    """Dilated area for every squared distance attained up to ``r_max**2``.

    The distance map must come from a shape padded by at least ``r_max``;
    otherwise the canvas border clips the dilation.
    """
    r_max = int(r_max)
    if r_max < 1:
        raise PreconditionError(f"r_max must be >= 1, got {r_max}")
    d2 = dmap.d2.ravel()
    counts = np.bincount(d2[d2 <= r_max * r_max], minlength=1)
    attained = np.flatnonzero(counts)
    area = np.cumsum(counts)[attained]
    return InfluenceHistogram(attained, area, r_max)


def loglog_curve(hist: InfluenceHistogram) -> LogLogCurve:
    """Log radius against log area; the ``r = 0`` entry is dropped."""
    usable = hist.r2 >= 1
    if np.count_nonzero(usable) < 3:
        raise PreconditionError("degenerate curve: fewer than 3 entries with r >= 1")
    r2 = hist.r2[usable].astype(np.float64)
    return LogLogCurve(0.5 * np.log(r2), np.log(hist.area[usable].astype(np.float64)))


def fit_fd(curve: LogLogCurve, t_lo: float | None = None, t_hi: float | None = None) -> FdFit:
    """Least-squares line through the curve points with ``t_lo <= t <= t_hi``.

    The fractal dimension is ``2 - slope``. Omitted bounds mean the curve's
    own extent.
    """
    t, u = curve.t, curve.u
    mask = np.ones(t.size, dtype=bool)
    if t_lo is not None:
        mask &= t >= t_lo
    if t_hi is not None:
        mask &= t <= t_hi
    t, u = t[mask], u[mask]
    if t.size < 2:
        raise PreconditionError(f"fit needs at least 2 points in range, got {t.size}")
    tc = t - t.mean()
    sxx = float(np.dot(tc, tc))
    if sxx == 0.0:
        raise PreconditionError("singular fit: all t values identical")
    slope = float(np.dot(tc, u - u.mean()) / sxx)
    intercept = float(u.mean() - slope * t.mean())
    resid = u - (slope * t + intercept)
    rms = float(np.sqrt(np.mean(resid * resid)))
    return FdFit(slope, intercept, 2.0 - slope, rms, int(t.size))
