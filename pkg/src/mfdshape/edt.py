"""Exact squared Euclidean distance transform.

Every pixel receives the squared distance to its nearest foreground pixel.
The fast path is the separable two-pass scheme (per-column 1-D distances,
then a lower envelope of parabolas along each row), compiled with numba.
All arithmetic stays in integers except the parabola intersections, whose
numerators and denominators are small enough to be compared exactly.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numba
import numpy as np
from scipy.spatial.distance import cdist

from .errors import PreconditionError
from .raster import BinaryShape, require_foreground


@dataclass(frozen=True, eq=False)
class DistanceMap:
    """Squared distances, ``d2[row, col]``, zero exactly on the foreground."""

    d2: np.ndarray

    def __post_init__(self):
        arr = np.array(self.d2, dtype=np.int64, copy=True)
        if arr.ndim != 2:
            raise PreconditionError("distance map must be 2-D")
        arr.flags.writeable = False
        object.__setattr__(self, "d2", arr)

    @property
    def width(self) -> int:
        return self.d2.shape[1]

    @property
    def height(self) -> int:
        return self.d2.shape[0]

    def __eq__(self, other):
        if not isinstance(other, DistanceMap):
            return NotImplemented
        return bool(np.array_equal(self.d2, other.d2))

    __hash__ = None

    def to_csv(self) -> str:
        """One CSV line per image row, no header."""
        buf = io.StringIO()
        np.savetxt(buf, self.d2, fmt="%d", delimiter=",")
        return buf.getvalue()


@numba.njit(cache=True)
def _column_pass(fg):
    h, w = fg.shape
    inf = -1
    g = np.empty((h, w), dtype=np.int64)
    for x in range(w):
        # forward: rows since the last foreground pixel above
        last = inf
        for y in range(h):
            if fg[y, x]:
                last = y
                g[y, x] = 0
            elif last == inf:
                g[y, x] = inf
            else:
                g[y, x] = y - last
        last = inf
        for y in range(h - 1, -1, -1):
            if fg[y, x]:
                last = y
            elif last != inf:
                d = last - y
                if g[y, x] == inf or d < g[y, x]:
                    g[y, x] = d
    return g


@numba.njit(cache=True)
def _row_pass(g):
    h, w = g.shape
    out = np.empty((h, w), dtype=np.int64)
    v = np.empty(w, dtype=np.int64)
    z = np.empty(w + 1, dtype=np.float64)
    f = np.empty(w, dtype=np.int64)
    for y in range(h):
        for x in range(w):
            gx = g[y, x]
            f[x] = gx * gx if gx >= 0 else -1
        # lower envelope of x -> (x - q)^2 + f[q] over columns with finite f
        k = -1
        for q in range(w):
            if f[q] < 0:
                continue
            if k < 0:
                k = 0
                v[0] = q
                z[0] = -np.inf
                z[1] = np.inf
                continue
            p = v[k]
            s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p))
            # z[0] is -inf, so this stops at k == 0 at the latest
            while s <= z[k]:
                k -= 1
                p = v[k]
                s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p))
            k += 1
            v[k] = q
            z[k] = s
            z[k + 1] = np.inf
        k = 0
        for x in range(w):
            while z[k + 1] < x:
                k += 1
            d = x - v[k]
            out[y, x] = d * d + f[v[k]]
    return out


def squared_edt(shape: BinaryShape) -> DistanceMap:
    """Exact squared Euclidean distance of every pixel to the foreground.

    Raises
    ------
    PreconditionError
        If the shape has no foreground pixel.
    """
    require_foreground(shape)
    fg = np.ascontiguousarray(shape.pixels)
    return DistanceMap(_row_pass(_column_pass(fg)))


def brute_force_edt(shape: BinaryShape) -> DistanceMap:
    """All-pairs reference transform; quadratic cost, meant for tests."""
    require_foreground(shape)
    h, w = shape.pixels.shape
    fg = np.argwhere(shape.pixels)
    everywhere = np.argwhere(np.ones((h, w), dtype=bool))
    best = np.empty(h * w, dtype=np.float64)
    # chunk the query pixels to bound memory
    for start in range(0, everywhere.shape[0], 4096):
        block = cdist(everywhere[start:start + 4096], fg, metric="sqeuclidean")
        best[start:start + 4096] = block.min(axis=1)
    return DistanceMap(np.rint(best).astype(np.int64).reshape(h, w))
