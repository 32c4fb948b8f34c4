"""Shape generators and brute-force oracles shared by the tests."""

import numpy as np

from mfdshape import BinaryShape


def single_pixel():
    return BinaryShape(np.ones((1, 1), dtype=bool))


def horizontal_line(length):
    return BinaryShape(np.ones((1, length), dtype=bool))


def filled_disc(radius):
    yy, xx = np.mgrid[-radius:radius + 1, -radius:radius + 1]
    return BinaryShape(xx * xx + yy * yy <= radius * radius)


def random_shape(rng, h, w, density=None):
    """Random blob-ish mask with at least one foreground pixel."""
    density = rng.uniform(0.02, 0.6) if density is None else density
    mask = rng.random((h, w)) < density
    if not mask.any():
        mask[rng.integers(h), rng.integers(w)] = True
    return BinaryShape(mask)


def koch_points(level, base):
    pts = np.array([[0.0, 0.0], [float(base), 0.0]])
    c, s = 0.5, np.sqrt(3) / 2
    rot = np.array([[c, -s], [s, c]])
    for _ in range(level):
        out = [pts[0]]
        for a, b in zip(pts[:-1], pts[1:]):
            d = (b - a) / 3
            out += [a + d, a + d + rot @ d, a + 2 * d, b]
        pts = np.array(out)
    return pts


def koch_curve(level, base):
    """Rasterised Koch curve; segments are sampled at quarter-pixel steps."""
    pts = koch_points(level, base)
    samples = []
    for a, b in zip(pts[:-1], pts[1:]):
        m = int(np.ceil(np.abs(b - a).max() * 4)) + 1
        samples.append(a + (b - a) * np.linspace(0, 1, m)[:, None])
    xy = np.concatenate(samples)
    xy[:, 1] *= -1
    ij = np.rint(xy).astype(int)
    ij -= ij.min(axis=0)
    img = np.zeros((ij[:, 1].max() + 1, ij[:, 0].max() + 1), dtype=bool)
    img[ij[:, 1], ij[:, 0]] = True
    return BinaryShape(img)


def disc_offsets(r2_max):
    """Integer offsets (dy, dx, dy^2 + dx^2) with squared length <= r2_max, sorted by length."""
    r = int(np.floor(np.sqrt(r2_max)))
    dy, dx = np.mgrid[-r:r + 1, -r:r + 1]
    d2 = dy * dy + dx * dx
    keep = d2 <= r2_max
    order = np.argsort(d2[keep], kind="stable")
    return dy[keep][order], dx[keep][order], d2[keep][order]


def dilation_areas(mask, r_max):
    """Area of the union of discrete discs of squared radius v around every
    foreground pixel, for every v <= r_max^2 that is a sum of two squares.

    Direct morphological dilation on a canvas large enough that no disc is
    clipped; independent of any distance transform.
    """
    mask = np.asarray(mask, dtype=bool)
    canvas = np.pad(mask, r_max + 1)
    union = canvas.copy()
    ys, xs = np.nonzero(canvas)
    dy, dx, d2 = disc_offsets(r_max * r_max)
    areas = {}
    i = 0
    while i < d2.size:
        v = d2[i]
        j = i
        while j < d2.size and d2[j] == v:
            union[ys + dy[j], xs + dx[j]] = True
            j += 1
        areas[int(v)] = int(union.sum())
        i = j
    return areas


def total_variation(x):
    return float(np.abs(np.diff(np.asarray(x))).sum())
