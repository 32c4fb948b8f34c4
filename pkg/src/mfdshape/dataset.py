"""Synthetic noisy-letter dataset.

Clean samples are uppercase letters from an embedded 5x7 bitmap font,
scaled up by an integer factor with nearest-neighbour replication. Diagonal
joints in the font are bridged with half-cell fillets so every glyph is
4-connected after scaling.

Noisy samples flip each boundary pixel (a pixel with at least one
4-neighbour of the opposite colour) independently with a level-dependent
probability, then keep only the largest 4-connected foreground component.

On disk a dataset is a directory of P4 PBM files plus ``manifest.jsonl``:
one JSON object per line, the first being a header (``"kind": "header"``)
and the rest sample records with ``label``, ``level``, ``seed``, ``path``.
"""

from __future__ import annotations

import json
import os
import string
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import ndimage

from .errors import ParseError, PreconditionError
from .raster import BinaryShape, encode_pbm, load_pbm

NOISE_PROBABILITIES = {1: 0.05, 2: 0.10, 3: 0.20, 4: 0.30}
LEVELS = (0, 1, 2, 3, 4)
MANIFEST_NAME = "manifest.jsonl"
MAX_ATTEMPTS = 10

DEFAULT_IMAGE_SIZE = 64
DEFAULT_SAMPLES_PER_CELL = 10
DEFAULT_SEED = 0

_FONT_ROWS = {
    "A": (".###.", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "B": ("####.", "#...#", "#...#", "####.", "#...#", "#...#", "####."),
    "C": (".###.", "#...#", "#....", "#....", "#....", "#...#", ".###."),
    "D": ("####.", "#...#", "#...#", "#...#", "#...#", "#...#", "####."),
    "E": ("#####", "#....", "#....", "####.", "#....", "#....", "#####"),
    "F": ("#####", "#....", "#....", "####.", "#....", "#....", "#...."),
    "G": (".###.", "#...#", "#....", "#.###", "#...#", "#...#", ".####"),
    "H": ("#...#", "#...#", "#...#", "#####", "#...#", "#...#", "#...#"),
    "I": ("..#..", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "J": ("....#", "....#", "....#", "....#", "....#", "#...#", ".###."),
    "K": ("#...#", "#..#.", "#.#..", "##...", "#.#..", "#..#.", "#...#"),
    "L": ("#....", "#....", "#....", "#....", "#....", "#....", "#####"),
    "M": ("#...#", "##.##", "#.#.#", "#.#.#", "#...#", "#...#", "#...#"),
    "N": ("#...#", "#...#", "##..#", "#.#.#", "#..##", "#...#", "#...#"),
    "O": (".###.", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "P": ("####.", "#...#", "#...#", "####.", "#....", "#....", "#...."),
    "Q": (".###.", "#...#", "#...#", "#...#", "#.#.#", "#..#.", ".##.#"),
    "R": ("####.", "#...#", "#...#", "####.", "#.#..", "#..#.", "#...#"),
    "S": (".####", "#....", "#....", ".###.", "....#", "....#", "####."),
    "T": ("#####", "..#..", "..#..", "..#..", "..#..", "..#..", "..#.."),
    "U": ("#...#", "#...#", "#...#", "#...#", "#...#", "#...#", ".###."),
    "V": ("#...#", "#...#", "#...#", "#...#", "#...#", ".#.#.", "..#.."),
    "W": ("#...#", "#...#", "#...#", "#.#.#", "#.#.#", "#.#.#", ".#.#."),
    "X": ("#...#", "#...#", ".#.#.", "..#..", ".#.#.", "#...#", "#...#"),
    "Y": ("#...#", "#...#", ".#.#.", "..#..", "..#..", "..#..", "..#.."),
    "Z": ("#####", "....#", "...#.", "..#..", ".#...", "#....", "#####"),
}

FONT = {
    letter: np.array([[c == "#" for c in row] for row in rows], dtype=bool)
    for letter, rows in _FONT_ROWS.items()
}

_FOUR = ndimage.generate_binary_structure(2, 1)


def glyph(letter: str, size: int = DEFAULT_IMAGE_SIZE) -> BinaryShape:
    """Clean ``size x size`` raster of an uppercase letter.

    The 5x7 cell grid is scaled by ``floor(0.8 * size / 7)`` and centred, so
    at least 10% of the canvas is left empty on each side.
    """
    if not isinstance(letter, str) or letter not in FONT:
        raise PreconditionError(f"unsupported character {letter!r}")
    size = int(size)
    if size < 32:
        raise PreconditionError(f"glyph size must be >= 32, got {size}")
    cells = FONT[letter]
    rows, cols = cells.shape
    scale = int(0.8 * size) // rows
    half = (scale + 1) // 2
    block = np.zeros((rows * scale, cols * scale), dtype=bool)
    for r, c in zip(*np.nonzero(cells)):
        block[r * scale:(r + 1) * scale, c * scale:(c + 1) * scale] = True

    def fill(r, c, top, left):
        y0 = r * scale + (0 if top else scale - half)
        x0 = c * scale + (0 if left else scale - half)
        block[y0:y0 + half, x0:x0 + half] = True

    for r in range(rows - 1):
        for c in range(cols - 1):
            a, b = cells[r, c], cells[r, c + 1]
            d, e = cells[r + 1, c], cells[r + 1, c + 1]
            if a and e and not b and not d:
                fill(r, c + 1, top=False, left=True)
                fill(r + 1, c, top=True, left=False)
            if b and d and not a and not e:
                fill(r, c, top=False, left=False)
                fill(r + 1, c + 1, top=True, left=True)

    canvas = np.zeros((size, size), dtype=bool)
    y0 = (size - block.shape[0]) // 2
    x0 = (size - block.shape[1]) // 2
    canvas[y0:y0 + block.shape[0], x0:x0 + block.shape[1]] = block
    return BinaryShape(canvas)


def boundary_mask(pixels: np.ndarray) -> np.ndarray:
    """Pixels with a 4-neighbour of the other colour (outside counts as background)."""
    p = np.pad(pixels, 1, constant_values=False)
    centre = p[1:-1, 1:-1]
    differs = np.zeros_like(centre)
    for nb in (p[:-2, 1:-1], p[2:, 1:-1], p[1:-1, :-2], p[1:-1, 2:]):
        differs |= nb != centre
    return differs


def flip_boundary(pixels: np.ndarray, p: float, rng: np.random.Generator) -> np.ndarray:
    """Flip every boundary pixel independently with probability ``p``."""
    pixels = np.asarray(pixels, dtype=bool)
    flips = boundary_mask(pixels) & (rng.random(pixels.shape) < p)
    return pixels ^ flips


def largest_component(pixels: np.ndarray) -> np.ndarray:
    """Largest 4-connected foreground component; ties go to the first in raster order."""
    labels, count = ndimage.label(pixels, structure=_FOUR)
    if count == 0:
        return np.zeros_like(pixels, dtype=bool)
    sizes = np.bincount(labels.ravel())[1:]
    return labels == (int(np.argmax(sizes)) + 1)


class NoiseError(PreconditionError):
    pass


def add_boundary_noise(shape: BinaryShape, level: int, seed: int, p: float | None = None) -> BinaryShape:
    """Boundary-flip noise at ``level`` (1-4), reproducible from ``seed``.

    ``p`` overrides the level's flip probability.

    Raises
    ------
    NoiseError
        If no foreground survives.
    """
    if level not in NOISE_PROBABILITIES:
        raise PreconditionError(f"noise level must be one of 1..4, got {level}")
    prob = NOISE_PROBABILITIES[level] if p is None else float(p)
    rng = np.random.default_rng(int(seed))
    noisy = largest_component(flip_boundary(shape.pixels, prob, rng))
    if not noisy.any():
        raise NoiseError("noise destroyed shape")
    return BinaryShape(noisy)


def sample_seed(base_seed: int, label: str, level: int, index: int, attempt: int = 0) -> int:
    ss = np.random.SeedSequence(int(base_seed), spawn_key=(ord(label), int(level), int(index), int(attempt)))
    return int(ss.generate_state(1, dtype=np.uint32)[0])


@dataclass(frozen=True)
class SampleRecord:
    label: str
    level: int
    seed: int
    path: str  # relative to the manifest directory
    index: int = 0


@dataclass
class DatasetManifest:
    classes: list[str]
    image_size: int
    samples_per_cell: int
    records: list[SampleRecord] = field(default_factory=list)
    base_seed: int = DEFAULT_SEED
    root: Path = Path(".")

    def resolve(self, record: SampleRecord) -> Path:
        return self.root / record.path

    def load(self, record: SampleRecord) -> BinaryShape:
        return load_pbm(self.resolve(record))

    def cell_counts(self) -> dict[tuple[str, int], int]:
        counts: dict[tuple[str, int], int] = {}
        for rec in self.records:
            counts[(rec.label, rec.level)] = counts.get((rec.label, rec.level), 0) + 1
        return counts

    def header(self) -> dict:
        return {
            "kind": "header",
            "classes": list(self.classes),
            "image_size": self.image_size,
            "samples_per_cell": self.samples_per_cell,
            "base_seed": self.base_seed,
            "levels": list(LEVELS),
            "noise_probabilities": {str(k): v for k, v in NOISE_PROBABILITIES.items()},
        }

    def to_jsonl(self) -> str:
        lines = [json.dumps(self.header(), sort_keys=True)]
        for rec in self.records:
            lines.append(json.dumps(
                {"label": rec.label, "level": rec.level, "index": rec.index, "seed": rec.seed, "path": rec.path},
                sort_keys=True,
            ))
        return "\n".join(lines) + "\n"


def load_manifest(path) -> DatasetManifest:
    path = Path(path)
    if path.is_dir():
        path = path / MANIFEST_NAME
    with open(path, "r", encoding="utf-8") as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ParseError("empty manifest", 0, path)
    try:
        header = json.loads(lines[0])
        if header.get("kind") != "header":
            raise ParseError("first manifest line must be the header", 0, path)
        records = []
        for line in lines[1:]:
            obj = json.loads(line)
            records.append(SampleRecord(obj["label"], int(obj["level"]), int(obj["seed"]), obj["path"], int(obj.get("index", 0))))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ParseError(f"invalid manifest: {exc}", None, path) from exc
    return DatasetManifest(
        classes=list(header["classes"]),
        image_size=int(header["image_size"]),
        samples_per_cell=int(header["samples_per_cell"]),
        records=records,
        base_seed=int(header.get("base_seed", 0)),
        root=path.parent,
    )


def _write_if_changed(path: Path, data: bytes) -> None:
    # unchanged files are left untouched so reruns are idempotent
    try:
        if path.read_bytes() == data:
            return
    except FileNotFoundError:
        pass
    path.write_bytes(data)


def make_sample(label: str, level: int, index: int, image_size: int, base_seed: int) -> tuple[BinaryShape, int]:
    """Shape and effective seed of one dataset sample."""
    clean = glyph(label, image_size)
    if level == 0:
        return clean, sample_seed(base_seed, label, 0, index)
    last_error = None
    for attempt in range(MAX_ATTEMPTS):
        seed = sample_seed(base_seed, label, level, index, attempt)
        try:
            return add_boundary_noise(clean, level, seed), seed
        except NoiseError as exc:
            last_error = exc
    raise NoiseError(f"{label} level {level} #{index}: {last_error} after {MAX_ATTEMPTS} attempts")


def generate(
    out_dir,
    classes=tuple(string.ascii_uppercase),
    image_size: int = DEFAULT_IMAGE_SIZE,
    samples_per_cell: int = DEFAULT_SAMPLES_PER_CELL,
    base_seed: int = DEFAULT_SEED,
) -> DatasetManifest:
    """Write the dataset under ``out_dir`` and return its manifest.

    Every (class, level) cell receives ``samples_per_cell`` images; file
    bytes depend only on the arguments.
    """
    classes = list(classes)
    if not classes:
        raise PreconditionError("at least one class is required")
    for c in classes:
        if c not in FONT:
            raise PreconditionError(f"unsupported character {c!r}")
    if len(set(classes)) != len(classes):
        raise PreconditionError("duplicate class labels")
    samples_per_cell = int(samples_per_cell)
    if samples_per_cell < 4:
        raise PreconditionError(f"samples_per_cell must be >= 4, got {samples_per_cell}")
    if int(image_size) < 32:
        raise PreconditionError(f"image_size must be >= 32, got {image_size}")

    root = Path(out_dir)
    root.mkdir(parents=True, exist_ok=True)
    manifest = DatasetManifest(classes, int(image_size), samples_per_cell, base_seed=int(base_seed), root=root)
    for label in classes:
        (root / label).mkdir(exist_ok=True)
        for level in LEVELS:
            for index in range(samples_per_cell):
                shape, seed = make_sample(label, level, index, manifest.image_size, manifest.base_seed)
                rel = f"{label}/{label}_L{level}_{index:03d}.pbm"
                _write_if_changed(root / rel, encode_pbm(shape))
                manifest.records.append(SampleRecord(label, level, seed, rel, index))
    _write_if_changed(root / MANIFEST_NAME, manifest.to_jsonl().encode("utf-8"))
    return manifest
