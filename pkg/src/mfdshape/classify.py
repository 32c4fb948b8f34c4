"""Nearest-centroid classification of fractal signatures and experiment sweeps.

Three signature kinds are supported:

``mfd``
    the sampled MFD curve itself;
``descriptors``
    its first ``k`` normalised Fourier magnitudes;
``fd``
    the scalar Bouligand-Minkowski dimension (a 1-vector).

Each class is represented by the mean of its training signatures and a
sample is assigned to the closest centroid in Euclidean distance, ties going
to the lexicographically smallest label.
"""

from __future__ import annotations

import io
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from . import mfd as mfd_mod
from .dataset import LEVELS, DatasetManifest, SampleRecord, load_manifest
from .errors import MfdShapeError, PreconditionError
from .minkowski import InfluenceHistogram, fit_fd
from .raster import BinaryShape, load_pbm
from .spectral import DEFAULT_DESCRIPTORS, fourier_descriptors

SCHEMA_VERSION = 1
SIGNATURE_KINDS = ("mfd", "descriptors", "fd")

DEFAULT_R_VALUES = (10, 15, 20, 25, 30, 35, 40, 45, 50, 75, 100, 125, 150, 175, 200, 225)
DEFAULT_SIGMA_VALUES = (10.0, 15.0, 20.0, 25.0)
DEFAULT_PER_LEVEL_TRAIN = 3
DEFAULT_SPLIT_SEED = 0


@dataclass(frozen=True)
class SignatureParams:
    kind: str
    r_max: int
    sigma: float | None
    n: int | None
    r_min: float
    k: int | None


@dataclass(frozen=True, eq=False)
class ClassModel:
    label: str
    centroid: np.ndarray
    signature_kind: str
    params: SignatureParams | None = None


@dataclass
class ConfusionMatrix:
    """``counts[i, j]``: test samples of class ``labels[i]`` predicted as ``labels[j]``."""

    labels: list[str]
    counts: np.ndarray

    @classmethod
    def from_predictions(cls, labels, truth, predicted) -> "ConfusionMatrix":
        index = {lab: i for i, lab in enumerate(labels)}
        counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
        for t, p in zip(truth, predicted):
            counts[index[t], index[p]] += 1
        return cls(list(labels), counts)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def success_rate(self) -> float:
        total = self.total
        return float(np.trace(self.counts)) / total if total else 0.0

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("true\\pred," + ",".join(self.labels) + "\n")
        for lab, row in zip(self.labels, self.counts):
            buf.write(lab + "," + ",".join(str(int(c)) for c in row) + "\n")
        return buf.getvalue()

    def to_text(self) -> str:
        width = max(3, len(str(int(self.counts.max(initial=0)))) + 1, max(len(l) for l in self.labels) + 1)
        lines = [" " * width + "".join(l.rjust(width) for l in self.labels)]
        for lab, row in zip(self.labels, self.counts):
            cells = "".join((str(int(c)) if c else ".").rjust(width) for c in row)
            lines.append(lab.rjust(width) + cells)
        return "\n".join(lines)


@dataclass
class ExperimentConfig:
    manifest: str
    r_values: list[int] = field(default_factory=lambda: list(DEFAULT_R_VALUES))
    sigma_values: list[float] = field(default_factory=lambda: list(DEFAULT_SIGMA_VALUES))
    signature_kind: str = "mfd"
    k: int = DEFAULT_DESCRIPTORS
    per_level_train: int = DEFAULT_PER_LEVEL_TRAIN
    split_seed: int = DEFAULT_SPLIT_SEED
    n: int = mfd_mod.DEFAULT_SAMPLES
    r_min: float = mfd_mod.DEFAULT_R_MIN
    jobs: int = 1

    def validate(self) -> None:
        if self.signature_kind not in SIGNATURE_KINDS:
            raise PreconditionError(f"signature kind must be one of {SIGNATURE_KINDS}, got {self.signature_kind!r}")
        if not self.r_values:
            raise PreconditionError("r sweep must not be empty")
        if self.signature_kind != "fd" and not self.sigma_values:
            raise PreconditionError("sigma sweep must not be empty")
        for r in self.r_values:
            if int(r) != r or r < 1:
                raise PreconditionError(f"r values must be integers >= 1, got {r}")
            if r < self.r_min:
                raise PreconditionError(f"r={r} is below r_min={self.r_min}")
        for s in self.sigma_values:
            if s < 0:
                raise PreconditionError(f"sigma must be >= 0, got {s}")
        if self.signature_kind == "descriptors" and not 1 <= self.k <= self.n:
            raise PreconditionError(f"descriptor count k must be in [1, {self.n}], got {self.k}")
        if self.n < mfd_mod.MIN_SAMPLES:
            raise PreconditionError(f"n must be >= {mfd_mod.MIN_SAMPLES}, got {self.n}")
        if self.r_min < 1:
            raise PreconditionError(f"r_min must be >= 1, got {self.r_min}")
        if self.jobs < 1:
            raise PreconditionError(f"jobs must be >= 1, got {self.jobs}")

    def sweep(self) -> list[tuple[int, float | None]]:
        sigmas = [None] if self.signature_kind == "fd" else [float(s) for s in self.sigma_values]
        return [(int(r), s) for r in self.r_values for s in sigmas]


# --- signatures ------------------------------------------------------------


def signature_params(kind: str, r_max: int, sigma=None, n=None, r_min=mfd_mod.DEFAULT_R_MIN, k=None) -> SignatureParams:
    if kind == "fd":
        return SignatureParams("fd", int(r_max), None, None, float(r_min), None)
    if kind == "mfd":
        return SignatureParams("mfd", int(r_max), float(sigma), int(n), float(r_min), None)
    if kind == "descriptors":
        return SignatureParams("descriptors", int(r_max), float(sigma), int(n), float(r_min), int(k))
    raise PreconditionError(f"unknown signature kind {kind!r}")


def signature_from_histogram(hist: InfluenceHistogram, params: SignatureParams) -> np.ndarray:
    """Signature vector of one shape given its influence histogram.

    ``hist`` may extend beyond ``params.r_max``; it is truncated first.
    """
    if hist.r_max != params.r_max:
        hist = hist.truncate(params.r_max)
    if params.kind == "fd":
        fit = fit_fd(mfd_mod.trimmed_curve(hist, params.r_min))
        return np.array([fit.dimension])
    curve = mfd_mod.mfd_from_histogram(hist, params.sigma, params.n, params.r_min)
    if params.kind == "mfd":
        return np.array(curve.values)
    return np.array(fourier_descriptors(curve, params.k).magnitudes)


def shape_signature(shape: BinaryShape, params: SignatureParams) -> np.ndarray:
    return signature_from_histogram(mfd_mod.shape_histogram(shape, params.r_max), params)


# --- training and prediction -------------------------------------------------


def split_train_test(manifest: DatasetManifest, per_level_train: int = DEFAULT_PER_LEVEL_TRAIN, seed: int = DEFAULT_SPLIT_SEED):
    """Seeded per-(class, level) split into disjoint train and test lists.

    Exactly ``per_level_train`` records of every cell go to training. Both
    lists keep manifest order.
    """
    per_level_train = int(per_level_train)
    if per_level_train < 1:
        raise PreconditionError(f"per_level_train must be >= 1, got {per_level_train}")
    cells: dict[tuple[str, int], list[int]] = {}
    for i, rec in enumerate(manifest.records):
        cells.setdefault((rec.label, rec.level), []).append(i)
    rng = np.random.default_rng(int(seed))
    train_idx = set()
    for key in sorted(cells):
        members = cells[key]
        if len(members) <= per_level_train:
            raise PreconditionError(
                f"insufficient samples in cell {key}: {len(members)} available, {per_level_train} requested for training"
            )
        chosen = rng.choice(len(members), size=per_level_train, replace=False)
        train_idx.update(members[j] for j in chosen)
    train = [r for i, r in enumerate(manifest.records) if i in train_idx]
    test = [r for i, r in enumerate(manifest.records) if i not in train_idx]
    return train, test


def models_from_signatures(labels: Sequence[str], signatures: Sequence[np.ndarray], kind: str, params=None) -> list[ClassModel]:
    """Per-class arithmetic means, returned sorted by label."""
    if len(labels) != len(signatures) or not labels:
        raise PreconditionError("need one signature per training label")
    dims = {np.asarray(s).shape for s in signatures}
    if len(dims) != 1:
        raise PreconditionError(f"training signatures have mixed dimensions {sorted(dims)}")
    grouped: dict[str, list[np.ndarray]] = {}
    for lab, sig in zip(labels, signatures):
        grouped.setdefault(lab, []).append(np.asarray(sig, dtype=np.float64))
    return [
        ClassModel(lab, np.mean(np.stack(grouped[lab]), axis=0), kind, params)
        for lab in sorted(grouped)
    ]


def build_models(train: Sequence[tuple[str, BinaryShape]], signature_kind: str, r: int, sigma=None, k=None,
                 n: int = mfd_mod.DEFAULT_SAMPLES, r_min: float = mfd_mod.DEFAULT_R_MIN) -> list[ClassModel]:
    """Class centroids from ``(label, shape)`` training pairs."""
    params = signature_params(signature_kind, r, sigma, n, r_min, k)
    labels, sigs = [], []
    for i, (label, shape) in enumerate(train):
        try:
            sigs.append(shape_signature(shape, params))
        except MfdShapeError as exc:
            raise type(exc)(f"training sample {i} ({label}): {exc}") from exc
        labels.append(label)
    return models_from_signatures(labels, sigs, signature_kind, params)


def classify_sample(signature, models: Sequence[ClassModel]) -> str:
    """Label of the nearest centroid; exact ties go to the smallest label."""
    if not models:
        raise PreconditionError("no class models")
    sig = np.atleast_1d(np.asarray(signature, dtype=np.float64))
    ordered = sorted(models, key=lambda m: m.label)
    centroids = np.stack([np.atleast_1d(m.centroid) for m in ordered])
    if centroids.shape[1:] != sig.shape:
        raise PreconditionError(f"signature dimension {sig.shape} does not match models {centroids.shape[1:]}")
    dist = np.sqrt(np.sum((centroids - sig) ** 2, axis=1))
    return ordered[int(np.argmin(dist))].label


# --- experiment -----------------------------------------------------------------


def _histogram_job(args) -> InfluenceHistogram:
    path, r_max = args
    return mfd_mod.shape_histogram(load_pbm(path), r_max)


def _histograms(manifest: DatasetManifest, records: Sequence[SampleRecord], r_max: int, jobs: int):
    tasks = [(str(manifest.resolve(rec)), r_max) for rec in records]
    if jobs <= 1:
        out = []
        for rec, task in zip(records, tasks):
            try:
                out.append(_histogram_job(task))
            except MfdShapeError as exc:
                raise type(exc)(f"{rec.path}: {exc}") from exc
        return out
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        # map preserves input order, so results do not depend on scheduling
        return list(pool.map(_histogram_job, tasks, chunksize=16))


def run_experiment(config: ExperimentConfig, manifest: DatasetManifest | None = None) -> dict:
    """Train/test every configuration of the sweep and return a JSON-able report."""
    config.validate()
    if manifest is None:
        manifest = load_manifest(config.manifest)
    train, test = split_train_test(manifest, config.per_level_train, config.split_seed)
    records = train + test
    r_big = max(int(r) for r in config.r_values)
    hists = _histograms(manifest, records, r_big, config.jobs)
    train_h, test_h = hists[:len(train)], hists[len(train):]

    results = []
    for r, sigma in config.sweep():
        params = signature_params(config.signature_kind, r, sigma, config.n, config.r_min, config.k)

        def sigs(recs, hs):
            out = []
            for rec, h in zip(recs, hs):
                try:
                    out.append(signature_from_histogram(h, params))
                except MfdShapeError as exc:
                    raise type(exc)(f"{rec.path} (r={r}, sigma={sigma}): {exc}") from exc
            return out

        models = models_from_signatures([t.label for t in train], sigs(train, train_h), config.signature_kind, params)
        predicted = [classify_sample(s, models) for s in sigs(test, test_h)]
        truth = [t.label for t in test]
        cm = ConfusionMatrix.from_predictions(sorted(manifest.classes), truth, predicted)
        per_level = {}
        for level in LEVELS:
            idx = [i for i, t in enumerate(test) if t.level == level]
            if idx:
                per_level[str(level)] = sum(truth[i] == predicted[i] for i in idx) / len(idx)
        results.append({
            "kind": config.signature_kind,
            "r": r,
            "sigma": sigma,
            "k": params.k,
            "n": params.n,
            "r_min": params.r_min,
            "n_train": len(train),
            "n_test": len(test),
            "success_rate": cm.success_rate,
            "per_level_success": per_level,
            "confusion": {"labels": cm.labels, "counts": cm.counts.tolist()},
        })

    cfg = asdict(config)
    cfg.pop("jobs")
    return {"schema_version": SCHEMA_VERSION, "config": cfg, "results": results}


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2) + "\n"


def confusion_from_result(result: dict) -> ConfusionMatrix:
    conf = result["confusion"]
    return ConfusionMatrix(list(conf["labels"]), np.array(conf["counts"], dtype=np.int64))


def report_to_text(report: dict) -> str:
    """Aligned summary table followed by each confusion matrix."""
    rows = [("kind", "r", "sigma", "k", "success") + tuple(f"L{l}" for l in LEVELS)]
    for res in report["results"]:
        levels = tuple(
            f"{res['per_level_success'][str(l)]:.4f}" if str(l) in res["per_level_success"] else "-" for l in LEVELS
        )
        rows.append((
            res["kind"], str(res["r"]),
            "-" if res["sigma"] is None else f"{res['sigma']:g}",
            "-" if res["k"] is None else str(res["k"]),
            f"{res['success_rate']:.4f}",
        ) + levels)
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    out = ["  ".join(cell.rjust(w) for cell, w in zip(row, widths)) for row in rows]
    for res in report["results"]:
        sigma = "" if res["sigma"] is None else f", sigma={res['sigma']:g}"
        out.append("")
        out.append(f"{res['kind']} r={res['r']}{sigma}: success rate {100 * res['success_rate']:.2f}%")
        out.append(confusion_from_result(res).to_text())
    return "\n".join(out) + "\n"
