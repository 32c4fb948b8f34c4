"""Command-line interface.

Exit status: 0 on success, 2 for I/O and parse failures, 3 for violated
preconditions (bad parameters, empty shapes, ...), 1 for anything else.
Data goes to stdout (or ``--out``); diagnostics go to stderr as one line.
"""

from __future__ import annotations

import argparse
import json
import string
import sys
from pathlib import Path

from . import __version__
from . import classify, dataset
from . import mfd as mfd_mod
from .edt import squared_edt
from .errors import MfdShapeError, ParseError, PreconditionError
from .minkowski import fit_fd, loglog_curve
from .raster import load_pbm, pad
from .spectral import DEFAULT_DESCRIPTORS, fourier_descriptors

PROG = "mfdshape"

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_IO = 2
EXIT_PRECONDITION = 3


def _emit(text: str, out) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise PreconditionError(message)


def _check_pipeline_args(args, *, sigma=True, n=True, k=False) -> None:
    _require(args.r_max >= 1, f"--r-max must be >= 1, got {args.r_max}")
    _require(args.r_min >= 1, f"--r-min must be >= 1, got {args.r_min}")
    _require(args.r_min < args.r_max, f"--r-min ({args.r_min}) must be below --r-max ({args.r_max})")
    if sigma:
        _require(args.sigma >= 0, f"--sigma must be >= 0, got {args.sigma}")
    if n:
        _require(args.n >= mfd_mod.MIN_SAMPLES, f"--n must be >= {mfd_mod.MIN_SAMPLES}, got {args.n}")
    if k:
        _require(1 <= args.k <= args.n, f"--k must be in [1, --n={args.n}], got {args.k}")


def _maybe_dump_edt(args, shape) -> None:
    if getattr(args, "dump_edt", None):
        _emit(squared_edt(pad(shape, args.r_max + 1)).to_csv(), args.dump_edt)


def cmd_edt(args) -> int:
    shape = load_pbm(args.input)
    _emit(squared_edt(shape).to_csv(), args.out)
    return EXIT_OK


def cmd_loglog(args) -> int:
    _require(args.r_max >= 1, f"--r-max must be >= 1, got {args.r_max}")
    _require(args.r_min >= 1, f"--r-min must be >= 1, got {args.r_min}")
    shape = load_pbm(args.input)
    curve = loglog_curve(mfd_mod.shape_histogram(shape, args.r_max))
    if args.r_min > 1:
        curve = mfd_mod.trim_low_sampling(curve, args.r_min)
    _emit(curve.to_csv(), args.out)
    return EXIT_OK


def cmd_fd(args) -> int:
    _check_pipeline_args(args, sigma=False, n=False)
    shape = load_pbm(args.input)
    _maybe_dump_edt(args, shape)
    curve = mfd_mod.trimmed_curve(mfd_mod.shape_histogram(shape, args.r_max), args.r_min)
    fit = fit_fd(curve, args.t_lo, args.t_hi)
    params = {"r_max": args.r_max, "r_min": args.r_min, "t_lo": args.t_lo, "t_hi": args.t_hi}
    if args.format == "json":
        _emit(_json({"schema_version": classify.SCHEMA_VERSION, "params": params, **fit.as_dict()}), args.out)
    else:
        d = fit.as_dict()
        _emit(",".join(d) + "\n" + ",".join(repr(v) for v in d.values()) + "\n", args.out)
    return EXIT_OK


def _mfd_for(args):
    shape = load_pbm(args.input)
    _maybe_dump_edt(args, shape)
    return mfd_mod.compute_mfd(shape, args.r_max, args.sigma, args.n, args.r_min)


def cmd_mfd(args) -> int:
    _check_pipeline_args(args)
    curve = _mfd_for(args)
    if args.format == "json":
        payload = {
            "schema_version": classify.SCHEMA_VERSION,
            "params": {**curve.params, "r_min": args.r_min},
            "t": curve.t.tolist(),
            "mfd": curve.values.tolist(),
        }
        _emit(_json(payload), args.out)
    else:
        _emit(curve.to_csv({"r_min": args.r_min}), args.out)
    return EXIT_OK


def cmd_descriptors(args) -> int:
    _check_pipeline_args(args, k=True)
    desc = fourier_descriptors(_mfd_for(args), args.k)
    if args.format == "json":
        params = {"r_max": args.r_max, "sigma": args.sigma, "n": args.n, "r_min": args.r_min, "k": args.k}
        _emit(_json({"schema_version": classify.SCHEMA_VERSION, "params": params,
                     "descriptors": desc.magnitudes.tolist()}), args.out)
    else:
        _emit(desc.to_csv_row(), args.out)
    return EXIT_OK


def cmd_gen_dataset(args) -> int:
    cfg = {
        "classes": args.classes,
        "image_size": args.image_size,
        "samples_per_cell": args.samples_per_cell,
        "seed": args.seed,
    }
    if args.config:
        with open(args.config, "r", encoding="utf-8") as fh:
            try:
                loaded = json.load(fh)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON config: {exc}", exc.pos, args.config) from exc
        unknown = set(loaded) - set(cfg)
        _require(not unknown, f"unknown config keys: {sorted(unknown)}")
        cfg.update(loaded)
    classes = list(cfg["classes"])
    _require(int(cfg["samples_per_cell"]) >= 4, f"samples per cell must be >= 4, got {cfg['samples_per_cell']}")
    _require(int(cfg["image_size"]) >= 32, f"image size must be >= 32, got {cfg['image_size']}")
    manifest = dataset.generate(
        args.out_dir,
        classes=classes,
        image_size=int(cfg["image_size"]),
        samples_per_cell=int(cfg["samples_per_cell"]),
        base_seed=int(cfg["seed"]),
    )
    print(f"{PROG}: wrote {len(manifest.records)} images to {args.out_dir}", file=sys.stderr)
    return EXIT_OK


def cmd_experiment(args) -> int:
    config = classify.ExperimentConfig(
        manifest=str(args.manifest),
        r_values=list(args.r),
        sigma_values=list(args.sigma),
        signature_kind=args.kind,
        k=args.k,
        per_level_train=args.per_level_train,
        split_seed=args.split_seed,
        n=args.n,
        r_min=args.r_min,
        jobs=args.jobs,
    )
    config.validate()
    report = classify.run_experiment(config)
    if args.csv_dir:
        out = Path(args.csv_dir)
        out.mkdir(parents=True, exist_ok=True)
        for res in report["results"]:
            sigma = "" if res["sigma"] is None else f"_s{res['sigma']:g}"
            name = f"confusion_{res['kind']}_r{res['r']}{sigma}.csv"
            (out / name).write_text(classify.confusion_from_result(res).to_csv(), encoding="utf-8")
    text = classify.report_to_json(report) if args.format == "json" else classify.report_to_text(report)
    _emit(text, args.out)
    return EXIT_OK


def _add_pipeline_flags(p, *, sigma=True, n=True, k=False):
    p.add_argument("input", help="input PBM (P1 or P4); black pixels are the shape")
    p.add_argument("--r-max", type=int, default=mfd_mod.DEFAULT_R_MAX, help="largest dilation radius in pixels")
    p.add_argument("--r-min", type=float, default=mfd_mod.DEFAULT_R_MIN,
                   help="radii below this are dropped as under-sampled")
    if sigma:
        p.add_argument("--sigma", type=float, default=mfd_mod.DEFAULT_SIGMA,
                       help="Gaussian smoothing width in uniform samples")
    if n:
        p.add_argument("--n", type=int, default=mfd_mod.DEFAULT_SAMPLES, help="uniform samples in the curve")
    if k:
        p.add_argument("--k", type=int, default=DEFAULT_DESCRIPTORS, help="number of Fourier descriptors")
    p.add_argument("--out", default=None, help="output file (default: stdout)")
    p.add_argument("--dump-edt", default=None, metavar="CSV",
                   help="also write the padded distance map as CSV (debugging)")


class _HelpFormatter(argparse.ArgumentDefaultsHelpFormatter):
    """Shows defaults, except for optional flags whose default is "unset"."""

    def _get_help_string(self, action):
        if action.default is None:
            return action.help
        return super()._get_help_string(action)


def build_parser() -> argparse.ArgumentParser:
    fmt = _HelpFormatter
    parser = argparse.ArgumentParser(prog=PROG, description="Fractal and multi-scale fractal dimension of binary shapes.",
                                     formatter_class=fmt)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("edt", help="squared Euclidean distance transform as CSV", formatter_class=fmt)
    p.add_argument("input", help="input PBM")
    p.add_argument("--out", default=None, help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_edt)

    p = sub.add_parser("loglog", help="log-log dilation curve (t, u) as CSV", formatter_class=fmt)
    p.add_argument("input", help="input PBM")
    p.add_argument("--r-max", type=int, default=mfd_mod.DEFAULT_R_MAX, help="largest dilation radius in pixels")
    p.add_argument("--r-min", type=float, default=1.0, help="drop radii below this (1 keeps everything)")
    p.add_argument("--out", default=None, help="output CSV (default: stdout)")
    p.set_defaults(func=cmd_loglog)

    p = sub.add_parser("fd", help="scalar Bouligand-Minkowski fractal dimension", formatter_class=fmt)
    _add_pipeline_flags(p, sigma=False, n=False)
    p.add_argument("--t-lo", type=float, default=None, help="lower log-radius bound of the fit")
    p.add_argument("--t-hi", type=float, default=None, help="upper log-radius bound of the fit")
    p.add_argument("--format", choices=("json", "csv"), default="json", help="output format")
    p.set_defaults(func=cmd_fd)

    p = sub.add_parser("mfd", help="multi-scale fractal dimension curve", formatter_class=fmt)
    _add_pipeline_flags(p)
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p.set_defaults(func=cmd_mfd)

    p = sub.add_parser("descriptors", help="normalised Fourier descriptors of the MFD curve", formatter_class=fmt)
    _add_pipeline_flags(p, k=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    p.set_defaults(func=cmd_descriptors)

    p = sub.add_parser("gen-dataset", help="write the synthetic noisy-letter dataset", formatter_class=fmt)
    p.add_argument("--out-dir", required=True, help="destination directory")
    p.add_argument("--config", default=None,
                   help="JSON file with any of: classes, image_size, samples_per_cell, seed (overrides flags)")
    p.add_argument("--classes", default=string.ascii_uppercase, help="letters to include")
    p.add_argument("--image-size", type=int, default=dataset.DEFAULT_IMAGE_SIZE, help="canvas side in pixels")
    p.add_argument("--samples-per-cell", type=int, default=dataset.DEFAULT_SAMPLES_PER_CELL,
                   help="images per (letter, noise level)")
    p.add_argument("--seed", type=int, default=dataset.DEFAULT_SEED, help="base seed")
    p.set_defaults(func=cmd_gen_dataset)

    p = sub.add_parser("experiment", help="nearest-centroid classification sweep", formatter_class=fmt)
    p.add_argument("--manifest", required=True, help="manifest.jsonl or the dataset directory")
    p.add_argument("--r", type=int, nargs="+", default=list(classify.DEFAULT_R_VALUES), help="dilation radii to sweep")
    p.add_argument("--sigma", type=float, nargs="+", default=list(classify.DEFAULT_SIGMA_VALUES),
                   help="smoothing widths to sweep (ignored for --kind fd)")
    p.add_argument("--kind", choices=classify.SIGNATURE_KINDS, default="mfd", help="signature kind")
    p.add_argument("--k", type=int, default=DEFAULT_DESCRIPTORS, help="descriptor count for --kind descriptors")
    p.add_argument("--per-level-train", type=int, default=classify.DEFAULT_PER_LEVEL_TRAIN,
                   help="training samples per (class, level)")
    p.add_argument("--split-seed", type=int, default=classify.DEFAULT_SPLIT_SEED, help="train/test split seed")
    p.add_argument("--n", type=int, default=mfd_mod.DEFAULT_SAMPLES, help="uniform samples per MFD curve")
    p.add_argument("--r-min", type=float, default=mfd_mod.DEFAULT_R_MIN, help="low-sampling cutoff radius")
    p.add_argument("--jobs", type=int, default=1, help="worker processes for signature computation")
    p.add_argument("--format", choices=("json", "text"), default="json", help="report format")
    p.add_argument("--out", default=None, help="report file (default: stdout)")
    p.add_argument("--csv-dir", default=None, help="also write each confusion matrix as CSV here")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ParseError, OSError) as exc:
        if isinstance(exc, OSError) and exc.filename is not None:
            msg = f"{exc.filename}: {exc.strerror or exc}"
        else:
            msg = str(exc)
        print(f"{PROG}: error: {msg}", file=sys.stderr)
        return EXIT_IO
    except PreconditionError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except MfdShapeError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
