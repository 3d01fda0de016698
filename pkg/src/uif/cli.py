"""Command-line front end: extract / train / score / evaluate / mos.

Exit codes are a fixed scripting contract: 0 success, 2 partial success
(some pairs skipped), 64 usage error, 65 data error, 66 missing input.
Diagnostics go to stderr; data goes to stdout or the --out file.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    AllInvalid,
    DecodeError,
    DegenerateInput,
    FormatError,
    InsufficientData,
    InvalidMask,
    IoError,
    NonFiniteInput,
    ShapeError,
    ShapeMismatch,
    TooSmall,
)
from .evaluate import (
    DatasetManifest,
    PairRecord,
    cross_validate,
    kfold_split,
    plcc,
    read_manifest,
    srcc,
)
from .features import extract_features, write_features_csv
from .image import load_image
from .mos import compute_mos, read_ratings_csv, screen_ratings, subject_agreement, write_mos_csv
from .svr import SvrParams, load_model, predict, predict_features, save_model, train

EXIT_OK = 0
EXIT_PARTIAL = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_NOINPUT = 66

_DATA_ERRORS = (
    DecodeError,
    ShapeError,
    ShapeMismatch,
    DegenerateInput,
    TooSmall,
    InsufficientData,
    NonFiniteInput,
    FormatError,
    AllInvalid,
)


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _style(text: str) -> str:
    if os.environ.get("UIF_NO_COLOR") or not sys.stdout.isatty():
        return text
    return "\033[1m%s\033[0m" % text


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, "%s: error: %s\n" % (self.prog, message))


def _add_hyperparams(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("-C", "--penalty", type=float, default=0.1, help="SVR penalty (default 0.1)")
    parser.add_argument("--epsilon", type=float, default=0.01, help="epsilon tube width (default 0.01)")
    parser.add_argument("--gamma", type=float, default=1.0, help="RBF kernel parameter (default 1.0)")


def _params_from(args) -> SvrParams:
    if args.penalty <= 0 or args.epsilon <= 0 or args.gamma <= 0:
        raise InvalidUsage("hyperparameters must be positive")
    return SvrParams(c=args.penalty, epsilon=args.epsilon, gamma=args.gamma)


class InvalidUsage(Exception):
    pass


def build_parser() -> _Parser:
    parser = _Parser(prog="uif", description="Quality scoring for enhanced underwater images.")
    parser.add_argument("--version", action="version", version="uif %s" % __version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("extract", help="extract feature vectors to CSV")
    p.add_argument("--manifest", help="CSV with id,original,enhanced[,mos]")
    p.add_argument("--original-dir", help="directory of originals (paired by filename)")
    p.add_argument("--enhanced-dir", help="directory of enhanced images (paired by filename)")
    p.add_argument("--out", required=True, help="output feature CSV")
    p.add_argument("--jobs", type=int, default=1, help="parallel extraction workers")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("train", help="train an SVR model from a labeled manifest")
    p.add_argument("--manifest", required=True, help="CSV with id,original,enhanced,mos")
    p.add_argument("--out", required=True, help="output .uifmodel path")
    p.add_argument("--jobs", type=int, default=1)
    _add_hyperparams(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("score", help="score one enhanced image against its original")
    p.add_argument("--model", required=True, help=".uifmodel file")
    p.add_argument("--original", required=True)
    p.add_argument("--enhanced", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("evaluate", help="k-fold cross-validation with SRCC/PLCC report")
    p.add_argument("--manifest", required=True, help="CSV with id,original,enhanced,mos[,fold]")
    p.add_argument("--k", type=int, default=4, help="number of folds (default 4)")
    p.add_argument("--seed", type=int, default=42, help="fold shuffle seed (default 42)")
    p.add_argument("--mask", default="all", help="feature groups: all or a +/, list of naturalness,sharpness,structure")
    p.add_argument("--out", help="write the JSON report here instead of stdout")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--logistic", action="store_true", help="apply the 5-parameter logistic map before PLCC")
    p.add_argument(
        "--no-group-by-original",
        action="store_true",
        help="assign folds per record instead of per original image",
    )
    _add_hyperparams(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("mos", help="screen a rating matrix and compute MOS values")
    p.add_argument("--ratings", required=True, help="ratings CSV (rows subjects, columns image ids)")
    p.add_argument("--out", required=True, help="output MOS CSV")
    p.set_defaults(func=cmd_mos)
    return parser


def _records_from_args(args) -> tuple[DatasetManifest, bool]:
    if args.manifest:
        if args.original_dir or args.enhanced_dir:
            raise InvalidUsage("give either --manifest or the two directory options")
        if not os.path.exists(args.manifest):
            raise IoError("manifest not found: %s" % args.manifest)
        manifest = read_manifest(args.manifest)
        has_mos = all(r.mos is not None for r in manifest.records) and bool(manifest.records)
        return manifest, has_mos
    if not (args.original_dir and args.enhanced_dir):
        raise InvalidUsage("need --manifest or both --original-dir and --enhanced-dir")
    orig_dir, enh_dir = Path(args.original_dir), Path(args.enhanced_dir)
    if not orig_dir.is_dir() or not enh_dir.is_dir():
        raise IoError("directory not found: %s" % (orig_dir if not orig_dir.is_dir() else enh_dir))
    records = []
    for enh in sorted(enh_dir.iterdir()):
        if enh.is_file() and (orig_dir / enh.name).is_file():
            records.append(
                PairRecord(id=enh.stem, original=str(orig_dir / enh.name), enhanced=str(enh))
            )
    return DatasetManifest(records=records), False


def cmd_extract(args) -> int:
    from .evaluate import extract_batch

    manifest, has_mos = _records_from_args(args)
    feats, errors = extract_batch(manifest.records, jobs=args.jobs)
    kept = [i for i in range(len(manifest.records)) if i not in errors]
    for i in sorted(errors):
        _log("skipped %s: %s" % (manifest.records[i].id, errors[i]))
    vectors = [feats[i] for i in kept]
    mos = [manifest.records[i].mos for i in kept] if has_mos else None
    write_features_csv(args.out, vectors, mos=mos)
    _log("wrote %d row(s) to %s" % (len(kept), args.out))
    return EXIT_PARTIAL if errors else EXIT_OK


def cmd_train(args) -> int:
    from .evaluate import extract_batch

    if not os.path.exists(args.manifest):
        raise IoError("manifest not found: %s" % args.manifest)
    manifest = read_manifest(args.manifest, require_mos=True)
    if not manifest.records:
        raise InvalidUsage("manifest has no records")
    params = _params_from(args)
    feats, errors = extract_batch(manifest.records, jobs=args.jobs)
    if errors:
        for i in sorted(errors):
            _log("failed %s: %s" % (manifest.records[i].id, errors[i]))
        raise NonFiniteInput("feature extraction failed for %d pair(s)" % len(errors))
    labels = np.array([r.mos for r in manifest.records])
    model = train(feats, labels, params)
    save_model(model, args.out)
    pred = predict_features(model, feats)
    try:
        print("train_srcc=%.4f train_plcc=%.4f" % (srcc(pred, labels), plcc(pred, labels)))
    except DegenerateInput:
        print("train_srcc=n/a train_plcc=n/a")
    _log("saved model to %s (%d support vectors)" % (args.out, model.support_vectors.shape[0]))
    return EXIT_OK


def cmd_score(args) -> int:
    model = load_model(args.model)
    orig = load_image(args.original)
    enh = load_image(args.enhanced)
    print("%.4f" % predict(model, orig, enh))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    if args.k < 2:
        raise InvalidUsage("k must be at least 2")
    if not os.path.exists(args.manifest):
        raise IoError("manifest not found: %s" % args.manifest)
    manifest = read_manifest(args.manifest, require_mos=True)
    params = _params_from(args)
    if manifest.folds is None:
        manifest = kfold_split(
            manifest, args.k, args.seed, group_by_original=not args.no_group_by_original
        )
    report = cross_validate(
        manifest,
        params=params,
        mask=args.mask,
        seed=args.seed,
        jobs=args.jobs,
        logistic=args.logistic,
    )

    print(_style("method %d (%s)  k=%d  C=%g eps=%g gamma=%g" % (
        report.method, report.method_label, report.k, params.c, params.epsilon, params.gamma
    )))
    print("fold  n_test  srcc     plcc")
    for entry in report.per_fold:
        s = "%.4f" % entry["srcc"] if entry["srcc"] is not None else "n/a"
        p = "%.4f" % entry["plcc"] if entry["plcc"] is not None else "n/a"
        print("%-5d %-7d %-8s %-8s" % (entry["fold"], entry["n_test"], s, p))
    print("pooled        %-8.4f %-8.4f" % (report.pooled_srcc, report.pooled_plcc))
    for note in report.warnings:
        _log("warning: %s" % note)

    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(report.to_json())
        _log("wrote JSON report to %s" % args.out)
    else:
        print(report.to_json(), end="")
    return EXIT_OK


def cmd_mos(args) -> int:
    if not os.path.exists(args.ratings):
        raise IoError("ratings CSV not found: %s" % args.ratings)
    try:
        ratings = read_ratings_csv(args.ratings)
    except ValueError as exc:
        raise InvalidUsage(str(exc)) from exc
    screened = screen_ratings(ratings)
    for sid in screened.rejected_subjects:
        _log("rejected subject %s (outlier fraction above 5%%)" % sid)
    table = compute_mos(screened.matrix)
    write_mos_csv(args.out, table)
    try:
        mean_ncc, mean_eud = subject_agreement(ratings)
        print("mean_ncc=%.4f mean_eud=%.4f" % (mean_ncc, mean_eud))
    except DegenerateInput:
        print("mean_ncc=n/a mean_eud=n/a")
    _log("wrote %d MOS value(s) to %s" % (len(table.image_ids), args.out))
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except InvalidUsage as exc:
        _log("usage error: %s" % exc)
        return EXIT_USAGE
    except (InvalidMask, ValueError) as exc:
        _log("usage error: %s" % exc)
        return EXIT_USAGE
    except IoError as exc:
        _log("missing input: %s" % exc)
        return EXIT_NOINPUT
    except _DATA_ERRORS as exc:
        _log("data error: %s" % exc)
        return EXIT_DATA


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
