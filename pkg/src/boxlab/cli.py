"""Command-line surface: ``stats``, ``anchors``, ``eval``, ``synth``.

Exit codes: 0 success, 1 data error (unreadable/invalid inputs), 2 usage
error (bad flags). Every command writes a ``run_manifest.txt`` beside its
outputs recording the resolved parameters; re-running with those values
reproduces all other files byte-identically.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import __version__
from .anchorlab import (
    Anchor,
    AnchorError,
    AnchorSet,
    DarknetConfigFragment,
    assign_masks,
    coverage,
    emit_darknet_fragment,
    kmeans_anchors,
    linefit_anchors,
)
from .annotations import (
    Dataset,
    DatasetError,
    ImageDetections,
    ParseError,
    load_dataset,
    load_predictions_dir,
    save_dataset,
    save_predictions,
)
from .datastats import StatsError, compute_stats, extract_dims, flag_outliers, histogram
from .evalcore import EvalError, evaluate, match_detections
from .reports import atomic_write, build_run_manifest, fmt_num, write_csv, write_run_manifest
from .svgplot import Series, histogram_svg, line_svg, scatter_svg
from .synthgen import DetectorNoise, SynthConfig, SynthError, generate_dataset, simulate_detector

DATA_ERRORS = (ParseError, DatasetError, StatsError, AnchorError, EvalError, SynthError, OSError)


class UsageError(Exception):
    """Flag combinations that argparse types alone cannot reject."""


def positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def nonnegative_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {value}")
    return value


def positive_float(text: str) -> float:
    value = nonnegative_float(text)
    if value == 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def dimension_pair(text: str) -> tuple[float, float]:
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}")
    try:
        width, height = float(parts[0]), float(parts[1])
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected numeric WxH, got {text!r}") from None
    if width <= 0 or height <= 0:
        raise argparse.ArgumentTypeError(f"dimensions must be positive, got {text!r}")
    return width, height


def floor_anchor(text: str) -> tuple[float, float] | None:
    if text.lower() == "none":
        return None
    return dimension_pair(text)


def anchor_list(text: str) -> tuple[tuple[float, float], ...]:
    pairs = tuple(dimension_pair(part) for part in text.split(",") if part)
    if not pairs:
        raise argparse.ArgumentTypeError("expected at least one WxH pair")
    return pairs


def layer_spec(text: str) -> tuple[int, ...] | None:
    if text.lower() == "auto":
        return None
    try:
        sizes = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not sizes or any(s < 1 for s in sizes):
        raise argparse.ArgumentTypeError("layer sizes must be positive integers")
    return sizes


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxlab",
        description="Box-annotation statistics, anchor selection, and detection evaluation.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--out", type=Path, default=Path("boxlab-out"), help="directory for output files"
    )
    common.add_argument("--quiet", action="store_true", help="suppress stdout summary lines")

    stats = subparsers.add_parser(
        "stats",
        parents=[common],
        help="per-image counts, coverage, histograms, outlier flags",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    stats.add_argument("gt_dir", type=Path, help="directory of <image_id>.txt ground-truth files")
    stats.add_argument(
        "--manifest",
        type=Path,
        default=None,
        help="CSV of image_id,width,height; without it dims are inferred from box extents",
    )
    stats.add_argument(
        "--min-count", type=int, default=3, help="flag images with fewer heads than this"
    )
    stats.add_argument(
        "--min-coverage",
        type=nonnegative_float,
        default=0.05,
        help="flag images with a lower coverage fraction",
    )
    stats.add_argument("--bins", type=positive_int, default=20, help="histogram bin count")
    stats.set_defaults(func=cmd_stats)

    anchors = subparsers.add_parser(
        "anchors",
        parents=[common],
        help="select anchor boxes and report how well they cover the corpus",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    anchors.add_argument("gt_dir", type=Path, help="directory of <image_id>.txt ground-truth files")
    anchors.add_argument("--manifest", type=Path, default=None, help="CSV of image_id,width,height")
    anchors.add_argument(
        "--method",
        choices=("kmeans", "linefit"),
        default="linefit",
        help="anchor selection strategy",
    )
    anchors.add_argument("--k", type=positive_int, default=9, help="kmeans: number of anchors")
    anchors.add_argument(
        "--distance",
        choices=("euclidean", "one_minus_iou"),
        default="one_minus_iou",
        help="kmeans: point-to-centroid distance",
    )
    anchors.add_argument("--seed", type=int, default=0, help="kmeans: initialization seed")
    anchors.add_argument(
        "--n-line", type=positive_int, default=9, help="linefit: anchors sampled along the fit"
    )
    anchors.add_argument(
        "--n-total", type=positive_int, default=13, help="linefit: total anchor budget"
    )
    anchors.add_argument(
        "--floor",
        type=floor_anchor,
        default=(10.0, 10.0),
        metavar="WxH",
        help="linefit: small fallback anchor, 'none' to disable (default: 10x10)",
    )
    anchors.add_argument(
        "--variance-bins",
        type=positive_int,
        default=10,
        help="linefit: width bins ranked by residual variance for the extra anchors",
    )
    anchors.add_argument(
        "--recall-threshold",
        type=positive_float,
        default=0.5,
        help="centered-IoU threshold for the recall diagnostic",
    )
    anchors.add_argument(
        "--layers",
        type=layer_spec,
        default="auto",
        metavar="SIZES",
        help="mask sizes per detection layer; auto = 3,4,6 for 13 anchors, "
        "3,3,3 for 9, one layer otherwise",
    )
    anchors.add_argument(
        "--anchors",
        type=anchor_list,
        default=None,
        metavar="WxH,WxH,...",
        help="skip selection and use these anchors verbatim",
    )
    anchors.add_argument(
        "--compare",
        action="store_true",
        help="also report coverage for the other method's anchors",
    )
    anchors.add_argument(
        "--emit-darknet", action="store_true", help="write the detection-layer config fragment"
    )
    anchors.add_argument(
        "--classes", type=positive_int, default=1, help="class count for the config fragment"
    )
    anchors.set_defaults(func=cmd_anchors)

    evaluate_cmd = subparsers.add_parser(
        "eval",
        parents=[common],
        help="match predictions against ground truth; AP, mAP, count R²",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    evaluate_cmd.add_argument("gt_dir", type=Path, help="ground-truth directory")
    evaluate_cmd.add_argument(
        "pred_dir", type=Path, help="directory of <image_id>.txt prediction files"
    )
    evaluate_cmd.add_argument(
        "--manifest", type=Path, default=None, help="CSV of image_id,width,height"
    )
    evaluate_cmd.add_argument(
        "--iou-threshold",
        type=positive_float,
        default=0.70,
        help="minimum IoU for a detection to match a ground-truth box",
    )
    evaluate_cmd.add_argument(
        "--confidence-threshold",
        type=nonnegative_float,
        default=0.5,
        help="detections at or above this confidence enter the predicted count",
    )
    evaluate_cmd.add_argument(
        "--r2-mode",
        choices=("pearson", "identity"),
        default="pearson",
        help="count agreement: squared correlation, or 1 - SSres/SStot about y=x",
    )
    evaluate_cmd.set_defaults(func=cmd_eval)

    synth = subparsers.add_parser(
        "synth",
        parents=[common],
        help="generate a synthetic corpus and, optionally, simulated predictions",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    synth.add_argument("--images", type=positive_int, required=True, help="number of images")
    synth.add_argument("--image-width", type=positive_float, default=1200.0)
    synth.add_argument("--image-height", type=positive_float, default=1200.0)
    synth.add_argument(
        "--count-mean", type=positive_float, default=103.0, help="mean boxes per image"
    )
    synth.add_argument(
        "--count-sd", type=nonnegative_float, default=25.0, help="spread of boxes per image"
    )
    synth.add_argument("--width-min", type=positive_float, default=8.0, help="smallest box width")
    synth.add_argument("--width-max", type=positive_float, default=90.0, help="largest box width")
    synth.add_argument(
        "--slope", type=float, default=1.0, help="height = slope * width + intercept"
    )
    synth.add_argument("--intercept", type=float, default=0.0)
    synth.add_argument(
        "--residual-sd",
        type=nonnegative_float,
        default=3.0,
        help="spread of heights about the line",
    )
    synth.add_argument("--class-name", default="object", help="label written for every box")
    synth.add_argument("--seed", type=int, default=0, help="generator seed")
    synth.add_argument(
        "--simulate", action="store_true", help="also write simulated detector output"
    )
    synth.add_argument(
        "--miss-rate",
        type=nonnegative_float,
        default=0.0,
        help="simulate: fraction of boxes the detector misses",
    )
    synth.add_argument(
        "--fp-rate",
        type=nonnegative_float,
        default=0.0,
        help="simulate: expected false positives per image",
    )
    synth.add_argument(
        "--jitter",
        type=nonnegative_float,
        default=0.0,
        help="simulate: per-edge Normal jitter in pixels",
    )
    synth.add_argument(
        "--tp-conf",
        type=nonnegative_float,
        nargs=2,
        default=(0.5, 1.0),
        metavar=("LOW", "HIGH"),
        help="simulate: confidence range for surviving boxes",
    )
    synth.add_argument(
        "--fp-conf",
        type=nonnegative_float,
        nargs=2,
        default=(0.05, 0.5),
        metavar=("LOW", "HIGH"),
        help="simulate: confidence range for false positives",
    )
    synth.add_argument("--noise-seed", type=int, default=1, help="simulate: detector seed")
    synth.set_defaults(func=cmd_synth)

    return parser


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def cmd_stats(args) -> int:
    dataset = load_dataset(args.gt_dir, args.manifest)
    stats = compute_stats(dataset)
    outliers = flag_outliers(stats, args.min_count, args.min_coverage)
    reasons: dict[str, list[str]] = {}
    for image_id, reason in outliers:
        reasons.setdefault(image_id, []).append(reason)

    out = args.out
    write_csv(
        out / "per_image.csv",
        ("image_id", "head_count", "total_box_area", "coverage_fraction", "dims_inferred",
         "outlier_reasons"),
        [
            (s.image_id, s.head_count, s.total_box_area, s.coverage_fraction, s.dims_inferred,
             "; ".join(reasons.get(s.image_id, ())))
            for s in stats.per_image
        ],
    )
    quantile_names = ("min", "q25", "median", "q75", "max")
    summary_rows = [
        ("images", stats.image_count),
        ("total_heads", stats.total_heads),
        ("mean_count", stats.mean_count),
        ("sd_count", stats.sd_count),
    ]
    summary_rows += [
        (f"count_{name}", value) for name, value in zip(quantile_names, stats.count_quantiles)
    ]
    summary_rows += [
        (f"coverage_{name}", value)
        for name, value in zip(quantile_names, stats.coverage_quantiles)
    ]
    summary_rows.append(("outliers", len(outliers)))
    write_csv(out / "summary.csv", ("metric", "value"), summary_rows)

    counts = [s.head_count for s in stats.per_image]
    coverages = [s.coverage_fraction for s in stats.per_image]
    for name, values, label in (
        ("count_hist", counts, "heads per image"),
        ("coverage_hist", coverages, "coverage fraction"),
    ):
        rows = histogram(values, args.bins)
        write_csv(out / f"{name}.csv", ("bin_left", "bin_right", "count"), rows)
        svg = histogram_svg(rows, x_label=label, y_label="images", title=f"{label} distribution")
        atomic_write(out / f"{name}.svg", svg)

    manifest = build_run_manifest(
        "stats",
        __version__,
        parameters={
            "min_count": args.min_count,
            "min_coverage": args.min_coverage,
            "bins": args.bins,
        },
        inputs={"gt_dir": args.gt_dir, "manifest": args.manifest or ""},
    )
    write_run_manifest(out / "run_manifest.txt", manifest)

    _say(args, f"images = {stats.image_count}")
    _say(args, f"total heads = {stats.total_heads}")
    _say(args, f"mean count = {fmt_num(stats.mean_count)}")
    _say(args, f"sd count = {fmt_num(stats.sd_count)}")
    for image_id, reason in outliers:
        _say(args, f"outlier {image_id}: {reason}")
    return 0


def _auto_layers(n_anchors: int) -> tuple[int, ...]:
    if n_anchors == 13:
        return (3, 4, 6)
    if n_anchors == 9:
        return (3, 3, 3)
    return (n_anchors,)


def cmd_anchors(args) -> int:
    dataset = load_dataset(args.gt_dir, args.manifest)
    dims = extract_dims(dataset)
    if not dims:
        raise DatasetError("corpus contains no boxes")

    floor = None if args.floor is None else Anchor(*args.floor)
    selected: dict[str, AnchorSet] = {}
    if args.anchors is not None:
        method = "fixed"
        selected[method] = AnchorSet.from_dims(args.anchors)
    else:
        method = args.method
    if args.compare or method == "kmeans":
        selected.setdefault("kmeans", kmeans_anchors(dims, args.k, args.distance, args.seed))
    if args.compare or method == "linefit":
        selected.setdefault(
            "linefit",
            linefit_anchors(dims, args.n_line, floor, args.n_total, args.variance_bins),
        )
    anchor_set = selected[method]

    layers = args.layers if isinstance(args.layers, tuple) else _auto_layers(len(anchor_set))
    if sum(layers) != len(anchor_set):
        raise UsageError(
            f"--layers {','.join(map(str, layers))} sums to {sum(layers)} "
            f"but {len(anchor_set)} anchors were selected"
        )
    anchor_set = assign_masks(anchor_set, layers)
    diagnostics = {
        name: coverage(dims, a_set, args.recall_threshold) for name, a_set in selected.items()
    }
    diag = diagnostics[method]

    out = args.out
    write_csv(
        out / "anchors.csv",
        ("index", "width", "height", "area", "assigned_count"),
        [
            (i, a.width, a.height, a.area, diag.per_anchor_assignment_counts[i])
            for i, a in enumerate(anchor_set.anchors)
        ],
    )
    write_csv(
        out / "coverage.csv",
        ("method", "anchor_count", "mean_best_iou", "recall_at_threshold", "threshold"),
        [
            (name, len(selected[name]), d.mean_best_iou, d.recall_at_t, d.threshold_t)
            for name, d in sorted(diagnostics.items())
        ],
    )
    write_csv(
        out / "dims_anchors.csv",
        ("series", "width", "height"),
        [("box", d.width, d.height) for d in dims]
        + [("anchor", a.width, a.height) for a in anchor_set.anchors],
    )
    svg = scatter_svg(
        [
            Series("boxes", tuple((d.width, d.height) for d in dims), "circle"),
            Series("anchors", tuple(anchor_set.pairs()), "cross"),
        ],
        x_label="width (px)",
        y_label="height (px)",
        title="box dimensions and anchors",
        annotation=f"mean best IoU = {diag.mean_best_iou:.4f}",
    )
    atomic_write(out / "dims_anchors.svg", svg)
    if args.emit_darknet:
        fragment = DarknetConfigFragment(anchors=anchor_set, classes=args.classes)
        atomic_write(out / "darknet.cfg", emit_darknet_fragment(fragment))

    manifest = build_run_manifest(
        "anchors",
        __version__,
        parameters={
            "method": method,
            "k": args.k,
            "distance": args.distance,
            "n_line": args.n_line,
            "n_total": args.n_total,
            "floor": "none" if floor is None else f"{fmt_num(floor.width)}x{fmt_num(floor.height)}",
            "variance_bins": args.variance_bins,
            "recall_threshold": args.recall_threshold,
            "layers": ",".join(map(str, layers)),
            "compare": args.compare,
            "emit_darknet": args.emit_darknet,
            "classes": args.classes,
        },
        inputs={"gt_dir": args.gt_dir, "manifest": args.manifest or ""},
        seeds=(args.seed,),
    )
    write_run_manifest(out / "run_manifest.txt", manifest)

    rendered = ", ".join(f"{fmt_num(a.width)}x{fmt_num(a.height)}" for a in anchor_set.anchors)
    _say(args, f"anchors ({method}) = {rendered}")
    _say(args, f"mean_best_iou = {diag.mean_best_iou:.4f}")
    _say(args, f"recall@{fmt_num(diag.threshold_t)} = {diag.recall_at_t:.4f}")
    if args.compare:
        for name, d in sorted(diagnostics.items()):
            if name != method:
                _say(args, f"compare {name}: mean_best_iou = {d.mean_best_iou:.4f}, "
                           f"recall@{fmt_num(d.threshold_t)} = {d.recall_at_t:.4f}")
    return 0


def _overlay_rows(ann, dets, iou_threshold):
    """Per-image overlay rows: every gt box and detection with its verdict."""
    classes = {b.class_name for b in ann.boxes}
    gt_partner: dict[int, int] = {}
    det_state: dict[int, tuple[str, int | None]] = {}
    for class_name in sorted(classes):
        gt_map = [i for i, b in enumerate(ann.boxes) if b.class_name == class_name]
        det_map = [i for i, d in enumerate(dets.detections) if d.class_name == class_name]
        filtered_ann = replace(ann, boxes=tuple(ann.boxes[i] for i in gt_map))
        filtered_dets = ImageDetections(
            ann.image_id, tuple(dets.detections[i] for i in det_map)
        )
        result = match_detections(filtered_ann, filtered_dets, iou_threshold)
        for verdict in result.verdicts:
            original_det = det_map[verdict.det_index]
            if verdict.is_tp:
                original_gt = gt_map[verdict.matched_gt_index]
                det_state[original_det] = ("tp", original_gt)
                gt_partner[original_gt] = original_det
            else:
                det_state[original_det] = ("fp", None)
    rows = []
    for i, b in enumerate(ann.boxes):
        partner = gt_partner.get(i)
        rows.append(
            ("gt", b.class_name, "", b.box.left, b.box.top, b.box.right, b.box.bottom,
             "matched" if partner is not None else "missed",
             "" if partner is None else partner)
        )
    for i, d in enumerate(dets.detections):
        verdict, partner = det_state.get(i, ("ignored", None))
        rows.append(
            ("pred", d.class_name, d.confidence, d.box.left, d.box.top, d.box.right,
             d.box.bottom, verdict, "" if partner is None else partner)
        )
    return rows


def cmd_eval(args) -> int:
    gt = load_dataset(args.gt_dir, args.manifest)
    predictions = load_predictions_dir(args.pred_dir)
    report = evaluate(
        gt,
        predictions,
        iou_threshold=args.iou_threshold,
        confidence_threshold=args.confidence_threshold,
        r2_mode=args.r2_mode,
    )

    out = args.out
    r2_cell = "n/a" if report.r_squared is None else report.r_squared
    report_rows = [("map", report.map_score)]
    report_rows += [(f"ap.{name}", ap) for name, ap in sorted(report.ap_per_class.items())]
    report_rows += [
        ("r_squared", r2_cell),
        ("r2_mode", args.r2_mode),
        ("iou_threshold", report.iou_threshold),
        ("confidence_threshold", report.confidence_threshold),
        ("images", len(gt)),
        ("total_gt_boxes", gt.total_boxes),
        ("total_detections", sum(len(p) for p in predictions.values())),
    ]
    write_csv(out / "report.csv", ("metric", "value"), report_rows)

    pr_rows = []
    pr_series = []
    for class_name, curve in sorted(report.pr_per_class.items()):
        for rank, ((recall, precision), confidence) in enumerate(
            zip(curve.points, curve.confidences), start=1
        ):
            pr_rows.append((class_name, rank, confidence, precision, recall))
        pr_series.append(
            Series(class_name, tuple((r, p) for r, p in curve.points), "line")
        )
    write_csv(
        out / "pr_curve.csv", ("class", "rank", "confidence", "precision", "recall"), pr_rows
    )
    pr_svg = line_svg(
        pr_series,
        x_label="recall",
        y_label="precision",
        title="precision-recall",
        annotation=f"mAP = {report.map_score:.4f}",
        x_range=(0.0, 1.0),
        y_range=(0.0, 1.0),
    )
    atomic_write(out / "pr_curve.svg", pr_svg)

    write_csv(
        out / "counts.csv",
        ("image_id", "true_count", "predicted_count"),
        report.count_pairs,
    )
    r2_text = "n/a" if report.r_squared is None else f"{report.r_squared:.4f}"
    counts_svg = scatter_svg(
        [Series("images", tuple((t, p) for _, t, p in report.count_pairs), "circle")],
        x_label="true count",
        y_label="predicted count",
        title="per-image count agreement",
        annotation=f"R^2 = {r2_text} ({args.r2_mode})",
        identity=True,
    )
    atomic_write(out / "counts.svg", counts_svg)

    overlay_dir = out / "overlays"
    for ann in gt:
        dets = predictions.get(ann.image_id, ImageDetections(ann.image_id, ()))
        write_csv(
            overlay_dir / f"{ann.image_id}.csv",
            ("kind", "class", "confidence", "left", "top", "right", "bottom", "verdict",
             "partner_index"),
            _overlay_rows(ann, dets, args.iou_threshold),
        )

    manifest = build_run_manifest(
        "eval",
        __version__,
        parameters={
            "iou_threshold": args.iou_threshold,
            "confidence_threshold": args.confidence_threshold,
            "r2_mode": args.r2_mode,
        },
        inputs={
            "gt_dir": args.gt_dir,
            "pred_dir": args.pred_dir,
            "manifest": args.manifest or "",
        },
    )
    write_run_manifest(out / "run_manifest.txt", manifest)

    _say(args, f"mAP = {report.map_score:.4f}")
    _say(args, f"R^2 = {r2_text}")
    return 0


def cmd_synth(args) -> int:
    try:
        config = SynthConfig(
            n_images=args.images,
            image_width=args.image_width,
            image_height=args.image_height,
            count_mean=args.count_mean,
            count_sd=args.count_sd,
            width_range=(args.width_min, args.width_max),
            line_slope=args.slope,
            line_intercept=args.intercept,
            residual_sd=args.residual_sd,
            class_name=args.class_name,
            seed=args.seed,
        )
        noise = DetectorNoise(
            miss_rate=args.miss_rate,
            false_positive_rate=args.fp_rate,
            jitter_sd=args.jitter,
            tp_confidence=tuple(args.tp_conf),
            fp_confidence=tuple(args.fp_conf),
            seed=args.noise_seed,
        )
    except SynthError as exc:
        raise UsageError(str(exc)) from None

    dataset = generate_dataset(config)
    out = args.out
    save_dataset(dataset, out / "gt")
    parameters = {
        "images": args.images,
        "image_width": args.image_width,
        "image_height": args.image_height,
        "count_mean": args.count_mean,
        "count_sd": args.count_sd,
        "width_min": args.width_min,
        "width_max": args.width_max,
        "slope": args.slope,
        "intercept": args.intercept,
        "residual_sd": args.residual_sd,
        "class_name": args.class_name,
        "simulate": args.simulate,
    }
    seeds = [args.seed]
    _say(args, f"wrote {len(dataset)} images, {dataset.total_boxes} boxes to {out / 'gt'}")
    if args.simulate:
        predictions = simulate_detector(dataset, noise)
        save_predictions(predictions, out / "pred")
        total = sum(len(p) for p in predictions.values())
        parameters.update(
            {
                "miss_rate": args.miss_rate,
                "fp_rate": args.fp_rate,
                "jitter": args.jitter,
                "tp_conf": f"{fmt_num(noise.tp_confidence[0])},{fmt_num(noise.tp_confidence[1])}",
                "fp_conf": f"{fmt_num(noise.fp_confidence[0])},{fmt_num(noise.fp_confidence[1])}",
            }
        )
        seeds.append(args.noise_seed)
        _say(args, f"wrote {total} detections to {out / 'pred'}")
    manifest = build_run_manifest(
        "synth", __version__, parameters=parameters, inputs={}, seeds=seeds
    )
    write_run_manifest(out / "run_manifest.txt", manifest)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except DATA_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
