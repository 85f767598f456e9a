"""Detection evaluation: IoU, greedy matching, PR curves, AP/mAP, count R².

The matcher is the usual greedy one: detections in descending confidence
order each claim the unmatched ground-truth box they overlap best, provided
that IoU reaches the threshold. AP is the area under the monotone precision
envelope over all ranks (all-point interpolation). Count agreement is the
squared Pearson correlation between per-image true and predicted counts;
an identity-line variant (1 - SSres/SStot about y = x) is available since
an R² printed on a scatter plot can mean either.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from .annotations import Dataset, ImageAnnotations, ImageDetections

R2_MODES = ("pearson", "identity")


class EvalError(ValueError):
    """Raised for invalid evaluation inputs."""


@dataclass(frozen=True)
class DetectionVerdict:
    """Outcome for one detection: TP with its matched box, or FP.

    ``det_index`` is the detection's position in the input sequence (file
    order). ``iou_value`` is the IoU with the matched box for a TP; for an
    FP it is the best IoU available among still-unmatched ground truth at
    decision time (0.0 when none was left).
    """

    det_index: int
    confidence: float
    is_tp: bool
    matched_gt_index: int | None
    iou_value: float


@dataclass(frozen=True)
class MatchResult:
    """Per-image matching outcome; verdicts are in descending-confidence order."""

    image_id: str
    verdicts: tuple[DetectionVerdict, ...]
    gt_count: int

    def __post_init__(self):
        object.__setattr__(self, "verdicts", tuple(self.verdicts))
        matched = [v.matched_gt_index for v in self.verdicts if v.is_tp]
        if len(set(matched)) != len(matched):
            raise EvalError("a ground-truth box was matched more than once")
        if len(matched) > self.gt_count:
            raise EvalError("more true positives than ground-truth boxes")

    @property
    def tp_count(self) -> int:
        return sum(1 for v in self.verdicts if v.is_tp)

    @property
    def fp_count(self) -> int:
        return len(self.verdicts) - self.tp_count

    @property
    def fn_count(self) -> int:
        return self.gt_count - self.tp_count


@dataclass(frozen=True)
class PRCurve:
    """Precision-recall points in rank order, plus the area under the envelope."""

    points: tuple[tuple[float, float], ...]
    confidences: tuple[float, ...]
    ap: float

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "confidences", tuple(self.confidences))
        if len(self.points) != len(self.confidences):
            raise EvalError("one confidence per PR point required")
        recalls = [r for r, _ in self.points]
        if any(lo > hi for lo, hi in zip(recalls, recalls[1:])):
            raise EvalError("recall must be non-decreasing along ranks")


@dataclass(frozen=True)
class EvalReport:
    """Full evaluation summary: per-class AP, mAP, count pairs, and R².

    ``r_squared`` is None when the count regression is undefined for the
    corpus (fewer than two images, or constant true counts).
    """

    ap_per_class: dict[str, float]
    pr_per_class: dict[str, PRCurve]
    map_score: float
    count_pairs: tuple[tuple[str, int, int], ...]
    r_squared: float | None
    iou_threshold: float
    confidence_threshold: float | None


def iou(a, b) -> float:
    """Intersection over union of two boxes; 0.0 when disjoint."""
    iw = min(a.right, b.right) - max(a.left, b.left)
    ih = min(a.bottom, b.bottom) - max(a.top, b.top)
    if iw <= 0 or ih <= 0:
        return 0.0
    inter = iw * ih
    return inter / (a.area + b.area - inter)


def iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise IoU between (n, 4) and (m, 4) arrays of (left, top, right, bottom)."""
    iw = np.minimum(a[:, None, 2], b[None, :, 2]) - np.maximum(a[:, None, 0], b[None, :, 0])
    ih = np.minimum(a[:, None, 3], b[None, :, 3]) - np.maximum(a[:, None, 1], b[None, :, 1])
    inter = np.where((iw > 0) & (ih > 0), iw * ih, 0.0)
    area_a = (a[:, 2] - a[:, 0]) * (a[:, 3] - a[:, 1])
    area_b = (b[:, 2] - b[:, 0]) * (b[:, 3] - b[:, 1])
    return inter / (area_a[:, None] + area_b[None, :] - inter)


def match_detections(
    gt: ImageAnnotations, pred: ImageDetections, iou_threshold: float = 0.70
) -> MatchResult:
    """Greedily match detections to ground truth at an IoU threshold.

    Detections are processed in descending confidence (ties keep file
    order); each claims the unmatched ground-truth box of highest IoU when
    that IoU reaches the threshold, otherwise it is an FP. IoU ties between
    ground-truth boxes resolve to the lower index. The matcher is
    class-blind: filter both sides per class before calling for mAP.
    """
    if gt.image_id != pred.image_id:
        raise EvalError(f"image id mismatch: {gt.image_id!r} vs {pred.image_id!r}")
    if not 0.0 < iou_threshold <= 1.0:
        raise EvalError(f"iou_threshold must be in (0, 1], got {iou_threshold}")
    n_gt = len(gt.boxes)
    n_det = len(pred.detections)
    verdicts = []
    if n_det:
        order = sorted(range(n_det), key=lambda i: (-pred.detections[i].confidence, i))
        if n_gt:
            det_edges = np.array([d.box.as_tuple() for d in pred.detections], dtype=float)
            gt_edges = np.array([g.box.as_tuple() for g in gt.boxes], dtype=float)
            matrix = iou_matrix(det_edges, gt_edges)
            matched = np.zeros(n_gt, dtype=bool)
        for i in order:
            detection = pred.detections[i]
            best = -1.0
            if n_gt:
                available = np.where(matched, -1.0, matrix[i])
                j = int(np.argmax(available))
                best = float(available[j])
            if best >= iou_threshold:
                matched[j] = True
                verdicts.append(DetectionVerdict(i, detection.confidence, True, j, best))
            else:
                verdicts.append(
                    DetectionVerdict(i, detection.confidence, False, None, max(best, 0.0))
                )
    return MatchResult(image_id=gt.image_id, verdicts=tuple(verdicts), gt_count=n_gt)


def _envelope_area(points: Sequence[tuple[float, float]]) -> float:
    """Area under the monotone non-increasing precision envelope."""
    envelope = [0.0] * len(points)
    running = 0.0
    for i in range(len(points) - 1, -1, -1):
        running = max(running, points[i][1])
        envelope[i] = running
    terms = []
    previous_recall = 0.0
    for (recall, _), precision in zip(points, envelope):
        if recall > previous_recall:
            terms.append((recall - previous_recall) * precision)
            previous_recall = recall
    return math.fsum(terms)


def _eleven_point_ap(points: Sequence[tuple[float, float]]) -> float:
    """Mean of the precision envelope sampled at recalls 0.0, 0.1, ..., 1.0."""
    envelope = [0.0] * len(points)
    running = 0.0
    for i in range(len(points) - 1, -1, -1):
        running = max(running, points[i][1])
        envelope[i] = running
    terms = []
    for step in range(11):
        target = step / 10.0
        value = 0.0
        for (recall, _), precision in zip(points, envelope):
            if recall >= target:
                value = precision
                break
        terms.append(value)
    return math.fsum(terms) / 11.0


AP_INTERPOLATIONS = ("all_point", "eleven_point")


def average_precision(
    matches: Iterable[MatchResult], total_gt: int, interpolation: str = "all_point"
) -> PRCurve:
    """PR curve over the global detection ranking, and its AP.

    The ranking merges all images by (confidence descending, image id,
    detection index), so results are independent of input order. The
    default AP integrates the full monotone precision envelope;
    ``interpolation="eleven_point"`` instead averages the envelope at the
    eleven recall levels 0.0, 0.1, ..., 1.0 for comparison with tools that
    use that convention. The stored PR points are the same either way.
    """
    if total_gt < 1:
        raise EvalError(f"total_gt must be >= 1, got {total_gt}")
    if interpolation not in AP_INTERPOLATIONS:
        raise EvalError(
            f"unknown interpolation {interpolation!r}; expected one of {AP_INTERPOLATIONS}"
        )
    ranked = sorted(
        ((v, m.image_id) for m in matches for v in m.verdicts),
        key=lambda item: (-item[0].confidence, item[1], item[0].det_index),
    )
    points = []
    confidences = []
    true_positives = 0
    for rank, (verdict, _) in enumerate(ranked, start=1):
        true_positives += verdict.is_tp
        points.append((true_positives / total_gt, true_positives / rank))
        confidences.append(verdict.confidence)
    if interpolation == "eleven_point":
        ap = _eleven_point_ap(points)
    else:
        ap = _envelope_area(points)
    return PRCurve(tuple(points), tuple(confidences), ap)


def _as_predictions_map(predictions) -> dict[str, ImageDetections]:
    if isinstance(predictions, Mapping):
        items = predictions.values()
    else:
        items = predictions
    by_id: dict[str, ImageDetections] = {}
    for pred in items:
        if pred.image_id in by_id:
            raise EvalError(f"duplicate predictions for image {pred.image_id!r}")
        by_id[pred.image_id] = pred
    return by_id


def _check_known_images(gt: Dataset, predictions: Mapping[str, ImageDetections]) -> None:
    unknown = sorted(set(predictions) - set(gt.images))
    if unknown:
        raise EvalError(f"predictions reference unknown image {unknown[0]!r}")


def _filter_class(gt: Dataset, predictions, class_name: str):
    """Per-image (annotations, detections) pairs restricted to one class."""
    for ann in gt:
        boxes = tuple(b for b in ann.boxes if b.class_name == class_name)
        pred = predictions.get(ann.image_id, ImageDetections(ann.image_id, ()))
        dets = tuple(d for d in pred.detections if d.class_name == class_name)
        yield replace(ann, boxes=boxes), ImageDetections(ann.image_id, dets)


def mean_average_precision(
    gt: Dataset, predictions, iou_threshold: float = 0.70
) -> EvalReport:
    """Per-class AP and their mean.

    Classes are those present in the ground truth; detections of any other
    class are ignored. An image with no prediction file contributes only
    false negatives. The returned report carries the AP fields; count pairs
    and R² are left empty (see ``evaluate`` for the full report).
    """
    predictions = _as_predictions_map(predictions)
    _check_known_images(gt, predictions)
    classes = sorted({b.class_name for ann in gt for b in ann.boxes})
    if not classes:
        raise EvalError("ground truth contains no boxes")
    ap_per_class: dict[str, float] = {}
    pr_per_class: dict[str, PRCurve] = {}
    for class_name in classes:
        matches = []
        total_gt = 0
        for ann, dets in _filter_class(gt, predictions, class_name):
            total_gt += len(ann.boxes)
            matches.append(match_detections(ann, dets, iou_threshold))
        curve = average_precision(matches, total_gt)
        ap_per_class[class_name] = curve.ap
        pr_per_class[class_name] = curve
    map_score = math.fsum(ap_per_class.values()) / len(ap_per_class)
    return EvalReport(
        ap_per_class=ap_per_class,
        pr_per_class=pr_per_class,
        map_score=map_score,
        count_pairs=(),
        r_squared=None,
        iou_threshold=float(iou_threshold),
        confidence_threshold=None,
    )


def _count_pairs(
    gt: Dataset, predictions: Mapping[str, ImageDetections], confidence_threshold: float
) -> tuple[tuple[str, int, int], ...]:
    pairs = []
    for ann in gt:
        pred = predictions.get(ann.image_id)
        predicted = 0
        if pred is not None:
            predicted = sum(1 for d in pred.detections if d.confidence >= confidence_threshold)
        pairs.append((ann.image_id, len(ann.boxes), predicted))
    return tuple(pairs)


def _r_squared(pairs: Sequence[tuple[str, int, int]], mode: str) -> float:
    if mode not in R2_MODES:
        raise EvalError(f"unknown R² mode {mode!r}; expected one of {R2_MODES}")
    if len(pairs) < 2:
        raise EvalError(f"count regression needs at least 2 images, got {len(pairs)}")
    true = np.array([t for _, t, _ in pairs], dtype=float)
    predicted = np.array([p for _, _, p in pairs], dtype=float)
    dt = true - true.mean()
    ss_true = float(np.sum(dt * dt))
    if ss_true == 0.0:
        raise EvalError("true counts are identical across images; R² is undefined")
    if mode == "identity":
        residuals = predicted - true
        value = 1.0 - float(np.sum(residuals * residuals)) / ss_true
        return max(0.0, value)
    dp = predicted - predicted.mean()
    ss_pred = float(np.sum(dp * dp))
    if ss_pred == 0.0:
        return 0.0
    covariance = float(np.sum(dt * dp))
    return (covariance * covariance) / (ss_true * ss_pred)


def count_regression(
    gt: Dataset,
    predictions,
    confidence_threshold: float = 0.5,
    mode: str = "pearson",
) -> tuple[tuple[tuple[str, int, int], ...], float]:
    """Per-image (true, predicted) counts and their R².

    The predicted count is the number of detections at or above the
    confidence threshold; an image without predictions counts zero.
    """
    predictions = _as_predictions_map(predictions)
    _check_known_images(gt, predictions)
    pairs = _count_pairs(gt, predictions, confidence_threshold)
    return pairs, _r_squared(pairs, mode)


def evaluate(
    gt: Dataset,
    predictions,
    iou_threshold: float = 0.70,
    confidence_threshold: float = 0.5,
    r2_mode: str = "pearson",
) -> EvalReport:
    """Full report: mAP plus count regression in one pass.

    On corpora where the count regression is undefined (a single image, or
    constant true counts) ``r_squared`` is None rather than an error, so the
    AP side of the report stays usable.
    """
    if r2_mode not in R2_MODES:
        raise EvalError(f"unknown R² mode {r2_mode!r}; expected one of {R2_MODES}")
    predictions = _as_predictions_map(predictions)
    _check_known_images(gt, predictions)
    report = mean_average_precision(gt, predictions, iou_threshold)
    pairs = _count_pairs(gt, predictions, confidence_threshold)
    try:
        r_squared = _r_squared(pairs, r2_mode)
    except EvalError:
        r_squared = None
    return replace(
        report,
        count_pairs=pairs,
        r_squared=r_squared,
        confidence_threshold=float(confidence_threshold),
    )
