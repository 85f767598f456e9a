"""Anchor-box selection, quality diagnostics, and Darknet config emission.

Two selection strategies are provided. ``kmeans_anchors`` is the
conventional clustering search over box dimensions. ``linefit_anchors``
fits a least-squares line of height on width, samples anchors at evenly
spaced width quantiles along that line, optionally adds a small floor
anchor below the smallest sample, and spends the remaining budget in
width regions where the fit residuals vary the most.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .datastats import BoxDims

KMEANS_MAX_ITERATIONS = 1000
DISTANCES = ("euclidean", "one_minus_iou")


class AnchorError(ValueError):
    """Raised for invalid anchor-selection inputs or configurations."""


@dataclass(frozen=True)
class Anchor:
    """A prior (width, height) rectangle, in pixels."""

    width: float
    height: float

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise AnchorError(f"non-positive anchor dimensions: {self.width}x{self.height}")

    @property
    def area(self) -> float:
        return self.width * self.height


@dataclass(frozen=True)
class AnchorSet:
    """Anchors sorted by area ascending, plus per-layer mask index lists."""

    anchors: tuple[Anchor, ...]
    masks: tuple[tuple[int, ...], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "anchors", tuple(self.anchors))
        object.__setattr__(self, "masks", tuple(tuple(m) for m in self.masks))
        if not self.anchors:
            raise AnchorError("anchor set is empty")
        areas = [a.area for a in self.anchors]
        if any(lo > hi for lo, hi in zip(areas, areas[1:])):
            raise AnchorError("anchors must be sorted by area, ascending")
        pairs = [(a.width, a.height) for a in self.anchors]
        if len(set(pairs)) != len(pairs):
            raise AnchorError("anchor set contains exact duplicates")
        seen: set[int] = set()
        for mask in self.masks:
            for index in mask:
                if not 0 <= index < len(self.anchors):
                    raise AnchorError(f"mask index {index} out of range")
                if index in seen:
                    raise AnchorError(f"mask index {index} assigned to more than one layer")
                seen.add(index)

    @classmethod
    def from_dims(
        cls, dims: Iterable[tuple[float, float]], masks: Sequence[Sequence[int]] = ()
    ) -> "AnchorSet":
        """Build from (width, height) pairs: sorts by area and drops duplicates."""
        unique = sorted(set((float(w), float(h)) for w, h in dims), key=lambda p: (p[0] * p[1], p))
        return cls(tuple(Anchor(w, h) for w, h in unique), tuple(tuple(m) for m in masks))

    def __len__(self) -> int:
        return len(self.anchors)

    def pairs(self) -> list[tuple[float, float]]:
        return [(a.width, a.height) for a in self.anchors]


@dataclass(frozen=True)
class CoverageDiagnostic:
    """How well a set of priors covers a collection of box dimensions."""

    mean_best_iou: float
    recall_at_t: float
    threshold_t: float
    per_anchor_assignment_counts: tuple[int, ...]


@dataclass(frozen=True)
class DarknetConfigFragment:
    """Parameters of the detection-layer sections of a Darknet config."""

    anchors: AnchorSet
    classes: int = 1
    jitter: float = 0.3
    ignore_threshold: float = 0.7
    truth_threshold: float = 1.0
    random: float = 1.0

    def __post_init__(self):
        if self.classes < 1:
            raise AnchorError(f"classes must be >= 1, got {self.classes}")

    @property
    def number(self) -> int:
        return len(self.anchors)

    @property
    def masks(self) -> tuple[tuple[int, ...], ...]:
        if self.anchors.masks:
            return self.anchors.masks
        return (tuple(range(len(self.anchors))),)


def centered_iou(a: BoxDims | Anchor, b: BoxDims | Anchor) -> float:
    """IoU of two rectangles sharing a center; depends only on dimensions."""
    inter = min(a.width, b.width) * min(a.height, b.height)
    union = a.width * a.height + b.width * b.height - inter
    return inter / union


def _as_array(dims: Sequence[BoxDims | Anchor]) -> np.ndarray:
    return np.array([(d.width, d.height) for d in dims], dtype=float)


def centered_iou_matrix(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Pairwise centered IoU between (n, 2) and (m, 2) dimension arrays."""
    inter = np.minimum(a[:, None, 0], b[None, :, 0]) * np.minimum(a[:, None, 1], b[None, :, 1])
    union = (a[:, 0] * a[:, 1])[:, None] + (b[:, 0] * b[:, 1])[None, :] - inter
    return inter / union


def _point_costs(points: np.ndarray, centroids: np.ndarray, distance: str) -> np.ndarray:
    """Per-point, per-centroid cost; squared Euclidean or 1 - centered IoU."""
    if distance == "euclidean":
        deltas = points[:, None, :] - centroids[None, :, :]
        return np.sum(deltas * deltas, axis=2)
    return 1.0 - centered_iou_matrix(points, centroids)


@dataclass(frozen=True)
class KMeansRun:
    """Raw clustering outcome, including the per-iteration objective trace."""

    centroids: np.ndarray
    labels: np.ndarray
    objective_history: tuple[float, ...]


def _kmeans_pp_init(points: np.ndarray, k: int, distance: str, rng: np.random.Generator):
    chosen = [int(rng.integers(len(points)))]
    costs = _point_costs(points, points[chosen], distance)[:, 0]
    while len(chosen) < k:
        weights = costs * costs
        total = weights.sum()
        if total == 0:
            raise AnchorError("k exceeds the number of distinct dims")
        index = int(rng.choice(len(points), p=weights / total))
        chosen.append(index)
        costs = np.minimum(costs, _point_costs(points, points[[index]], distance)[:, 0])
    return points[chosen].copy()


def run_kmeans(
    dims: Sequence[BoxDims], k: int, distance: str = "one_minus_iou", seed: int = 0
) -> KMeansRun:
    """Seeded k-means++ initialization followed by Lloyd iterations.

    Assignment always picks the lowest-index centroid among ties. Centroid
    updates take the cluster mean; under the IoU distance the mean is only a
    heuristic minimizer, so an update that would worsen its cluster cost is
    skipped, keeping the objective non-increasing for both distances.
    The objective is the summed point cost (squared Euclidean, or 1 - IoU).
    """
    if distance not in DISTANCES:
        raise AnchorError(f"unknown distance {distance!r}; expected one of {DISTANCES}")
    if k < 1:
        raise AnchorError(f"k must be >= 1, got {k}")
    points = _as_array(dims)
    if len(points) < k:
        raise AnchorError(f"k={k} exceeds the {len(points)} available dims")
    if len(np.unique(points, axis=0)) < k:
        raise AnchorError("k exceeds the number of distinct dims")

    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(points, k, distance, rng)
    labels = None
    history: list[float] = []
    for _ in range(KMEANS_MAX_ITERATIONS):
        costs = _point_costs(points, centroids, distance)
        new_labels = np.argmin(costs, axis=1)
        if labels is not None and np.array_equal(new_labels, labels):
            break
        labels = new_labels
        for j in range(k):
            members = points[labels == j]
            if len(members) == 0:
                continue
            candidate = members.mean(axis=0)
            if distance == "one_minus_iou":
                old_cost = _point_costs(members, centroids[[j]], distance).sum()
                new_cost = _point_costs(members, candidate[None, :], distance).sum()
                if new_cost > old_cost:
                    continue
            centroids[j] = candidate
        assigned = _point_costs(points, centroids, distance)[np.arange(len(points)), labels]
        history.append(float(assigned.sum()))
    return KMeansRun(centroids=centroids, labels=labels, objective_history=tuple(history))


def kmeans_anchors(
    dims: Sequence[BoxDims], k: int, distance: str = "one_minus_iou", seed: int = 0
) -> AnchorSet:
    """Cluster box dimensions into k anchors (centroids rounded to 2 decimals)."""
    run = run_kmeans(dims, k, distance=distance, seed=seed)
    rounded = np.round(run.centroids, 2)
    return AnchorSet.from_dims((float(w), float(h)) for w, h in rounded)


def _round_anchor(width: float, height: float) -> tuple[float, float]:
    # Integer anchors, with a 1px floor so a tiny fitted height stays valid.
    return (max(1.0, float(round(width))), max(1.0, float(round(height))))


def linefit_anchors(
    dims: Sequence[BoxDims],
    n_line: int = 9,
    floor: Anchor | None = Anchor(10, 10),
    n_total: int = 13,
    variance_bins: int = 10,
) -> AnchorSet:
    """Sample anchors along a least-squares height-on-width line.

    ``n_line`` anchors sit at the interior width quantiles i/(n_line+1) of
    the fitted line. The ``floor`` anchor is added when its area falls below
    the smallest line sample, covering the extreme lower tail. The budget up
    to ``n_total`` is then spent one anchor per width bin, bins ranked by
    residual variance, each placed one residual standard deviation off the
    line with alternating sign. Anchors are rounded to whole pixels; exact
    duplicates collapse, so fewer than ``n_total`` anchors may come back.
    """
    if n_line < 1:
        raise AnchorError(f"n_line must be >= 1, got {n_line}")
    if n_total < n_line + 1:
        raise AnchorError(f"n_total must be >= n_line + 1, got {n_total}")
    if variance_bins < 1:
        raise AnchorError(f"variance_bins must be >= 1, got {variance_bins}")
    widths = np.array([d.width for d in dims], dtype=float)
    heights = np.array([d.height for d in dims], dtype=float)
    if len(widths) < 2 or np.unique(widths).size < 2:
        raise AnchorError(
            "all box widths are equal; the line fit is degenerate, use kmeans_anchors instead"
        )

    w_mean = widths.mean()
    h_mean = heights.mean()
    dw = widths - w_mean
    slope = float(np.sum(dw * (heights - h_mean)) / np.sum(dw * dw))
    intercept = float(h_mean - slope * w_mean)

    quantiles = [i / (n_line + 1) for i in range(1, n_line + 1)]
    sample_widths = np.quantile(widths, quantiles, method="linear")
    anchors = [_round_anchor(w, slope * w + intercept) for w in sample_widths]

    if floor is not None and floor.area < min(w * h for w, h in anchors):
        anchors.append((float(floor.width), float(floor.height)))

    extras_needed = n_total - len(anchors)
    if extras_needed > 0:
        residuals = heights - (slope * widths + intercept)
        edges = np.quantile(widths, np.linspace(0.0, 1.0, variance_bins + 1), method="linear")
        bin_index = np.clip(
            np.searchsorted(edges[1:-1], widths, side="right"), 0, variance_bins - 1
        )
        populated = [
            (float(residuals[bin_index == b].var()), b)
            for b in range(variance_bins)
            if np.any(bin_index == b)
        ]
        populated.sort(key=lambda item: (-item[0], item[1]))
        sign = 1.0
        cursor = 0
        while extras_needed > 0:
            _, b = populated[cursor % len(populated)]
            members = bin_index == b
            w_extra = float(widths[members].mean())
            offset = float(residuals[members].std())
            anchors.append(_round_anchor(w_extra, slope * w_extra + intercept + sign * offset))
            sign = -sign
            cursor += 1
            extras_needed -= 1

    return AnchorSet.from_dims(anchors)


def coverage(
    dims: Sequence[BoxDims], anchors: AnchorSet, threshold_t: float = 0.5
) -> CoverageDiagnostic:
    """Assign each box to its best centered-IoU anchor and summarize the fit.

    Ties go to the lower anchor index. ``recall_at_t`` is the fraction of
    boxes whose best IoU reaches the threshold.
    """
    if not dims:
        raise AnchorError("no box dimensions to cover")
    matrix = centered_iou_matrix(_as_array(dims), _as_array(anchors.anchors))
    best_index = np.argmax(matrix, axis=1)
    best_iou = matrix[np.arange(len(matrix)), best_index]
    counts = np.bincount(best_index, minlength=len(anchors))
    return CoverageDiagnostic(
        mean_best_iou=float(best_iou.mean()),
        recall_at_t=float((best_iou >= threshold_t).mean()),
        threshold_t=float(threshold_t),
        per_anchor_assignment_counts=tuple(int(c) for c in counts),
    )


def assign_masks(anchors: AnchorSet, layer_sizes: Sequence[int] = (3, 4, 6)) -> AnchorSet:
    """Partition anchors across detection layers, smallest areas first."""
    sizes = [int(s) for s in layer_sizes]
    if any(s < 1 for s in sizes):
        raise AnchorError(f"layer sizes must be positive: {sizes}")
    if sum(sizes) != len(anchors):
        raise AnchorError(
            f"layer sizes {sizes} sum to {sum(sizes)}, but there are {len(anchors)} anchors"
        )
    masks = []
    start = 0
    for size in sizes:
        masks.append(tuple(range(start, start + size)))
        start += size
    return AnchorSet(anchors=anchors.anchors, masks=tuple(masks))


def _fmt_value(value: float) -> str:
    v = float(value)
    return str(int(v)) if v.is_integer() else repr(round(v, 6))


def _fmt_scalar(value: float) -> str:
    return repr(float(value))


def emit_darknet_fragment(config: DarknetConfigFragment) -> str:
    """Render the detection-layer config sections as deterministic text.

    One ``[yolo]`` section per mask layer; all sections share the anchor
    list and scalar parameters. Integral anchor values render as integers.
    """
    anchor_text = ", ".join(
        f"{_fmt_value(a.width)},{_fmt_value(a.height)}" for a in config.anchors.anchors
    )
    sections = []
    for mask in config.masks:
        lines = [
            "[yolo]",
            f"mask = {','.join(str(i) for i in mask)}",
            f"anchors = {anchor_text}",
            f"classes = {config.classes}",
            f"num = {config.number}",
            f"jitter = {_fmt_scalar(config.jitter)}",
            f"ignore_thresh = {_fmt_scalar(config.ignore_threshold)}",
            f"truth_thresh = {_fmt_scalar(config.truth_threshold)}",
            f"random = {_fmt_scalar(config.random)}",
        ]
        sections.append("\n".join(lines) + "\n")
    return "\n".join(sections)


def parse_darknet_fragment(text: str) -> DarknetConfigFragment:
    """Parse text produced by emit_darknet_fragment back into a config."""
    sections: list[dict[str, str]] = []
    current: dict[str, str] | None = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line == "[yolo]":
            current = {}
            sections.append(current)
            continue
        if current is None or "=" not in line:
            raise AnchorError(f"unexpected fragment line: {line!r}")
        key, _, value = line.partition("=")
        current[key.strip()] = value.strip()
    if not sections:
        raise AnchorError("fragment contains no [yolo] section")

    first = sections[0]
    for key in ("anchors", "classes", "num", "jitter", "ignore_thresh", "truth_thresh", "random"):
        if key not in first:
            raise AnchorError(f"fragment is missing key {key!r}")
        if any(section.get(key) != first[key] for section in sections):
            raise AnchorError(f"sections disagree on {key!r}")

    values = [float(v) for v in first["anchors"].replace(" ", "").split(",") if v]
    if len(values) % 2 != 0:
        raise AnchorError("anchor list has an odd number of values")
    pairs = [(values[i], values[i + 1]) for i in range(0, len(values), 2)]
    masks = tuple(
        tuple(int(i) for i in section["mask"].split(",")) for section in sections if "mask" in section
    )
    anchor_set = AnchorSet(tuple(Anchor(w, h) for w, h in pairs), masks)
    fragment = DarknetConfigFragment(
        anchors=anchor_set,
        classes=int(first["classes"]),
        jitter=float(first["jitter"]),
        ignore_threshold=float(first["ignore_thresh"]),
        truth_threshold=float(first["truth_thresh"]),
        random=float(first["random"]),
    )
    if fragment.number != int(first["num"]):
        raise AnchorError(
            f"num = {first['num']} does not match {fragment.number} anchors in the fragment"
        )
    return fragment
