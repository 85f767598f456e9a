"""Small deterministic SVG charts: scatter, histogram, line.

No plotting stack, no fonts to rasterize, no timestamps: the same data
always renders byte-identical markup. Numbers are written with 6
significant digits and '.' as the decimal separator regardless of locale.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence
from xml.sax.saxutils import escape

WIDTH = 640
HEIGHT = 480
MARGIN_LEFT = 64
MARGIN_RIGHT = 20
MARGIN_TOP = 36
MARGIN_BOTTOM = 48

PALETTE = ("#3b6ea5", "#c0504d", "#4f9153", "#8064a2", "#c78f2f")

AXIS_COLOR = "#444444"
GRID_COLOR = "#dddddd"
TEXT_COLOR = "#222222"
FONT = "font-family=\"sans-serif\""

MARKERS = ("circle", "cross", "line")


def fmt(value: float) -> str:
    """Render a number with 6 significant digits, locale-independent."""
    text = format(float(value), ".6g")
    return "0" if text == "-0" else text


@dataclass(frozen=True)
class Series:
    """One named point set; marker is 'circle', 'cross', or 'line'."""

    label: str
    points: tuple[tuple[float, float], ...]
    marker: str = "circle"

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(tuple(p) for p in self.points))
        if self.marker not in MARKERS:
            raise ValueError(f"unknown marker {self.marker!r}; expected one of {MARKERS}")


def _nice_step(raw: float) -> float:
    """Smallest 1/2/5 x 10^n step that is >= raw."""
    if raw <= 0:
        return 1.0
    power = math.floor(math.log10(raw))
    for mantissa in (1.0, 2.0, 5.0, 10.0):
        step = mantissa * 10.0**power
        if step >= raw * (1 - 1e-12):
            return step
    return 10.0 ** (power + 1)


def _ticks(lo: float, hi: float, max_ticks: int = 6) -> tuple[float, float, tuple[float, ...]]:
    """Expanded (axis_lo, axis_hi, tick positions) covering [lo, hi]."""
    if not (math.isfinite(lo) and math.isfinite(hi)):
        raise ValueError("cannot place ticks on non-finite bounds")
    if hi < lo:
        lo, hi = hi, lo
    if hi == lo:
        span = abs(lo) if lo != 0 else 1.0
        lo, hi = lo - span / 2, hi + span / 2
    step = _nice_step((hi - lo) / max(1, max_ticks - 1))
    axis_lo = math.floor(lo / step) * step
    axis_hi = math.ceil(hi / step) * step
    count = int(round((axis_hi - axis_lo) / step))
    ticks = tuple(round(axis_lo + i * step, 12) for i in range(count + 1))
    return axis_lo, axis_hi, ticks


def _data_bounds(series: Sequence[Series], include_zero: bool = False):
    xs = [x for s in series for x, _ in s.points]
    ys = [y for s in series for _, y in s.points]
    if include_zero:
        ys.append(0.0)
    if not xs or not ys:
        raise ValueError("nothing to plot and no explicit ranges given")
    return (min(xs), max(xs)), (min(ys), max(ys))


class _Canvas:
    """Accumulates SVG elements over a fixed data-to-pixel mapping."""

    def __init__(self, x_axis, y_axis):
        self.x_lo, self.x_hi, self.x_ticks = x_axis
        self.y_lo, self.y_hi, self.y_ticks = y_axis
        self.plot_w = WIDTH - MARGIN_LEFT - MARGIN_RIGHT
        self.plot_h = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM
        self.parts: list[str] = []

    def sx(self, x: float) -> float:
        return MARGIN_LEFT + (x - self.x_lo) / (self.x_hi - self.x_lo) * self.plot_w

    def sy(self, y: float) -> float:
        return MARGIN_TOP + self.plot_h - (y - self.y_lo) / (self.y_hi - self.y_lo) * self.plot_h

    def add(self, element: str) -> None:
        self.parts.append(element)

    def frame_and_grid(self, title: str, x_label: str, y_label: str) -> None:
        for tick in self.x_ticks:
            x = fmt(self.sx(tick))
            self.add(
                f'<line x1="{x}" y1="{fmt(MARGIN_TOP)}" x2="{x}" '
                f'y2="{fmt(MARGIN_TOP + self.plot_h)}" stroke="{GRID_COLOR}" stroke-width="1"/>'
            )
            self.add(
                f'<text x="{x}" y="{fmt(MARGIN_TOP + self.plot_h + 16)}" {FONT} '
                f'font-size="11" fill="{TEXT_COLOR}" text-anchor="middle">{fmt(tick)}</text>'
            )
        for tick in self.y_ticks:
            y = fmt(self.sy(tick))
            self.add(
                f'<line x1="{fmt(MARGIN_LEFT)}" y1="{y}" x2="{fmt(MARGIN_LEFT + self.plot_w)}" '
                f'y2="{y}" stroke="{GRID_COLOR}" stroke-width="1"/>'
            )
            self.add(
                f'<text x="{fmt(MARGIN_LEFT - 6)}" y="{y}" {FONT} font-size="11" '
                f'fill="{TEXT_COLOR}" text-anchor="end" dominant-baseline="middle">'
                f"{fmt(tick)}</text>"
            )
        self.add(
            f'<rect x="{fmt(MARGIN_LEFT)}" y="{fmt(MARGIN_TOP)}" width="{fmt(self.plot_w)}" '
            f'height="{fmt(self.plot_h)}" fill="none" stroke="{AXIS_COLOR}" stroke-width="1"/>'
        )
        if title:
            self.add(
                f'<text x="{fmt(WIDTH / 2)}" y="20" {FONT} font-size="14" '
                f'fill="{TEXT_COLOR}" text-anchor="middle">{escape(title)}</text>'
            )
        self.add(
            f'<text x="{fmt(MARGIN_LEFT + self.plot_w / 2)}" y="{fmt(HEIGHT - 10)}" {FONT} '
            f'font-size="12" fill="{TEXT_COLOR}" text-anchor="middle">{escape(x_label)}</text>'
        )
        self.add(
            f'<text x="16" y="{fmt(MARGIN_TOP + self.plot_h / 2)}" {FONT} font-size="12" '
            f'fill="{TEXT_COLOR}" text-anchor="middle" '
            f'transform="rotate(-90 16 {fmt(MARGIN_TOP + self.plot_h / 2)})">'
            f"{escape(y_label)}</text>"
        )

    def draw_series(self, series: Sequence[Series]) -> None:
        for i, s in enumerate(series):
            color = PALETTE[i % len(PALETTE)]
            if s.marker == "line":
                if len(s.points) >= 2:
                    coords = " ".join(f"{fmt(self.sx(x))},{fmt(self.sy(y))}" for x, y in s.points)
                    self.add(
                        f'<polyline points="{coords}" fill="none" '
                        f'stroke="{color}" stroke-width="1.5"/>'
                    )
                for x, y in s.points:
                    self.add(
                        f'<circle cx="{fmt(self.sx(x))}" cy="{fmt(self.sy(y))}" r="2" '
                        f'fill="{color}"/>'
                    )
            elif s.marker == "cross":
                for x, y in s.points:
                    cx, cy = self.sx(x), self.sy(y)
                    self.add(
                        f'<path d="M {fmt(cx - 4)} {fmt(cy - 4)} L {fmt(cx + 4)} {fmt(cy + 4)} '
                        f'M {fmt(cx - 4)} {fmt(cy + 4)} L {fmt(cx + 4)} {fmt(cy - 4)}" '
                        f'stroke="{color}" stroke-width="1.8" fill="none"/>'
                    )
            else:
                for x, y in s.points:
                    self.add(
                        f'<circle cx="{fmt(self.sx(x))}" cy="{fmt(self.sy(y))}" r="3" '
                        f'fill="{color}" fill-opacity="0.65"/>'
                    )

    def legend(self, series: Sequence[Series]) -> None:
        labeled = [(i, s) for i, s in enumerate(series) if s.label]
        if not labeled:
            return
        for row, (i, s) in enumerate(labeled):
            color = PALETTE[i % len(PALETTE)]
            y = MARGIN_TOP + 14 + row * 16
            x = MARGIN_LEFT + self.plot_w - 130
            self.add(f'<rect x="{fmt(x)}" y="{fmt(y - 8)}" width="10" height="10" fill="{color}"/>')
            self.add(
                f'<text x="{fmt(x + 15)}" y="{fmt(y)}" {FONT} font-size="11" '
                f'fill="{TEXT_COLOR}">{escape(s.label)}</text>'
            )

    def annotate(self, annotation: str) -> None:
        if annotation:
            self.add(
                f'<text x="{fmt(MARGIN_LEFT + 10)}" y="{fmt(MARGIN_TOP + 18)}" {FONT} '
                f'font-size="12" fill="{TEXT_COLOR}">{escape(annotation)}</text>'
            )

    def identity_line(self) -> None:
        lo = max(self.x_lo, self.y_lo)
        hi = min(self.x_hi, self.y_hi)
        if hi > lo:
            self.add(
                f'<line x1="{fmt(self.sx(lo))}" y1="{fmt(self.sy(lo))}" '
                f'x2="{fmt(self.sx(hi))}" y2="{fmt(self.sy(hi))}" '
                f'stroke="{AXIS_COLOR}" stroke-width="1" stroke-dasharray="4,3"/>'
            )

    def render(self) -> str:
        body = "\n".join(self.parts)
        return (
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}">\n'
            f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>\n'
            f"{body}\n</svg>\n"
        )


def _chart(
    series: Sequence[Series],
    x_label: str,
    y_label: str,
    title: str,
    annotation: str,
    identity: bool,
    x_range: tuple[float, float] | None,
    y_range: tuple[float, float] | None,
    include_zero_y: bool,
) -> str:
    series = tuple(series)
    if x_range is None or y_range is None:
        (x_lo, x_hi), (y_lo, y_hi) = _data_bounds(series, include_zero=include_zero_y)
        if x_range is None:
            x_range = (x_lo, x_hi)
        if y_range is None:
            y_range = (y_lo, y_hi)
    canvas = _Canvas(_ticks(*x_range), _ticks(*y_range))
    canvas.frame_and_grid(title, x_label, y_label)
    if identity:
        canvas.identity_line()
    canvas.draw_series(series)
    canvas.legend(series)
    canvas.annotate(annotation)
    return canvas.render()


def scatter_svg(
    series: Sequence[Series],
    x_label: str,
    y_label: str,
    title: str = "",
    annotation: str = "",
    identity: bool = False,
    x_range: tuple[float, float] | None = None,
    y_range: tuple[float, float] | None = None,
) -> str:
    """Scatter chart of one or more point series, optional y=x reference line."""
    return _chart(series, x_label, y_label, title, annotation, identity, x_range, y_range, False)


def line_svg(
    series: Sequence[Series],
    x_label: str,
    y_label: str,
    title: str = "",
    annotation: str = "",
    x_range: tuple[float, float] | None = None,
    y_range: tuple[float, float] | None = None,
) -> str:
    """Polyline chart; points connect in the order given (no sorting)."""
    series = tuple(
        Series(s.label, s.points, "line") if s.marker != "line" else s for s in series
    )
    return _chart(series, x_label, y_label, title, annotation, False, x_range, y_range, False)


def histogram_svg(
    bins: Sequence[tuple[float, float, int]],
    x_label: str,
    y_label: str = "count",
    title: str = "",
) -> str:
    """Bar chart over (bin_left, bin_right, count) rows; y axis starts at 0."""
    bins = [(float(left), float(right), int(count)) for left, right, count in bins]
    if not bins:
        raise ValueError("no histogram bins to plot")
    x_range = (bins[0][0], bins[-1][1])
    y_range = (0.0, max(count for _, _, count in bins) or 1.0)
    canvas = _Canvas(_ticks(*x_range), _ticks(*y_range))
    canvas.frame_and_grid(title, x_label, y_label)
    color = PALETTE[0]
    for left, right, count in bins:
        if count == 0:
            continue
        x = canvas.sx(left)
        y = canvas.sy(count)
        width = canvas.sx(right) - x
        height = canvas.sy(0.0) - y
        canvas.add(
            f'<rect x="{fmt(x)}" y="{fmt(y)}" width="{fmt(width)}" height="{fmt(height)}" '
            f'fill="{color}" fill-opacity="0.8" stroke="#ffffff" stroke-width="0.5"/>'
        )
    return canvas.render()
