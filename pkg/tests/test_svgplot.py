import xml.etree.ElementTree as ET

import pytest

from boxlab.svgplot import Series, fmt, histogram_svg, line_svg, scatter_svg


def parse_svg(text):
    root = ET.fromstring(text)
    assert root.tag.endswith("svg")
    return root


SCATTER = [
    Series("boxes", ((1.0, 2.0), (3.5, 4.25), (10.0, 9.0))),
    Series("anchors", ((2.0, 2.0), (8.0, 8.0)), marker="cross"),
]


class TestFormatting:
    def test_six_significant_digits(self):
        assert fmt(0.123456789) == "0.123457"
        assert fmt(1200.0) == "1200"
        assert fmt(2 / 3) == "0.666667"

    def test_negative_zero_is_normalized(self):
        assert fmt(-0.0) == "0"
        assert fmt(-1e-9) == "-1e-09"


class TestScatter:
    def test_is_well_formed_xml(self):
        parse_svg(scatter_svg(SCATTER, "width", "height", title="dims"))

    def test_deterministic(self):
        a = scatter_svg(SCATTER, "width", "height", annotation="mean = 0.5")
        b = scatter_svg(SCATTER, "width", "height", annotation="mean = 0.5")
        assert a == b

    def test_has_fixed_canvas_and_viewbox(self):
        root = parse_svg(scatter_svg(SCATTER, "x", "y"))
        assert root.get("width") == "640"
        assert root.get("height") == "480"
        assert root.get("viewBox") == "0 0 640 480"

    def test_labels_title_annotation_present(self):
        text = scatter_svg(
            SCATTER, "box width", "box height", title="corpus", annotation="n = 3"
        )
        for needle in ("box width", "box height", "corpus", "n = 3"):
            assert needle in text

    def test_legend_lists_series_labels(self):
        text = scatter_svg(SCATTER, "x", "y")
        assert "boxes" in text
        assert "anchors" in text

    def test_markup_characters_are_escaped(self):
        hostile = 'a<b>&"c'
        text = scatter_svg(
            [Series(hostile, ((0.0, 0.0), (1.0, 1.0)))], "x", "y", annotation=hostile
        )
        assert "a<b>" not in text
        assert "a&lt;b&gt;&amp;" in text
        parse_svg(text)

    def test_identity_line_is_dashed(self):
        with_line = scatter_svg(SCATTER, "x", "y", identity=True)
        without = scatter_svg(SCATTER, "x", "y", identity=False)
        assert "stroke-dasharray" in with_line
        assert "stroke-dasharray" not in without

    def test_explicit_ranges_set_the_axes(self):
        text = scatter_svg(
            [Series("pr", ((0.2, 0.9), (0.4, 0.8)), marker="line")],
            "recall",
            "precision",
            x_range=(0.0, 1.0),
            y_range=(0.0, 1.0),
        )
        parse_svg(text)
        assert ">1<" in text  # axis tick at 1.0 from the forced range

    def test_empty_series_without_ranges_rejected(self):
        with pytest.raises(ValueError):
            scatter_svg([Series("empty", ())], "x", "y")

    def test_unknown_marker_rejected(self):
        with pytest.raises(ValueError):
            Series("bad", ((0.0, 0.0),), marker="star")

    def test_single_point_gets_padded_axes(self):
        parse_svg(scatter_svg([Series("one", ((5.0, 5.0),))], "x", "y"))


class TestLine:
    def test_series_render_as_polylines(self):
        text = line_svg(
            [Series("objective", ((0.0, 10.0), (1.0, 5.0), (2.0, 4.0)))],
            "iteration",
            "cost",
        )
        parse_svg(text)
        assert "<polyline" in text

    def test_coerces_markers_to_line(self):
        text = line_svg([Series("s", ((0.0, 1.0), (1.0, 0.0)), marker="circle")], "x", "y")
        assert "<polyline" in text


class TestHistogram:
    def test_draws_one_bar_per_nonzero_bin(self):
        bins = [(0.0, 1.0, 5), (1.0, 2.0, 0), (2.0, 3.0, 2)]
        text = histogram_svg(bins, "count")
        parse_svg(text)
        # Background and plot frame, then one bar per non-empty bin.
        assert text.count("<rect") == 2 + 2

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            histogram_svg([], "count")

    def test_deterministic(self):
        bins = [(0.0, 10.0, 3), (10.0, 20.0, 9)]
        assert histogram_svg(bins, "v") == histogram_svg(bins, "v")
