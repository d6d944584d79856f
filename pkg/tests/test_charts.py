import xml.etree.ElementTree as ET

import pytest

from errors import ChartInputError
from services.charts import PLOT_HEIGHT, chart_bars

SVG_NS = "{http://www.w3.org/2000/svg}"


def _bars(svg: str):
    return list(ET.fromstring(svg).iter(f"{SVG_NS}rect"))


class TestChartBars:
    def test_bar_heights_are_the_values(self):
        svg = chart_bars(["w1", "w2"], [52.5, 31.0], "Median coverage (%)")
        heights = [float(rect.get("height")) for rect in _bars(svg)]
        assert heights == [52.5, 31.0]
        assert heights[0] / heights[1] == pytest.approx(52.5 / 31)

    def test_tallest_bar_spans_the_plot(self):
        svg = chart_bars(["a", "b"], [4.0, 1.0], "Depth")
        group = next(ET.fromstring(svg).iter(f"{SVG_NS}g"))
        assert f"scale(1 -{PLOT_HEIGHT / 4:g})" in group.get("transform")

    def test_value_labels(self):
        svg = chart_bars(["a"], [0.5], "Share", value_labels=["50%"])
        texts = [t.text for t in ET.fromstring(svg).iter(f"{SVG_NS}text")]
        assert "50%" in texts

    def test_all_zero_values(self):
        svg = chart_bars(["a", "b"], [0, 0], "Nothing")
        assert [rect.get("height") for rect in _bars(svg)] == ["0", "0"]

    def test_labels_are_escaped(self):
        svg = chart_bars(['<b>"x"</b> & y'], [1], "A & B")
        root = ET.fromstring(svg)
        assert root.find(f"{SVG_NS}title").text == "A & B"
        assert _bars(svg)[0].get("data-label") == '<b>"x"</b> & y'

    def test_chart_id(self):
        svg = chart_bars(["a"], [1], "t", chart_id="depth-chart")
        assert ET.fromstring(svg).get("id") == "depth-chart"

    def test_deterministic(self):
        args = (["w1", "w2", "w3"], [0.2, 1.75, 3.0], "Depth")
        assert chart_bars(*args) == chart_bars(*args)

    def test_length_mismatch(self):
        with pytest.raises(ChartInputError) as exc:
            chart_bars(["a", "b"], [1], "t")
        assert exc.value.data == {"labels": 2, "values": 1}

    def test_negative_value(self):
        with pytest.raises(ChartInputError):
            chart_bars(["a"], [-0.5], "t")
