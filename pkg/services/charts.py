"""
Self-contained SVG bar charts.

Each bar's ``height`` attribute is the data value itself; the bar group is
scaled so that the largest value spans the plot height. Output is a pure
function of the inputs.
"""
from typing import List, Optional, Sequence

from markupsafe import escape

from errors import ChartInputError

PLOT_HEIGHT = 200
BAR_WIDTH = 48
BAR_GAP = 24
MARGIN_LEFT = 56
MARGIN_RIGHT = 16
MARGIN_TOP = 28
MARGIN_BOTTOM = 40
MIN_PLOT_WIDTH = 120
BAR_FILL = "#3b6ea5"


def _num(value: float) -> str:
    return f"{value:.6g}"


class SVG:
    """
    Minimal SVG string builder.
    """

    def __init__(self, width: int, height: int, chart_id: str, title: str):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" id="{escape(chart_id)}" '
            f'class="chart" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}" role="img">',
            f"<title>{escape(title)}</title>",
        ]

    def line(self, x1, y1, x2, y2, css_class: str) -> None:
        self.parts.append(
            f'<line class="{css_class}" x1="{_num(x1)}" y1="{_num(y1)}" '
            f'x2="{_num(x2)}" y2="{_num(y2)}" stroke="#333"/>'
        )

    def text(self, x, y, content: str, css_class: str, extra: str = "") -> None:
        self.parts.append(
            f'<text class="{css_class}" x="{_num(x)}" y="{_num(y)}"{extra}>'
            f"{escape(content)}</text>"
        )

    def group_start(self, css_class: str, transform: str) -> None:
        self.parts.append(f'<g class="{css_class}" transform="{transform}">')

    def group_end(self) -> None:
        self.parts.append("</g>")

    def rect(self, x, height: float, label: str) -> None:
        self.parts.append(
            f'<rect class="bar" x="{_num(x)}" y="0" width="{BAR_WIDTH}" '
            f'height="{_num(height)}" fill="{BAR_FILL}" data-label="{escape(label)}"/>'
        )

    def get_svg(self) -> str:
        return "\n".join(self.parts + ["</svg>"])


def chart_bars(
    labels: Sequence[str],
    values: Sequence[float],
    axis_title: str,
    *,
    chart_id: str = "chart",
    value_labels: Optional[List[str]] = None,
) -> str:
    """
    Render a vertical bar chart.

    :param labels: one label per bar
    :type labels: Sequence[str]
    :param values: non-negative bar values
    :type values: Sequence[float]
    :param axis_title: title of the value axis
    :type axis_title: str
    :param chart_id: ``id`` attribute of the ``<svg>`` element
    :type chart_id: str
    :param value_labels: text printed above each bar, defaults to the value
    :type value_labels: list[str] | None
    :return: SVG fragment
    :rtype: str
    :raises ChartInputError: lengths differ or a value is negative
    """
    if len(labels) != len(values):
        raise ChartInputError(
            f"{len(labels)} labels for {len(values)} values",
            data={"labels": len(labels), "values": len(values)},
        )
    if any(v < 0 for v in values):
        raise ChartInputError("Bar values must be non-negative")
    if value_labels is None:
        value_labels = [_num(v) for v in values]

    plot_width = max(MIN_PLOT_WIDTH, BAR_GAP + len(values) * (BAR_WIDTH + BAR_GAP))
    width = MARGIN_LEFT + plot_width + MARGIN_RIGHT
    height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM
    baseline = MARGIN_TOP + PLOT_HEIGHT
    top = max(values, default=0)
    scale = PLOT_HEIGHT / top if top > 0 else 1.0

    svg = SVG(width, height, chart_id, axis_title)
    svg.line(MARGIN_LEFT, MARGIN_TOP, MARGIN_LEFT, baseline, "axis y-axis")
    svg.line(MARGIN_LEFT, baseline, MARGIN_LEFT + plot_width, baseline, "axis x-axis")
    svg.text(
        16,
        MARGIN_TOP + PLOT_HEIGHT / 2,
        axis_title,
        "axis-title",
        extra=f' text-anchor="middle" transform="rotate(-90 16 {_num(MARGIN_TOP + PLOT_HEIGHT / 2)})"',
    )

    svg.group_start("bars", f"translate(0 {baseline}) scale(1 -{_num(scale)})")
    for i, (label, value) in enumerate(zip(labels, values)):
        svg.rect(MARGIN_LEFT + BAR_GAP + i * (BAR_WIDTH + BAR_GAP), value, label)
    svg.group_end()

    for i, (label, value, shown) in enumerate(zip(labels, values, value_labels)):
        center = MARGIN_LEFT + BAR_GAP + i * (BAR_WIDTH + BAR_GAP) + BAR_WIDTH / 2
        svg.text(center, baseline + 16, label, "bar-label", extra=' text-anchor="middle"')
        svg.text(
            center,
            baseline - value * scale - 4,
            shown,
            "bar-value",
            extra=' text-anchor="middle"',
        )
    return svg.get_svg()
