"""
Rounding and display rules used by every rendered document.

Percentages and percent changes round to the nearest integer (halves away
from zero); depth and word counts keep two decimals. Undefined values render
as an em dash.
"""
from decimal import ROUND_HALF_UP, Decimal
from typing import Optional

UNDEFINED = "—"
MINUS = "−"

DEPTH_LABELS = {
    0: "Briefly mentioned",
    1: "Basic question asked",
    2: "Explored with follow-ups or comparisons",
    3: "Examined in depth through reasoning or clarification",
}


def round_half_up(value: float, places: int = 0) -> Decimal:
    exponent = Decimal(1).scaleb(-places)
    return Decimal(repr(value)).quantize(exponent, rounding=ROUND_HALF_UP)


def percent(fraction: Optional[float]) -> str:
    """
    ``0.15`` -> ``"15%"``.
    """
    if fraction is None:
        return UNDEFINED
    return f"{round_half_up(fraction * 100):.0f}%"


def signed_percent(change: Optional[float]) -> str:
    """
    ``-40.95`` -> ``"−41%"``, ``54.88`` -> ``"+55%"``, ``0`` -> ``"0%"``.
    """
    if change is None:
        return UNDEFINED
    rounded = round_half_up(change)
    if rounded > 0:
        return f"+{rounded:.0f}%"
    if rounded < 0:
        return f"{MINUS}{-rounded:.0f}%"
    return "0%"


def decimal2(value: Optional[float]) -> str:
    if value is None:
        return UNDEFINED
    return f"{round_half_up(value, 2):.2f}"


def depth_label(depth: int) -> str:
    return DEPTH_LABELS.get(depth, str(depth))


def chart_value(value: float) -> float:
    """
    Value handed to a chart: rounded to six decimals so that e.g. 0.525 * 100
    plots as exactly 52.5.
    """
    return round(value, 6)
