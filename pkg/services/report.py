"""
Rendering of student feedback and class documents.

Documents are XHTML-compatible HTML5 built from the Mako templates under
``templates/`` with HTML escaping on by default. Charts are inline SVG.
Nothing here reads the clock: the document timestamp comes from the data.
"""
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import List, Optional

from mako.lookup import TemplateLookup

from errors import EmptyAggregateError, WeekMismatchError
from models.curriculum import Subtopic, WeekSpec
from models.report import (
    ClassAggregate,
    DocumentKind,
    EngagementReport,
    RenderedDocument,
    WeekComparison,
)
from services.charts import chart_bars
from services.formatting import (
    UNDEFINED,
    chart_value,
    decimal2,
    depth_label,
    percent,
    signed_percent,
)
from services.metrics import ENGAGED_DEPTH

logger = logging.getLogger(__name__)

TEMPLATE_DIR = Path(__file__).resolve().parent.parent / "templates"
EXPLORE_NEXT_LIMIT = 5

_lookup = TemplateLookup(
    directories=[str(TEMPLATE_DIR)],
    default_filters=["h"],
    input_encoding="utf-8",
    strict_undefined=True,
)


def _timestamp(epoch: int) -> str:
    return datetime.fromtimestamp(epoch, tz=timezone.utc).strftime("%Y-%m-%d %H:%M UTC")


def _render(template_name: str, **context) -> str:
    return _lookup.get_template(template_name).render(**context)


def _student_summary(report: EngagementReport, week: WeekSpec) -> str:
    text = (
        f"You engaged with {report.engaged_subtopics} of {report.total_subtopics} "
        f"subtopics of {week.topic_title} ({percent(report.topic_coverage)})."
    )
    if report.avg_topic_depth is None:
        text += " None of the subtopics reached a basic question yet."
    else:
        text += (
            f" On the subtopics you engaged with, your average depth was "
            f"{decimal2(report.avg_topic_depth)} out of 3"
        )
        if report.avg_turn_length_per_topic is not None:
            text += (
                f" and your messages averaged "
                f"{decimal2(report.avg_turn_length_per_topic)} words"
            )
        text += "."
    return text


def render_student_report(
    report: EngagementReport,
    week: WeekSpec,
    generated_at: Optional[int] = None,
    subtopics: Optional[List[Subtopic]] = None,
) -> RenderedDocument:
    """
    Render the feedback document of one student-week.

    :param report: engagement metrics of the student-week
    :type report: EngagementReport
    :param week: the week the report belongs to
    :type week: WeekSpec
    :param generated_at: document timestamp, defaults to the submission time
    :type generated_at: int | None
    :param subtopics: subtopics the report was computed over, defaults to all
        subtopics of the week
    :type subtopics: list[Subtopic] | None
    :return: rendered document
    :rtype: RenderedDocument
    :raises WeekMismatchError: report and week differ
    """
    if report.week_id != week.week_id:
        raise WeekMismatchError(
            f"Report is for week {report.week_id!r}, not {week.week_id!r}",
            data={"report_week": report.week_id, "week": week.week_id},
        )
    created_at = report.submitted_at if generated_at is None else generated_at
    if subtopics is None:
        subtopics = list(week.subtopics)

    rows = []
    depths = []
    explore = []
    for subtopic in subtopics:
        stats = report.per_subtopic.get(subtopic.subtopic_id)
        depth = stats.depth if stats else 0
        depths.append(depth)
        if depth < ENGAGED_DEPTH:
            explore.append(subtopic.title)
        rows.append(
            {
                "subtopic_id": subtopic.subtopic_id,
                "title": subtopic.title,
                "depth": depth_label(stats.depth) if stats else UNDEFINED,
                "messages": str(stats.message_count) if stats else "0",
                "words": decimal2(stats.mean_student_words if stats else None),
            }
        )

    remaining = report.total_subtopics - report.engaged_subtopics
    coverage_chart = chart_bars(
        ["Engaged", "Not engaged"],
        [report.engaged_subtopics, remaining],
        "Subtopics",
        chart_id="coverage-chart",
        value_labels=[str(report.engaged_subtopics), str(remaining)],
    )
    depth_chart = chart_bars(
        [s.subtopic_id for s in subtopics],
        depths,
        "Depth (0 to 3)",
        chart_id="depth-chart",
        value_labels=[str(d) for d in depths],
    )

    kind = DocumentKind.student_feedback
    body = _render(
        "student_report.html.mako",
        title=f"Engagement feedback: {week.topic_title}",
        generated=_timestamp(created_at),
        report=report,
        week=week,
        coverage=percent(report.topic_coverage),
        depth=decimal2(report.avg_topic_depth),
        turn_length=decimal2(report.avg_turn_length_per_topic),
        summary=_student_summary(report, week),
        rows=rows,
        explore=explore[:EXPLORE_NEXT_LIMIT],
        coverage_chart=coverage_chart,
        depth_chart=depth_chart,
    )
    logger.debug("Rendered feedback for submission %s", report.submission_id)
    return RenderedDocument(
        doc_id=f"{kind.value}-{report.week_id}-{report.submission_id}",
        kind=kind,
        body=body,
        charts=[coverage_chart, depth_chart],
        created_at=created_at,
    )


def _trend_summary(cmp: WeekComparison) -> str:
    return (
        f"From {cmp.week_a} to {cmp.week_b} the class median coverage changed by "
        f"{signed_percent(cmp.pct_change_coverage)}, the median depth by "
        f"{signed_percent(cmp.pct_change_depth)} and the median turn length by "
        f"{signed_percent(cmp.pct_change_turn_length)}."
    )


def render_class_report(
    aggs: List[ClassAggregate], cmp: Optional[WeekComparison] = None
) -> RenderedDocument:
    """
    Render the instructor document: weekly class medians as bar charts plus
    percent-change callouts when a comparison is given.

    The document is named after the last aggregate's week.
    """
    if not aggs:
        raise EmptyAggregateError("No class aggregates to render")

    weeks = [a.week_id for a in aggs]
    coverage_chart = chart_bars(
        weeks,
        [chart_value(a.median_coverage * 100) if a.median_coverage is not None else 0 for a in aggs],
        "Median coverage (%)",
        chart_id="median-coverage-chart",
        value_labels=[percent(a.median_coverage) for a in aggs],
    )
    depth_chart = chart_bars(
        weeks,
        [chart_value(a.median_avg_depth) if a.median_avg_depth is not None else 0 for a in aggs],
        "Median depth",
        chart_id="median-depth-chart",
        value_labels=[decimal2(a.median_avg_depth) for a in aggs],
    )
    turn_chart = chart_bars(
        weeks,
        [
            chart_value(a.median_avg_turn_length) if a.median_avg_turn_length is not None else 0
            for a in aggs
        ],
        "Median words per message",
        chart_id="median-turn-length-chart",
        value_labels=[decimal2(a.median_avg_turn_length) for a in aggs],
    )

    rows = [
        {
            "week_id": a.week_id,
            "students": str(a.n_students),
            "coverage": percent(a.median_coverage),
            "depth": decimal2(a.median_avg_depth),
            "turn_length": decimal2(a.median_avg_turn_length),
        }
        for a in aggs
    ]
    callouts = None
    if cmp is not None:
        callouts = {
            "coverage": signed_percent(cmp.pct_change_coverage),
            "depth": signed_percent(cmp.pct_change_depth),
            "turn_length": signed_percent(cmp.pct_change_turn_length),
        }

    kind = DocumentKind.week_comparison if cmp is not None else DocumentKind.class_aggregate
    created_at = max(a.latest_submitted_at for a in aggs)
    body = _render(
        "class_report.html.mako",
        title=f"Class engagement: {', '.join(weeks)}",
        generated=_timestamp(created_at),
        rows=rows,
        cmp=cmp,
        callouts=callouts,
        trend=_trend_summary(cmp) if cmp is not None else None,
        charts=[coverage_chart, depth_chart, turn_chart],
    )
    return RenderedDocument(
        doc_id=f"{kind.value}-{aggs[-1].week_id}-class",
        kind=kind,
        body=body,
        charts=[coverage_chart, depth_chart, turn_chart],
        created_at=created_at,
    )
