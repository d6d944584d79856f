"""
Engagement metrics per student-week and their class-level aggregation.

A subtopic counts as actively engaged from depth 1 ("basic question asked")
upward; depth 0 ("briefly mentioned") does not. Average depth and turn length
are therefore taken over engaged subtopics only.
"""
import logging
from typing import Callable, Dict, Iterable, List, Optional

import numpy as np

from errors import (
    EmptyAggregateError,
    MetricInputError,
    UndefinedMetricError,
    WeekMismatchError,
    ZeroBaselineError,
)
from models.assessment import AssessmentSet, SubtopicAssessment
from models.report import (
    ClassAggregate,
    EngagementReport,
    MetricSummary,
    SubtopicStats,
    WeekComparison,
)
from models.transcript import Transcript
from services.transcript import student_turns

logger = logging.getLogger(__name__)

ENGAGED_DEPTH = 1


def _mean(values: List[float]) -> float:
    return sum(values) / len(values)


def engaged_entries(assessment: AssessmentSet) -> List[SubtopicAssessment]:
    return [e for e in assessment.entries.values() if e.depth >= ENGAGED_DEPTH]


def topic_coverage(assessment: AssessmentSet, total_subtopics: int) -> float:
    """
    Fraction of the week's canonical subtopics engaged at depth 1 or more.

    :raises MetricInputError: ``total_subtopics`` is not positive or smaller
        than the number of assessed subtopics
    """
    if total_subtopics <= 0:
        raise MetricInputError("total_subtopics must be positive")
    if len(assessment.entries) > total_subtopics:
        raise MetricInputError(
            f"{len(assessment.entries)} assessed subtopics exceed the "
            f"{total_subtopics} canonical ones"
        )
    return len(engaged_entries(assessment)) / total_subtopics


def avg_topic_depth(assessment: AssessmentSet) -> float:
    """
    Mean depth of the engaged subtopics.

    :raises UndefinedMetricError: no subtopic reached depth 1
    """
    engaged = engaged_entries(assessment)
    if not engaged:
        raise UndefinedMetricError(data={"metric": "avg_topic_depth"})
    return _mean([e.depth for e in engaged])


def _subtopic_means(
    transcript: Transcript, entries: Iterable[SubtopicAssessment]
) -> Dict[str, Optional[float]]:
    words = {t.index: t.word_count for t in student_turns(transcript)}
    means = {}
    for entry in entries:
        counts = [words[i] for i in entry.attributed_student_turns if i in words]
        means[entry.subtopic_id] = _mean(counts) if counts else None
    return means


def avg_turn_length_per_topic(transcript: Transcript, assessment: AssessmentSet) -> float:
    """
    Unweighted mean, over engaged subtopics, of the mean words per attributed
    student message. Engaged subtopics without attributed messages are skipped.

    :raises UndefinedMetricError: no engaged subtopic has an attributed message
    """
    means = [
        m
        for m in _subtopic_means(transcript, engaged_entries(assessment)).values()
        if m is not None
    ]
    if not means:
        raise UndefinedMetricError(data={"metric": "avg_turn_length_per_topic"})
    return _mean(means)


def pooled_turn_length(transcript: Transcript, assessment: AssessmentSet) -> float:
    """
    Mean words over every student message attributed to an engaged subtopic.
    Diagnostic counterpart of :func:`avg_turn_length_per_topic`.
    """
    words = {t.index: t.word_count for t in student_turns(transcript)}
    counts = [
        words[i]
        for entry in engaged_entries(assessment)
        for i in entry.attributed_student_turns
        if i in words
    ]
    if not counts:
        raise UndefinedMetricError(data={"metric": "pooled_turn_length"})
    return _mean(counts)


def count_starter_prompt_uses(transcript: Transcript, starter_prompts: Iterable[str]) -> int:
    prompts = {p.strip().casefold() for p in starter_prompts}
    return sum(1 for t in student_turns(transcript) if t.text.strip().casefold() in prompts)


def _defined(metric: Callable[..., float], *args) -> Optional[float]:
    try:
        return metric(*args)
    except UndefinedMetricError:
        return None


def build_report(
    transcript: Transcript,
    assessment: AssessmentSet,
    total_subtopics: int,
    starter_prompts: Iterable[str] = (),
) -> EngagementReport:
    """
    Compute every engagement metric of one student-week.

    :param transcript: normalized transcript
    :type transcript: Transcript
    :param assessment: assessment of the same transcript
    :type assessment: AssessmentSet
    :param total_subtopics: number of canonical subtopics of the week
    :type total_subtopics: int
    :param starter_prompts: the week's starter prompts, for the usage diagnostic
    :type starter_prompts: Iterable[str]
    :return: engagement report with undefined metrics set to ``None``
    :rtype: EngagementReport
    """
    if transcript.week_id != assessment.week_id:
        raise WeekMismatchError(
            f"Assessment is for week {assessment.week_id!r}, "
            f"transcript for {transcript.week_id!r}"
        )
    if transcript.submission_id != assessment.submission_id:
        raise MetricInputError("Assessment and transcript belong to different submissions")

    coverage = topic_coverage(assessment, total_subtopics)
    means = _subtopic_means(transcript, assessment.entries.values())
    per_subtopic = {
        sid: SubtopicStats(
            depth=entry.depth,
            mean_student_words=means[sid],
            message_count=len(entry.attributed_student_turns),
        )
        for sid, entry in assessment.entries.items()
    }
    return EngagementReport(
        submission_id=transcript.submission_id,
        student_pseudonym=transcript.student_pseudonym,
        week_id=transcript.week_id,
        submitted_at=transcript.submitted_at,
        total_subtopics=total_subtopics,
        engaged_subtopics=len(engaged_entries(assessment)),
        topic_coverage=coverage,
        avg_topic_depth=_defined(avg_topic_depth, assessment),
        avg_turn_length_per_topic=_defined(avg_turn_length_per_topic, transcript, assessment),
        pooled_turn_length=_defined(pooled_turn_length, transcript, assessment),
        starter_prompt_uses=count_starter_prompt_uses(transcript, starter_prompts),
        per_subtopic=per_subtopic,
    )


def summarize(values: List[float]) -> Optional[MetricSummary]:
    """
    Median, extremes and quartiles of a metric; ``None`` for no values.

    The median of an even count is the mean of the two middle values.
    """
    if not values:
        return None
    arr = np.asarray(values, dtype=float)
    q1, q3 = np.quantile(arr, [0.25, 0.75])
    return MetricSummary(
        n=len(values),
        median=float(np.median(arr)),
        minimum=float(arr.min()),
        maximum=float(arr.max()),
        q1=float(q1),
        q3=float(q3),
    )


def aggregate_class(reports: List[EngagementReport]) -> ClassAggregate:
    """
    Aggregate one week's student reports into class medians.

    Reports with an undefined metric are left out of that metric only.

    :raises EmptyAggregateError: no reports
    :raises WeekMismatchError: reports span several weeks
    """
    if not reports:
        raise EmptyAggregateError("No reports to aggregate")
    weeks = sorted({r.week_id for r in reports})
    if len(weeks) > 1:
        raise WeekMismatchError(f"Reports span several weeks: {weeks}", data={"weeks": weeks})

    aggregate = ClassAggregate(
        week_id=weeks[0],
        n_students=len(reports),
        coverage=summarize([r.topic_coverage for r in reports]),
        avg_depth=summarize(
            [r.avg_topic_depth for r in reports if r.avg_topic_depth is not None]
        ),
        avg_turn_length=summarize(
            [
                r.avg_turn_length_per_topic
                for r in reports
                if r.avg_turn_length_per_topic is not None
            ]
        ),
        latest_submitted_at=max(r.submitted_at for r in reports),
    )
    logger.info("Aggregated %d reports for week %s", len(reports), aggregate.week_id)
    return aggregate


def pct_change(before: Optional[float], after: Optional[float], metric: str) -> float:
    if before is None or before == 0:
        raise ZeroBaselineError(
            f"Baseline of {metric} is {'undefined' if before is None else 'zero'}",
            data={"metric": metric},
        )
    if after is None:
        raise UndefinedMetricError(f"{metric} is undefined", data={"metric": metric})
    return 100.0 * (after - before) / before


def compare_weeks(agg_a: ClassAggregate, agg_b: ClassAggregate) -> WeekComparison:
    """
    Signed percent change of each class median from week a to week b.

    :raises ZeroBaselineError: a median of week a is zero or undefined
    """
    return WeekComparison(
        week_a=agg_a.week_id,
        week_b=agg_b.week_id,
        pct_change_coverage=pct_change(
            agg_a.median_coverage, agg_b.median_coverage, "coverage"
        ),
        pct_change_depth=pct_change(
            agg_a.median_avg_depth, agg_b.median_avg_depth, "avg_topic_depth"
        ),
        pct_change_turn_length=pct_change(
            agg_a.median_avg_turn_length,
            agg_b.median_avg_turn_length,
            "avg_turn_length_per_topic",
        ),
    )
