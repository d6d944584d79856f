"""
This module contains data models of engagement metrics and rendered documents.
"""
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field

from models.curriculum import FrozenModel

REPORT_SCHEMA_VERSION = "report/v1"
AGGREGATE_SCHEMA_VERSION = "aggregate/v1"


class SubtopicStats(FrozenModel):
    """
    Per-subtopic figures of one student-week.

    :param mean_student_words: mean word count of attributed student messages,
        ``None`` when no message is attributed
    :type mean_student_words: float | None
    """

    depth: int
    mean_student_words: Optional[float]
    message_count: int


class EngagementReport(FrozenModel):
    """
    Model that represents one student-week's engagement metrics.

    Undefined metrics (no engaged subtopic) are ``None`` and render as "—".

    :param topic_coverage: engaged_subtopics / total_subtopics
    :type topic_coverage: float
    :param avg_topic_depth: mean depth over engaged subtopics
    :type avg_topic_depth: float | None
    :param avg_turn_length_per_topic: unweighted mean of per-subtopic mean words
    :type avg_turn_length_per_topic: float | None
    :param pooled_turn_length: mean words over all engaged-subtopic messages
    :type pooled_turn_length: float | None
    """

    schema_version: str = REPORT_SCHEMA_VERSION
    submission_id: str
    student_pseudonym: str
    week_id: str
    submitted_at: int = 0
    total_subtopics: int = Field(..., gt=0)
    engaged_subtopics: int = Field(..., ge=0)
    topic_coverage: float = Field(..., ge=0, le=1)
    avg_topic_depth: Optional[float] = Field(None, ge=0, le=3)
    avg_turn_length_per_topic: Optional[float] = Field(None, ge=0)
    pooled_turn_length: Optional[float] = Field(None, ge=0)
    starter_prompt_uses: int = 0
    per_subtopic: Dict[str, SubtopicStats] = Field(default_factory=dict)


class MetricSummary(FrozenModel):
    """
    Distribution of one metric across the class.
    """

    n: int
    median: float
    minimum: float
    maximum: float
    q1: float
    q3: float


class ClassAggregate(FrozenModel):
    """
    Model that represents class-level medians of one week.
    """

    schema_version: str = AGGREGATE_SCHEMA_VERSION
    week_id: str
    n_students: int = Field(..., gt=0)
    coverage: Optional[MetricSummary]
    avg_depth: Optional[MetricSummary]
    avg_turn_length: Optional[MetricSummary]
    latest_submitted_at: int = 0

    @property
    def median_coverage(self) -> Optional[float]:
        return self.coverage.median if self.coverage else None

    @property
    def median_avg_depth(self) -> Optional[float]:
        return self.avg_depth.median if self.avg_depth else None

    @property
    def median_avg_turn_length(self) -> Optional[float]:
        return self.avg_turn_length.median if self.avg_turn_length else None


class WeekComparison(FrozenModel):
    """
    Signed relative change of the class medians between two weeks, in percent.
    """

    week_a: str
    week_b: str
    pct_change_coverage: float
    pct_change_depth: float
    pct_change_turn_length: float


class DocumentKind(str, Enum):
    student_feedback = "student-feedback"
    class_aggregate = "class-aggregate"
    week_comparison = "week-comparison"


class RenderedDocument(BaseModel):
    """
    Model that represents a rendered HTML document with inline SVG charts.

    :param doc_id: ``{kind}-{week_id}-{submission_id|class}``
    :type doc_id: str
    """

    doc_id: str
    kind: DocumentKind
    body: str
    charts: List[str] = Field(default_factory=list)
    created_at: int

    @property
    def filename(self) -> str:
        return f"{self.doc_id}.html"
