"""
This module contains schemas of the HTTP endpoints.
"""
from typing import Optional

from pydantic import BaseModel

from models.artifact import OutcomeStatus


class SubmissionResp(BaseModel):
    """
    Schema of a processed upload.

    :param report_key: store key of the student feedback document
    :type report_key: str
    """

    submission_id: str
    status: OutcomeStatus
    report_key: Optional[str]
    assessment_key: Optional[str]
    metrics_key: Optional[str]


class AggregationResp(BaseModel):
    week_id: str
    class_report_key: str


class HealthResp(BaseModel):
    status: str = "ok"
    backend: str
    artifacts: int
    queued: int
