"""
This module contains models of the artifact store, the submission ledger and
notification records, plus the events that drive the pipeline.
"""
from enum import Enum
from typing import Optional

from pydantic import BaseModel, validator
from sqlalchemy.orm import declared_attr
from sqlmodel import Field, SQLModel

from models.base import CreatedAtModel, IntIdModel
from models.transcript import TranscriptFormat, check_pseudonym


class ArtifactKind(str, Enum):
    """
    Enum class represents what a stored blob contains.
    """

    raw_transcript = "raw_transcript"
    assessment = "assessment"
    report = "report"
    class_report = "class_report"
    metrics = "metrics"
    aggregate = "aggregate"
    dead_letter = "dead_letter"


class Acl(str, Enum):
    """
    Enum class represents who may read an artifact.
    """

    student_only = "student_only"
    instructor_only = "instructor_only"
    both = "both"


class Audience(str, Enum):
    student = "student"
    instructor = "instructor"

    def can_read(self, acl: Acl) -> bool:
        if acl == Acl.both:
            return True
        if self == Audience.student:
            return acl == Acl.student_only
        return acl == Acl.instructor_only


class Channel(str, Enum):
    log_only = "log_only"


class SubmissionStatus(str, Enum):
    processing = "processing"
    processed = "processed"
    dead_letter = "dead_letter"


class StoredArtifact(SQLModel):
    """
    Model that represents the index entry of one stored blob.

    :param key: SHA-256 hex digest of the content
    :type key: str
    :param week_id: week the artifact belongs to, if any
    :type week_id: str | None
    :param submission_id: submission that produced the artifact, if any
    :type submission_id: str | None
    """

    key: str = Field(primary_key=True, index=True)
    kind: ArtifactKind = Field(index=True)
    bytes_len: int
    created_at: int
    acl: Acl
    week_id: Optional[str] = Field(default=None, index=True)
    submission_id: Optional[str] = Field(default=None, index=True)


class DBArtifact(StoredArtifact, table=True):
    """
    Model that represents the artifact index in database.
    """

    @declared_attr
    def __tablename__(cls) -> str:
        return "artifact"


class SubmissionRecord(CreatedAtModel):
    """
    Model that represents one entry of the submission ledger.
    The ledger makes processing idempotent under repeated delivery.

    :param payload_hash: SHA-256 of the raw transcript bytes
    :type payload_hash: str
    """

    submission_id: str = Field(primary_key=True, index=True)
    student_pseudonym: str
    week_id: str = Field(index=True)
    payload_hash: str
    status: SubmissionStatus = SubmissionStatus.processing
    raw_key: Optional[str] = None
    assessment_key: Optional[str] = None
    metrics_key: Optional[str] = None
    report_key: Optional[str] = None
    dead_letter_key: Optional[str] = None
    error: Optional[str] = None


class DBSubmission(SubmissionRecord, table=True):
    @declared_attr
    def __tablename__(cls) -> str:
        return "submission"


class SubmissionUpdate(BaseModel):
    status: SubmissionStatus
    raw_key: Optional[str] = None
    assessment_key: Optional[str] = None
    metrics_key: Optional[str] = None
    report_key: Optional[str] = None
    dead_letter_key: Optional[str] = None
    error: Optional[str] = None


class NotificationRecord(SQLModel):
    """
    Model that represents a (log-only) notification of a student report.
    """

    submission_id: str = Field(index=True)
    recipient_pseudonym: str
    report_key: str
    sent_at: int
    channel: Channel = Channel.log_only


class DBNotification(IntIdModel, NotificationRecord, table=True):
    @declared_attr
    def __tablename__(cls) -> str:
        return "notification"


class SubmissionEvent(BaseModel):
    """
    Model that represents a transcript submission waiting to be processed.

    :param payload_ref: filesystem path of the raw transcript or ``store://<key>``
    :type payload_ref: str
    :param received_at: arrival time in UTC seconds, used as submission time
    :type received_at: int
    """

    submission_id: str
    student_pseudonym: str
    week_id: str
    received_at: int = 0
    payload_ref: str
    format: TranscriptFormat = TranscriptFormat.plain_text

    _pseudonym = validator("student_pseudonym", allow_reuse=True)(check_pseudonym)

    @validator("submission_id", "week_id", "payload_ref")
    def _not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("must not be blank")
        return value


class OutcomeStatus(str, Enum):
    processed = "processed"
    dead_letter = "dead_letter"


class ProcessingOutcome(BaseModel):
    """
    Result of handling one submission.

    :param error: error body of a dead-lettered submission
    :type error: dict | None
    """

    submission_id: str
    status: OutcomeStatus
    report_key: Optional[str] = None
    assessment_key: Optional[str] = None
    metrics_key: Optional[str] = None
    dead_letter_key: Optional[str] = None
    error: Optional[dict] = None
    error_status: Optional[int] = None


class UploadMeta(BaseModel):
    """
    Metadata of an upload: the HTTP form fields or a watch-folder ``.meta`` file.

    :param submission_id: derived from pseudonym, week and payload when absent
    :type submission_id: str | None
    """

    student_pseudonym: str
    week_id: str
    format: TranscriptFormat = TranscriptFormat.plain_text
    submitted_at: Optional[int] = None
    submission_id: Optional[str] = None

    _pseudonym = validator("student_pseudonym", allow_reuse=True)(check_pseudonym)

    @validator("week_id")
    def _week_not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("must not be blank")
        return value
