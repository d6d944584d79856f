"""
Event-driven orchestration: submission -> assessment -> metrics -> feedback.

Every submission ends either with a stored student report or with a stored
dead-letter artifact. Repeated delivery of a submission is answered from the
submission ledger without reprocessing.
"""
import hashlib
import json
import logging
from pathlib import Path
from typing import List, NamedTuple, Optional, Tuple

from config import RubricSettings, Settings, get_rubric
from crud.notification import CRUDNotification
from crud.submission import CRUDSubmission
from db import session_scope
from errors import (
    ArtifactNotFoundError,
    DuplicateSubmissionError,
    NoReportsError,
    PayloadMissingError,
    ServiceError,
    UndefinedMetricError,
    ZeroBaselineError,
)
from models.artifact import (
    Acl,
    ArtifactKind,
    DBNotification,
    DBSubmission,
    NotificationRecord,
    OutcomeStatus,
    ProcessingOutcome,
    SubmissionEvent,
    SubmissionRecord,
    SubmissionStatus,
    SubmissionUpdate,
    UploadMeta,
)
from models.assessment import AssessmentSet, Backend
from models.base import now
from models.curriculum import Curriculum, ModuleSpec, Subtopic
from models.report import ClassAggregate, EngagementReport, RenderedDocument, WeekComparison
from models.transcript import SubmissionMeta, Transcript
from services.curriculum import canonical_subtopics, find_week, parse_curriculum
from services.evaluator import RemoteEvaluator, assessment_to_json, evaluate_heuristic
from services.evaluator.prompts import DEFAULT_RUBRIC_PROMPT
from services.metrics import aggregate_class, build_report, compare_weeks
from services.promptgen import GENERIC_STARTER_PROMPTS
from services.report import render_class_report, render_student_report
from services.store import STORE_SCHEME, ArtifactStore, LockStripes, content_key
from services.transcript import parse_transcript

logger = logging.getLogger(__name__)


def derive_submission_id(student_pseudonym: str, week_id: str, payload: bytes) -> str:
    digest = hashlib.sha256(
        f"{student_pseudonym}\n{week_id}\n{content_key(payload)}".encode("utf-8")
    ).hexdigest()
    return f"sub-{digest[:16]}"


def _outcome(record: SubmissionRecord) -> ProcessingOutcome:
    if record.status == SubmissionStatus.processed:
        return ProcessingOutcome(
            submission_id=record.submission_id,
            status=OutcomeStatus.processed,
            report_key=record.report_key,
            assessment_key=record.assessment_key,
            metrics_key=record.metrics_key,
        )
    error = json.loads(record.error) if record.error else None
    return ProcessingOutcome(
        submission_id=record.submission_id,
        status=OutcomeStatus.dead_letter,
        dead_letter_key=record.dead_letter_key,
        error=error,
        error_status=error.pop("status_code", None) if error else None,
    )


class Analysis(NamedTuple):
    assessment: AssessmentSet
    report: EngagementReport
    document: RenderedDocument


class TranscriptAnalyzer:
    """
    Evaluate a parsed transcript against its week and build the feedback.
    Holds no storage; shared by the pipeline and the ``evaluate`` command.

    :param curriculum: validated curriculum
    :type curriculum: Curriculum
    :param settings: backend selection, remote config and counting rule
    :type settings: Settings
    """

    def __init__(
        self,
        curriculum: Curriculum,
        settings: Settings,
        *,
        rubric: Optional[RubricSettings] = None,
        remote: Optional[RemoteEvaluator] = None,
    ):
        self.curriculum = curriculum
        self.settings = settings
        self.rubric = rubric or get_rubric()
        self.remote = remote
        if self.remote is None and settings.backend == Backend.remote:
            self.remote = RemoteEvaluator(settings.remote_config())
        self.rubric_prompt = DEFAULT_RUBRIC_PROMPT
        if settings.rubric_prompt_path is not None:
            self.rubric_prompt = Path(settings.rubric_prompt_path).read_text(encoding="utf-8")

    def _evaluate(
        self, transcript: Transcript, module: ModuleSpec, subtopics: List[Subtopic]
    ) -> AssessmentSet:
        if self.settings.backend == Backend.remote:
            prompt = module.evaluation_prompt or self.rubric_prompt
            return self.remote.evaluate(
                transcript, subtopics, prompt, week_id=transcript.week_id
            )
        return evaluate_heuristic(
            transcript, subtopics, week_id=transcript.week_id, rubric=self.rubric
        )

    def analyze(self, transcript: Transcript) -> Analysis:
        """
        :raises UnknownWeekError: transcript week is not in the curriculum
        """
        module, week = find_week(self.curriculum, transcript.week_id)
        subtopics = canonical_subtopics(week, self.settings.count_tutorial_only)
        assessment = self._evaluate(transcript, module, subtopics)
        report = build_report(
            transcript,
            assessment,
            len(subtopics),
            [*week.starter_prompts, *GENERIC_STARTER_PROMPTS],
        )
        return Analysis(assessment, report, render_student_report(report, week, subtopics=subtopics))


class Pipeline:
    """
    Processing of submissions and class aggregation over one artifact store.

    Safe to call from several threads for distinct submission ids; deliveries
    of the same submission id are serialized.

    :param curriculum: validated curriculum
    :type curriculum: Curriculum
    :param store: artifact store
    :type store: ArtifactStore
    :param settings: service settings (backend selection, remote config)
    :type settings: Settings
    """

    def __init__(
        self,
        curriculum: Curriculum,
        store: ArtifactStore,
        settings: Settings,
        *,
        rubric: Optional[RubricSettings] = None,
        remote: Optional[RemoteEvaluator] = None,
    ):
        self.curriculum = curriculum
        self.store = store
        self.settings = settings
        self.analyzer = TranscriptAnalyzer(curriculum, settings, rubric=rubric, remote=remote)
        self._lock_for = LockStripes()

    @classmethod
    def from_settings(cls, settings: Settings, **kwargs) -> "Pipeline":
        curriculum = parse_curriculum(Path(settings.curriculum_path).read_bytes())
        return cls(curriculum, ArtifactStore(settings.store_root), settings, **kwargs)

    # Ingestion

    def event_from_upload(
        self, meta: UploadMeta, payload: bytes, received_at: Optional[int] = None
    ) -> SubmissionEvent:
        """
        Store an uploaded transcript and describe it as a submission event.
        """
        submission_id = meta.submission_id or derive_submission_id(
            meta.student_pseudonym, meta.week_id, payload
        )
        if received_at is None:
            received_at = meta.submitted_at if meta.submitted_at is not None else now()
        raw = self.store.put(
            payload,
            ArtifactKind.raw_transcript,
            Acl.student_only,
            week_id=meta.week_id,
            submission_id=submission_id,
            created_at=received_at,
        )
        return SubmissionEvent(
            submission_id=submission_id,
            student_pseudonym=meta.student_pseudonym,
            week_id=meta.week_id,
            received_at=received_at,
            payload_ref=f"{STORE_SCHEME}{raw.key}",
            format=meta.format,
        )

    def _resolve_payload(self, event: SubmissionEvent) -> bytes:
        try:
            return self.store.resolve(event.payload_ref)
        except (OSError, ArtifactNotFoundError) as exc:
            raise PayloadMissingError(
                f"Cannot read payload {event.payload_ref!r}: {exc}",
                data={"payload_ref": event.payload_ref},
            )

    # Processing

    def handle_submission(self, event: SubmissionEvent) -> ProcessingOutcome:
        """
        Process one submission end to end.

        Parse, evaluate, compute metrics and render feedback; store the raw
        transcript, the assessment, the metrics and the feedback document and
        record a notification. Any failure is stored as a dead-letter artifact.

        :param event: submission to process
        :type event: SubmissionEvent
        :return: keys of the stored artifacts or of the dead letter
        :rtype: ProcessingOutcome
        :raises DuplicateSubmissionError: the submission id was already used
            with a different payload
        """
        with self._lock_for(event.submission_id):
            try:
                payload = self._resolve_payload(event)
            except PayloadMissingError as exc:
                return self._settle(event, "", None, exc)
            payload_hash = content_key(payload)

            with session_scope(self.store.engine) as session:
                record = CRUDSubmission(DBSubmission, session).get_or_none(
                    id=event.submission_id
                )
                if record is not None and record.status != SubmissionStatus.processing:
                    if record.payload_hash != payload_hash:
                        raise DuplicateSubmissionError(
                            f"Submission {event.submission_id!r} was already "
                            "delivered with a different payload",
                            data={"submission_id": event.submission_id},
                        )
                    logger.info("Submission %s already handled", event.submission_id)
                    return _outcome(record)
                if record is None:
                    CRUDSubmission(DBSubmission, session).create(
                        obj_in=SubmissionRecord(
                            submission_id=event.submission_id,
                            student_pseudonym=event.student_pseudonym,
                            week_id=event.week_id,
                            payload_hash=payload_hash,
                            created_at=event.received_at,
                        )
                    )

            raw_key = None
            try:
                raw_key = self.store.put(
                    payload,
                    ArtifactKind.raw_transcript,
                    Acl.student_only,
                    week_id=event.week_id,
                    submission_id=event.submission_id,
                    created_at=event.received_at,
                ).key
                update = self._process(event, payload, raw_key)
            except Exception as exc:
                return self._settle(event, payload_hash, raw_key, exc)

            with session_scope(self.store.engine) as session:
                record = CRUDSubmission(DBSubmission, session).update(
                    obj_id=event.submission_id, obj_new=update
                )
                return _outcome(record)

    def _process(self, event: SubmissionEvent, payload: bytes, raw_key: str) -> SubmissionUpdate:
        find_week(self.curriculum, event.week_id)
        transcript = parse_transcript(
            payload,
            event.format,
            SubmissionMeta(
                submission_id=event.submission_id,
                student_pseudonym=event.student_pseudonym,
                week_id=event.week_id,
                submitted_at=event.received_at,
            ),
        )
        assessment, report, document = self.analyzer.analyze(transcript)

        put = dict(
            week_id=event.week_id,
            submission_id=event.submission_id,
            created_at=event.received_at,
        )
        assessment_key = self.store.put(
            assessment_to_json(assessment), ArtifactKind.assessment, Acl.instructor_only, **put
        ).key
        metrics_key = self.store.put(
            report.json(indent=2, ensure_ascii=False).encode("utf-8"),
            ArtifactKind.metrics,
            Acl.both,
            **put,
        ).key
        report_key = self.store.put(
            document.body.encode("utf-8"), ArtifactKind.report, Acl.student_only, **put
        ).key
        self._notify(report, report_key)
        return SubmissionUpdate(
            status=SubmissionStatus.processed,
            raw_key=raw_key,
            assessment_key=assessment_key,
            metrics_key=metrics_key,
            report_key=report_key,
        )

    def _notify(self, report: EngagementReport, report_key: str) -> None:
        logger.info(
            "Notify %s: feedback for week %s is ready (report %s)",
            report.student_pseudonym,
            report.week_id,
            report_key,
        )
        with session_scope(self.store.engine) as session:
            CRUDNotification(DBNotification, session).create(
                obj_in=NotificationRecord(
                    submission_id=report.submission_id,
                    recipient_pseudonym=report.student_pseudonym,
                    report_key=report_key,
                    sent_at=now(),
                )
            )

    def _dead_letter(
        self,
        event: SubmissionEvent,
        payload_hash: str,
        raw_key: Optional[str],
        exc: Exception,
    ) -> Tuple[str, dict]:
        if isinstance(exc, ServiceError):
            error = exc.as_dict()
            status_code = exc.status_code
        else:
            logger.exception("Internal failure on submission %s", event.submission_id)
            error = {"error": "internal_error", "detail": f"{type(exc).__name__}: {exc}"}
            status_code = 500
        document = {
            "submission_id": event.submission_id,
            "student_pseudonym": event.student_pseudonym,
            "week_id": event.week_id,
            "received_at": event.received_at,
            "payload_ref": event.payload_ref,
            "payload_hash": payload_hash,
            "raw_key": raw_key,
            "error": error,
        }
        key = self.store.put(
            json.dumps(document, indent=2, ensure_ascii=False, sort_keys=True).encode("utf-8"),
            ArtifactKind.dead_letter,
            Acl.instructor_only,
            week_id=event.week_id,
            submission_id=event.submission_id,
            created_at=event.received_at,
        ).key
        logger.warning(
            "Dead-lettered submission %s (%s): %s",
            event.submission_id,
            error["error"],
            error["detail"],
        )
        return key, {**error, "status_code": status_code}

    def _settle(
        self,
        event: SubmissionEvent,
        payload_hash: str,
        raw_key: Optional[str],
        exc: Exception,
    ) -> ProcessingOutcome:
        key, error = self._dead_letter(event, payload_hash, raw_key, exc)
        update = SubmissionUpdate(
            status=SubmissionStatus.dead_letter,
            raw_key=raw_key,
            dead_letter_key=key,
            error=json.dumps(error, ensure_ascii=False),
        )
        with session_scope(self.store.engine) as session:
            crud = CRUDSubmission(DBSubmission, session)
            if crud.get_or_none(id=event.submission_id) is None:
                crud.create(
                    obj_in=SubmissionRecord(
                        submission_id=event.submission_id,
                        student_pseudonym=event.student_pseudonym,
                        week_id=event.week_id,
                        payload_hash=payload_hash,
                        created_at=event.received_at,
                    )
                )
            record = crud.update(obj_id=event.submission_id, obj_new=update)
            return _outcome(record)

    def reject_upload(self, submission_id: str, payload_ref: str, exc: ServiceError) -> str:
        """
        Dead-letter an upload whose metadata could not be turned into an event.

        :return: dead-letter key
        :rtype: str
        """
        document = {
            "submission_id": submission_id,
            "payload_ref": payload_ref,
            "error": exc.as_dict(),
        }
        key = self.store.put(
            json.dumps(document, indent=2, ensure_ascii=False, sort_keys=True).encode("utf-8"),
            ArtifactKind.dead_letter,
            Acl.instructor_only,
            submission_id=submission_id,
        ).key
        logger.warning("Rejected upload %s: %s", submission_id, exc.detail)
        return key

    # Aggregation

    def stored_reports(self, week_id: str) -> List[EngagementReport]:
        return [
            EngagementReport.parse_raw(self.store.get(entry.key))
            for entry in self.store.list(kind=ArtifactKind.metrics, week_id=week_id)
        ]

    def aggregate_week(self, week_id: str) -> ClassAggregate:
        """
        :raises NoReportsError: no stored report for the week
        """
        reports = self.stored_reports(week_id)
        if not reports:
            raise NoReportsError(f"No stored reports for week {week_id!r}", data={"week_id": week_id})
        return aggregate_class(reports)

    def _previous(self, prev_week_id: Optional[str], current: ClassAggregate):
        if prev_week_id is None:
            return None, None
        try:
            previous = self.aggregate_week(prev_week_id)
        except NoReportsError:
            return None, None
        comparison: Optional[WeekComparison] = None
        try:
            comparison = compare_weeks(previous, current)
        except (ZeroBaselineError, UndefinedMetricError) as exc:
            logger.info("No week comparison %s -> %s: %s", prev_week_id, current.week_id, exc.detail)
        return previous, comparison

    def run_class_aggregation(self, week_id: str) -> str:
        """
        Aggregate every stored report of a week, compare with the previous week
        when possible and store the class document for the instructor.

        :param week_id: week to aggregate
        :type week_id: str
        :return: key of the class document
        :rtype: str
        :raises UnknownWeekError: week is not in the curriculum
        :raises NoReportsError: no stored report for the week
        """
        _, week = find_week(self.curriculum, week_id)
        aggregate = self.aggregate_week(week_id)
        previous, comparison = self._previous(week.prev_week_id, aggregate)
        aggs = [previous, aggregate] if previous is not None else [aggregate]
        document = render_class_report(aggs, comparison)

        self.store.put(
            aggregate.json(indent=2, ensure_ascii=False).encode("utf-8"),
            ArtifactKind.aggregate,
            Acl.instructor_only,
            week_id=week_id,
            created_at=aggregate.latest_submitted_at,
        )
        key = self.store.put(
            document.body.encode("utf-8"),
            ArtifactKind.class_report,
            Acl.instructor_only,
            week_id=week_id,
            created_at=document.created_at,
        ).key
        logger.info("Class report for week %s stored as %s", week_id, key)
        return key
