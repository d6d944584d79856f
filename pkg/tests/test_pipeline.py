import json
import xml.etree.ElementTree as ET
from concurrent.futures import ThreadPoolExecutor

import pytest

from conftest import SAMPLE_TRANSCRIPT
from crud.notification import CRUDNotification
from crud.submission import CRUDSubmission
from db import session_scope
from errors import (
    DuplicateSubmissionError,
    InvalidMetadataError,
    NoReportsError,
    UnknownWeekError,
)
from models.artifact import (
    Acl,
    ArtifactKind,
    DBNotification,
    DBSubmission,
    OutcomeStatus,
    SubmissionEvent,
    SubmissionStatus,
    UploadMeta,
)
from models.report import EngagementReport
from models.transcript import TranscriptFormat
from services.pipeline import TranscriptAnalyzer, derive_submission_id
from services.store import LOCK_STRIPES
from services.transcript import parse_transcript

SVG_NS = "{http://www.w3.org/2000/svg}"

W1_KEYWORDS = [
    "hypervisor", "bare-metal", "virtualbox", "hypercall", "vt-x", "ballooning",
    "virtio", "pre-copy", "container", "namespace", "cgroups", "dockerfile",
]
W2_KEYWORDS = ["iaas", "paas", "saas", "serverless", "caas", "public cloud"]


def _payload(keywords) -> bytes:
    lines = []
    for keyword in keywords:
        lines.append(f"Student: What is {keyword} and when should I use it?")
        lines.append("Agent: Good question, let us look at it.")
    return "\n".join(lines).encode("utf-8")


def _submit(pipeline, pseudonym, week_id, payload, submitted_at=1756800000):
    meta = UploadMeta(student_pseudonym=pseudonym, week_id=week_id, submitted_at=submitted_at)
    return pipeline.handle_submission(pipeline.event_from_upload(meta, payload))


def _submission(pipeline, submission_id):
    with session_scope(pipeline.store.engine) as session:
        return CRUDSubmission(DBSubmission, session).get(id=submission_id)


class TestHandleSubmission:
    def test_sample_is_processed(self, pipeline):
        outcome = _submit(pipeline, "stu-001", "w1", SAMPLE_TRANSCRIPT.read_bytes())
        assert outcome.status == OutcomeStatus.processed

        store = pipeline.store
        assert store.meta(outcome.report_key).acl == Acl.student_only
        assert store.meta(outcome.assessment_key).acl == Acl.instructor_only
        metrics = EngagementReport.parse_raw(store.get(outcome.metrics_key))
        assert metrics.topic_coverage == pytest.approx(0.15)
        assert metrics.submitted_at == 1756800000
        assert "15%" in store.get(outcome.report_key).decode("utf-8")

        record = _submission(pipeline, outcome.submission_id)
        assert record.status == SubmissionStatus.processed
        assert record.raw_key is not None

    def test_submission_id_is_derived(self, pipeline):
        payload = SAMPLE_TRANSCRIPT.read_bytes()
        outcome = _submit(pipeline, "stu-001", "w1", payload)
        assert outcome.submission_id == derive_submission_id("stu-001", "w1", payload)
        assert outcome.submission_id.startswith("sub-")

    def test_notification_is_recorded(self, pipeline):
        outcome = _submit(pipeline, "stu-001", "w1", SAMPLE_TRANSCRIPT.read_bytes())
        with session_scope(pipeline.store.engine) as session:
            rows = CRUDNotification(DBNotification, session).for_submission(outcome.submission_id)
        assert [(r.recipient_pseudonym, r.report_key) for r in rows] == [
            ("stu-001", outcome.report_key)
        ]

    def test_repeated_delivery_is_idempotent(self, pipeline):
        meta = UploadMeta(student_pseudonym="stu-002", week_id="w1", submitted_at=1756800000)
        event = pipeline.event_from_upload(meta, SAMPLE_TRANSCRIPT.read_bytes())
        store = pipeline.store
        outcomes = [pipeline.handle_submission(event)]
        stored = len(store)
        outcomes += [pipeline.handle_submission(event) for _ in range(4)]

        assert all(o == outcomes[0] for o in outcomes)
        assert len(store) == stored
        assert len(store.list(kind=ArtifactKind.report)) == 1
        assert len(store.list(kind=ArtifactKind.metrics)) == 1
        with session_scope(store.engine) as session:
            assert len(CRUDNotification(DBNotification, session).for_submission(event.submission_id)) == 1

    def test_concurrent_delivery_of_the_same_submission(self, pipeline):
        meta = UploadMeta(student_pseudonym="stu-005", week_id="w1", submitted_at=1756800000)
        event = pipeline.event_from_upload(meta, SAMPLE_TRANSCRIPT.read_bytes())
        with ThreadPoolExecutor(max_workers=8) as pool:
            outcomes = list(pool.map(lambda _: pipeline.handle_submission(event), range(16)))

        assert all(o == outcomes[0] for o in outcomes)
        assert outcomes[0].status == OutcomeStatus.processed
        assert len(pipeline.store.list(kind=ArtifactKind.report)) == 1
        with session_scope(pipeline.store.engine) as session:
            assert len(CRUDNotification(DBNotification, session).for_submission(event.submission_id)) == 1

    def test_lock_pool_does_not_grow_with_submissions(self, pipeline):
        for i in range(3):
            _submit(pipeline, f"stu-{i}", "w1", _payload(W1_KEYWORDS[i : i + 2]))
        assert len(pipeline._lock_for) == LOCK_STRIPES

    def test_same_id_with_another_payload(self, pipeline):
        meta = UploadMeta(
            student_pseudonym="stu-003", week_id="w1", submission_id="sub-fixed", submitted_at=1
        )
        pipeline.handle_submission(pipeline.event_from_upload(meta, SAMPLE_TRANSCRIPT.read_bytes()))
        other = pipeline.event_from_upload(meta, _payload(["hypervisor"]))
        with pytest.raises(DuplicateSubmissionError) as exc:
            pipeline.handle_submission(other)
        assert exc.value.status_code == 409
        assert pipeline.store.list(kind=ArtifactKind.dead_letter) == []

    def test_unknown_week_is_dead_lettered_once(self, pipeline):
        meta = UploadMeta(student_pseudonym="stu-004", week_id="w99", submitted_at=1)
        event = pipeline.event_from_upload(meta, SAMPLE_TRANSCRIPT.read_bytes())
        outcomes = [pipeline.handle_submission(event) for _ in range(3)]

        outcome = outcomes[0]
        assert outcome.status == OutcomeStatus.dead_letter
        assert outcome.error["error"] == "unknown_week"
        assert outcome.error_status == 404
        assert all(o == outcome for o in outcomes)

        dead = pipeline.store.list(kind=ArtifactKind.dead_letter)
        assert [d.key for d in dead] == [outcome.dead_letter_key]
        assert dead[0].acl == Acl.instructor_only
        document = json.loads(pipeline.store.get(outcome.dead_letter_key))
        assert document["week_id"] == "w99"
        assert document["raw_key"] is not None
        assert pipeline.store.list(kind=ArtifactKind.report) == []
        assert _submission(pipeline, event.submission_id).status == SubmissionStatus.dead_letter

    def test_malformed_transcript_is_dead_lettered(self, pipeline):
        outcome = _submit(pipeline, "stu-005", "w1", b"no prefix here\nStudent: hi")
        assert outcome.status == OutcomeStatus.dead_letter
        assert outcome.error["error"] == "transcript_format"
        assert outcome.error_status == 422

    def test_missing_payload(self, pipeline, tmp_path):
        event = SubmissionEvent(
            submission_id="sub-gone",
            student_pseudonym="stu-006",
            week_id="w1",
            payload_ref=str(tmp_path / "gone.txt"),
        )
        outcome = pipeline.handle_submission(event)
        assert outcome.status == OutcomeStatus.dead_letter
        assert outcome.error["error"] == "payload_missing"
        assert _submission(pipeline, "sub-gone").payload_hash == ""

    def test_rejected_upload(self, pipeline, tmp_path):
        key = pipeline.reject_upload("sub-bad", str(tmp_path / "x.txt"), InvalidMetadataError("bad"))
        document = json.loads(pipeline.store.get(key))
        assert document["error"]["error"] == "invalid_metadata"
        assert pipeline.store.meta(key).kind == ArtifactKind.dead_letter


class TestClassAggregation:
    def _fill_week(self, pipeline, week_id, keywords, students, start_at):
        for i in range(students):
            picked = keywords[: 1 + i % len(keywords)]
            outcome = _submit(pipeline, f"stu-{week_id}-{i:02d}", week_id, _payload(picked), start_at + i)
            assert outcome.status == OutcomeStatus.processed

    def test_seventeen_reports_make_one_class_document(self, pipeline):
        self._fill_week(pipeline, "w1", W1_KEYWORDS, 17, 1756800000)
        key = pipeline.run_class_aggregation("w1")

        store = pipeline.store
        assert store.meta(key).kind == ArtifactKind.class_report
        assert store.meta(key).acl == Acl.instructor_only
        body = store.get(key).decode("utf-8")
        assert '<tr id="week-w1"><td>w1</td><td>17</td>' in body
        assert "change-coverage" not in body

        assert pipeline.run_class_aggregation("w1") == key
        assert len(store.list(kind=ArtifactKind.class_report)) == 1
        assert len(store.list(kind=ArtifactKind.aggregate)) == 1

    def test_compares_with_the_previous_week(self, pipeline):
        self._fill_week(pipeline, "w1", W1_KEYWORDS, 5, 1756800000)
        self._fill_week(pipeline, "w2", W2_KEYWORDS, 5, 1757404800)
        body = pipeline.store.get(pipeline.run_class_aggregation("w2")).decode("utf-8")
        assert 'id="change-coverage"' in body
        assert "From w1 to w2" in body

    def test_previous_week_without_reports(self, pipeline):
        self._fill_week(pipeline, "w2", W2_KEYWORDS, 3, 1757404800)
        body = pipeline.store.get(pipeline.run_class_aggregation("w2")).decode("utf-8")
        assert "change-coverage" not in body

    def test_no_reports(self, pipeline):
        with pytest.raises(NoReportsError):
            pipeline.run_class_aggregation("w3")

    def test_unknown_week(self, pipeline):
        with pytest.raises(UnknownWeekError):
            pipeline.run_class_aggregation("w99")


class TestTranscriptAnalyzer:
    def test_tutorial_only_subtopics_can_be_excluded(self, curriculum, settings, sample_payload, sample_meta):
        transcript = parse_transcript(sample_payload, TranscriptFormat.plain_text, sample_meta)
        narrow = settings.copy(update={"count_tutorial_only": False})
        analysis = TranscriptAnalyzer(curriculum, narrow).analyze(transcript)
        assert analysis.report.total_subtopics == 18
        assert analysis.document.created_at == 1756800000

    def test_excluded_subtopics_are_not_rendered(self, curriculum, settings, sample_payload, sample_meta):
        transcript = parse_transcript(sample_payload, TranscriptFormat.plain_text, sample_meta)
        narrow = settings.copy(update={"count_tutorial_only": False})
        document = TranscriptAnalyzer(curriculum, narrow).analyze(transcript).document

        root = ET.fromstring(document.body.encode("utf-8"))
        depth_chart = next(e for e in root.iter() if e.get("id") == "depth-chart")
        labels = [rect.get("data-label") for rect in depth_chart.iter(f"{SVG_NS}rect")]
        assert len(labels) == 18
        assert "s16-docker" not in labels
        assert "s17-registry" not in labels
        assert "subtopic-s16-docker" not in document.body
        assert "Docker engine" not in document.body
        assert "Image registries" not in document.body
        assert "You engaged with 3 of 18 subtopics" in document.body
