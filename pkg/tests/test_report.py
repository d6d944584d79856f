import xml.etree.ElementTree as ET

import pytest

from conftest import GOLDEN_DIR, make_report, make_transcript, week_reports
from errors import EmptyAggregateError, WeekMismatchError
from models.assessment import AssessmentSet, Backend
from models.report import DocumentKind
from models.transcript import TranscriptFormat
from services.evaluator import evaluate_heuristic
from services.metrics import aggregate_class, build_report, compare_weeks
from services.report import render_class_report, render_student_report
from services.transcript import parse_transcript

XHTML_NS = "{http://www.w3.org/1999/xhtml}"
SVG_NS = "{http://www.w3.org/2000/svg}"


def _parse(document):
    return ET.fromstring(document.body.encode("utf-8"))


def _by_id(root, element_id):
    for element in root.iter():
        if element.get("id") == element_id:
            return element
    raise AssertionError(f"no element with id {element_id}")


def _text(element) -> str:
    return "".join(element.itertext()).strip()


def _check_golden(document):
    path = GOLDEN_DIR / document.filename
    if not path.is_file():
        pytest.fail(f"missing golden document {path.name}")
    assert document.body == path.read_text(encoding="utf-8")


@pytest.fixture
def sample_report(sample_payload, sample_meta, w1_subtopics):
    transcript = parse_transcript(sample_payload, TranscriptFormat.plain_text, sample_meta)
    return build_report(transcript, evaluate_heuristic(transcript, w1_subtopics), 20)


@pytest.fixture
def class_documents():
    week1 = aggregate_class(week_reports("w1", (0.525, 1.33, 48.2), total=20))
    week2 = aggregate_class(
        week_reports("w2", (0.31, 2.06, 54.4), total=21, start_at=1757404800)
    )
    return week1, week2, compare_weeks(week1, week2)


class TestStudentReport:
    def test_headline_metrics(self, sample_report, week1):
        root = _parse(render_student_report(sample_report, week1))
        assert _text(_by_id(root, "metric-coverage")).startswith("15%")
        assert _text(_by_id(root, "metric-depth")).startswith("2.00")
        assert _text(_by_id(root, "metric-turn-length")).startswith("8.00")

    def test_summary_states_engaged_only_average(self, sample_report, week1):
        body = render_student_report(sample_report, week1).body
        assert "You engaged with 3 of 20 subtopics" in body
        assert "average depth was 2.00 out of 3" in body

    def test_subtopic_rows(self, sample_report, week1):
        root = _parse(render_student_report(sample_report, week1))
        row = [_text(td) for td in _by_id(root, "subtopic-s09-containers")]
        assert row == [
            "Containers",
            "Examined in depth through reasoning or clarification",
            "3",
            "7.00",
        ]
        untouched = [_text(td) for td in _by_id(root, "subtopic-s20-overhead")]
        assert untouched[1:] == ["—", "0", "—"]

    def test_explore_next_lists_five_unengaged_subtopics(self, sample_report, week1):
        root = _parse(render_student_report(sample_report, week1))
        items = [_text(li) for li in root.iter(f"{XHTML_NS}li")]
        assert items == [
            "Hosted hypervisors",
            "Paravirtualization",
            "Hardware-assisted virtualization",
            "Memory virtualization",
            "I/O virtualization",
        ]

    def test_charts_are_inline(self, sample_report, week1):
        document = render_student_report(sample_report, week1)
        root = _parse(document)
        assert len(document.charts) == 2
        assert len(list(root.iter(f"{SVG_NS}svg"))) == 2
        depth_chart = _by_id(root, "depth-chart")
        heights = [rect.get("height") for rect in depth_chart.iter(f"{SVG_NS}rect")]
        assert len(heights) == 20
        assert heights[:3] == ["1", "2", "0"]

    def test_timestamp_is_the_submission_time(self, sample_report, week1):
        document = render_student_report(sample_report, week1)
        assert document.created_at == 1756800000
        assert "Generated 2025-09-02 08:00 UTC" in document.body
        assert render_student_report(sample_report, week1).body == document.body

    def test_identity(self, sample_report, week1):
        document = render_student_report(sample_report, week1)
        assert document.kind == DocumentKind.student_feedback
        assert document.filename == "student-feedback-w1-sub-sample.html"

    def test_undefined_metrics_render_as_dash(self, week1):
        transcript = make_transcript(["hello"])
        assessment = AssessmentSet(
            week_id="w1", submission_id="sub-test", backend=Backend.heuristic
        )
        report = build_report(transcript, assessment, 20)
        root = _parse(render_student_report(report, week1))
        assert _text(_by_id(root, "metric-coverage")).startswith("0%")
        assert _text(_by_id(root, "metric-depth")).startswith("—")
        assert _text(_by_id(root, "metric-turn-length")).startswith("—")

    def test_titles_are_escaped(self, sample_report, week1):
        week = week1.copy(update={"topic_title": "<script>alert('x')</script> & more"})
        document = render_student_report(sample_report, week)
        assert "<script>" not in document.body
        assert _text(_parse(document).find(f"{XHTML_NS}body/{XHTML_NS}h1")).endswith(
            "<script>alert('x')</script> & more"
        )

    def test_week_mismatch(self, sample_report, week2):
        with pytest.raises(WeekMismatchError):
            render_student_report(sample_report, week2)

    def test_golden(self, sample_report, week1):
        _check_golden(render_student_report(sample_report, week1))


class TestClassReport:
    def test_callouts(self, class_documents):
        week1, week2, comparison = class_documents
        root = _parse(render_class_report([week1, week2], comparison))
        assert _text(_by_id(root, "change-coverage")) == "−41%"
        assert _text(_by_id(root, "change-depth")) == "+55%"
        assert _text(_by_id(root, "change-turn-length")) == "+13%"

    def test_trend_sentence(self, class_documents):
        week1, week2, comparison = class_documents
        body = render_class_report([week1, week2], comparison).body
        assert "From w1 to w2 the class median coverage changed by −41%" in body

    def test_coverage_bars_keep_the_ratio(self, class_documents):
        week1, week2, comparison = class_documents
        root = _parse(render_class_report([week1, week2], comparison))
        chart = _by_id(root, "median-coverage-chart")
        heights = [float(rect.get("height")) for rect in chart.iter(f"{SVG_NS}rect")]
        assert heights == [52.5, 31.0]
        assert heights[0] / heights[1] == pytest.approx(52.5 / 31)

    def test_median_rows(self, class_documents):
        week1, week2, comparison = class_documents
        root = _parse(render_class_report([week1, week2], comparison))
        assert [_text(td) for td in _by_id(root, "week-w1")] == ["w1", "5", "53%", "1.33", "48.20"]
        assert [_text(td) for td in _by_id(root, "week-w2")] == ["w2", "5", "31%", "2.06", "54.40"]

    def test_identity(self, class_documents):
        week1, week2, comparison = class_documents
        compared = render_class_report([week1, week2], comparison)
        assert compared.kind == DocumentKind.week_comparison
        assert compared.doc_id == "week-comparison-w2-class"
        assert compared.created_at == 1757404804
        single = render_class_report([week1])
        assert single.kind == DocumentKind.class_aggregate
        assert single.doc_id == "class-aggregate-w1-class"
        assert "change-coverage" not in single.body

    def test_undefined_medians(self):
        agg = aggregate_class([make_report("w1", 0.0, None, None)])
        root = _parse(render_class_report([agg]))
        assert [_text(td) for td in _by_id(root, "week-w1")][3:] == ["—", "—"]

    def test_nothing_to_render(self):
        with pytest.raises(EmptyAggregateError):
            render_class_report([])

    def test_golden(self, class_documents):
        week1, week2, comparison = class_documents
        _check_golden(render_class_report([week1, week2], comparison))
