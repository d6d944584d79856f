import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import make_report, make_transcript, week_reports
from errors import (
    EmptyAggregateError,
    MetricInputError,
    UndefinedMetricError,
    WeekMismatchError,
    ZeroBaselineError,
)
from models.assessment import AssessmentSet, Backend, SubtopicAssessment
from models.transcript import TranscriptFormat
from services.evaluator import evaluate_heuristic
from services.formatting import decimal2, percent, signed_percent
from services.metrics import (
    aggregate_class,
    avg_topic_depth,
    avg_turn_length_per_topic,
    build_report,
    compare_weeks,
    pooled_turn_length,
    summarize,
    topic_coverage,
)
from services.transcript import parse_transcript


def _assessment(entries, submission_id="sub-test", unattributed=()):
    return AssessmentSet(
        week_id="w1",
        submission_id=submission_id,
        entries={e.subtopic_id: e for e in entries},
        unattributed_student_turns=list(unattributed),
        backend=Backend.heuristic,
    )


def _entry(subtopic_id, depth, turns=()):
    return SubtopicAssessment(
        subtopic_id=subtopic_id, depth=depth, attributed_student_turns=list(turns)
    )


@st.composite
def assessed_transcripts(draw):
    """
    A transcript with 1-8 student messages, each owned by one of up to six
    subtopics or left unattributed.
    """
    total = draw(st.integers(min_value=1, max_value=6))
    lengths = draw(st.lists(st.integers(min_value=1, max_value=30), min_size=1, max_size=8))
    owner_st = st.integers(min_value=-1, max_value=total - 1)
    owners = draw(st.lists(owner_st, min_size=len(lengths), max_size=len(lengths)))
    depths = draw(st.lists(st.integers(min_value=0, max_value=3), min_size=total, max_size=total))
    present = draw(st.lists(st.booleans(), min_size=total, max_size=total))

    transcript = make_transcript([" ".join(["w"] * n) for n in lengths])
    # student messages sit at even indices
    owned = {i: [2 * k for k, owner in enumerate(owners) if owner == i] for i in range(total)}
    entries = [
        _entry(f"s{i}", depths[i], owned[i])
        for i in range(total)
        if present[i] or owned[i]
    ]
    unattributed = [2 * k for k, owner in enumerate(owners) if owner == -1]
    return transcript, _assessment(entries, unattributed=unattributed), total, lengths


class TestStudentMetrics:
    @pytest.fixture
    def sample_report(self, sample_payload, sample_meta, w1_subtopics):
        transcript = parse_transcript(sample_payload, TranscriptFormat.plain_text, sample_meta)
        assessment = evaluate_heuristic(transcript, w1_subtopics)
        return build_report(transcript, assessment, len(w1_subtopics))

    def test_sample_report(self, sample_report):
        assert sample_report.engaged_subtopics == 3
        assert sample_report.topic_coverage == pytest.approx(0.15)
        assert sample_report.avg_topic_depth == pytest.approx(2.0)
        assert sample_report.avg_turn_length_per_topic == pytest.approx(8.0)
        assert sample_report.pooled_turn_length == pytest.approx(7.6)
        assert percent(sample_report.topic_coverage) == "15%"

    def test_sample_per_subtopic(self, sample_report):
        stats = sample_report.per_subtopic["s09-containers"]
        assert (stats.depth, stats.message_count) == (3, 3)
        assert stats.mean_student_words == pytest.approx(7.0)

    def test_depth_zero_is_not_engaged(self):
        transcript = make_transcript(["one two", "three four five six"])
        assessment = _assessment([_entry("s1", 0, [0]), _entry("s2", 2, [2])])
        assert topic_coverage(assessment, 4) == pytest.approx(0.25)
        assert avg_topic_depth(assessment) == 2
        assert avg_turn_length_per_topic(transcript, assessment) == 4

    def test_engaged_average_on_a_large_week(self):
        depths = [3] * 5 + [2] * 7 + [1] * 4
        assessment = _assessment([_entry(f"s{i:02d}", d) for i, d in enumerate(depths)])
        assert percent(topic_coverage(assessment, 52)) == "31%"
        assert decimal2(avg_topic_depth(assessment)) == "2.06"
        # averaging over every canonical subtopic instead gives a far lower figure
        assert sum(depths) / 52 <= 0.93

    def test_unweighted_per_topic_mean_differs_from_pooled(self):
        transcript = make_transcript(["a b c d e f g h i j", "k", "l", "m"])
        assessment = _assessment([_entry("s1", 1, [0]), _entry("s2", 2, [2, 4, 6])])
        assert avg_turn_length_per_topic(transcript, assessment) == pytest.approx(5.5)
        assert pooled_turn_length(transcript, assessment) == pytest.approx(13 / 4)

    def test_nothing_engaged(self):
        transcript = make_transcript(["hello"])
        assessment = _assessment([_entry("s1", 0, [0])])
        assert topic_coverage(assessment, 20) == 0
        with pytest.raises(UndefinedMetricError):
            avg_topic_depth(assessment)
        with pytest.raises(UndefinedMetricError):
            avg_turn_length_per_topic(transcript, assessment)
        report = build_report(transcript, assessment, 20)
        assert report.avg_topic_depth is None
        assert report.avg_turn_length_per_topic is None

    def test_engaged_without_messages_is_skipped_for_turn_length(self):
        transcript = make_transcript(["one two three"])
        assessment = _assessment([_entry("s1", 2), _entry("s2", 1, [0])])
        assert avg_turn_length_per_topic(transcript, assessment) == 3

    @pytest.mark.parametrize("total", [0, -1, 1])
    def test_bad_total(self, total):
        assessment = _assessment([_entry("s1", 1), _entry("s2", 1)])
        with pytest.raises(MetricInputError):
            topic_coverage(assessment, total)

    def test_mismatched_submission(self):
        transcript = make_transcript(["hi"], submission_id="sub-a")
        with pytest.raises(MetricInputError):
            build_report(transcript, _assessment([], submission_id="sub-b"), 20)

    def test_starter_prompt_uses(self):
        transcript = make_transcript(["  Explain it simply ", "why?", "explain IT simply"])
        report = build_report(transcript, _assessment([]), 5, ["Explain it simply"])
        assert report.starter_prompt_uses == 2

    @given(case=assessed_transcripts())
    @settings(max_examples=100)
    def test_matches_brute_force(self, case):
        transcript, assessment, total, lengths = case
        words = {2 * k: n for k, n in enumerate(lengths)}
        engaged = [e for e in assessment.entries.values() if e.depth > 0]

        assert topic_coverage(assessment, total) == pytest.approx(len(engaged) / total)

        if engaged:
            expected_depth = sum(e.depth for e in engaged) / len(engaged)
            assert avg_topic_depth(assessment) == pytest.approx(expected_depth)
        else:
            with pytest.raises(UndefinedMetricError):
                avg_topic_depth(assessment)

        means = []
        for entry in engaged:
            counts = [words[i] for i in entry.attributed_student_turns]
            if counts:
                means.append(sum(counts) / len(counts))
        if means:
            expected_length = sum(means) / len(means)
            assert avg_turn_length_per_topic(transcript, assessment) == pytest.approx(expected_length)
        else:
            with pytest.raises(UndefinedMetricError):
                avg_turn_length_per_topic(transcript, assessment)


class TestAggregation:
    def test_summarize_odd(self):
        summary = summarize([3.0, 1.0, 2.0])
        assert (summary.n, summary.median, summary.minimum, summary.maximum) == (3, 2.0, 1.0, 3.0)

    def test_summarize_even_median_is_midpoint(self):
        summary = summarize([4.0, 1.0, 3.0, 2.0])
        assert summary.median == 2.5
        assert summary.q1 == pytest.approx(1.75)
        assert summary.q3 == pytest.approx(3.25)

    def test_summarize_nothing(self):
        assert summarize([]) is None

    def test_medians(self):
        agg = aggregate_class(week_reports("w1", (0.525, 1.33, 48.2), total=20))
        assert agg.n_students == 5
        assert agg.median_coverage == pytest.approx(0.525)
        assert agg.median_avg_depth == pytest.approx(1.33)
        assert agg.median_avg_turn_length == pytest.approx(48.2)
        assert agg.latest_submitted_at == 1756800004

    def test_undefined_metrics_are_left_out(self):
        reports = [
            make_report("w1", 0.0, None, None, submission_id="a"),
            make_report("w1", 0.5, 2.0, 10.0, submission_id="b"),
            make_report("w1", 0.25, 1.0, 6.0, submission_id="c"),
        ]
        agg = aggregate_class(reports)
        assert agg.coverage.n == 3
        assert agg.avg_depth.n == 2
        assert agg.median_avg_depth == 1.5

    def test_all_undefined(self):
        agg = aggregate_class([make_report("w1", 0.0, None, None)])
        assert agg.avg_depth is None
        assert agg.median_avg_turn_length is None

    def test_empty(self):
        with pytest.raises(EmptyAggregateError):
            aggregate_class([])

    def test_mixed_weeks(self):
        with pytest.raises(WeekMismatchError):
            aggregate_class([make_report("w1", 0.1, 1, 5), make_report("w2", 0.1, 1, 5)])


class TestCompareWeeks:
    def test_signed_changes(self):
        week1 = aggregate_class(week_reports("w1", (0.525, 1.33, 48.2), total=20))
        week2 = aggregate_class(week_reports("w2", (0.31, 2.06, 54.4), total=21))
        comparison = compare_weeks(week1, week2)
        assert (comparison.week_a, comparison.week_b) == ("w1", "w2")
        assert signed_percent(comparison.pct_change_coverage) == "−41%"
        assert signed_percent(comparison.pct_change_depth) == "+55%"
        assert signed_percent(comparison.pct_change_turn_length) == "+13%"

    def test_reverse_direction(self):
        week1 = aggregate_class(week_reports("w1", (0.4, 1.0, 20.0), total=20))
        week2 = aggregate_class(week_reports("w2", (0.5, 1.5, 10.0), total=20))
        comparison = compare_weeks(week2, week1)
        assert comparison.pct_change_coverage == pytest.approx(-20.0)
        assert comparison.pct_change_turn_length == pytest.approx(100.0)

    def test_zero_baseline(self):
        before = aggregate_class([make_report("w1", 0.0, None, None)])
        after = aggregate_class([make_report("w2", 0.3, 2.0, 10.0)])
        with pytest.raises(ZeroBaselineError) as exc:
            compare_weeks(before, after)
        assert exc.value.data["metric"] == "coverage"

    def test_undefined_after(self):
        before = aggregate_class([make_report("w1", 0.3, 2.0, 10.0)])
        after = aggregate_class([make_report("w2", 0.3, None, None)])
        with pytest.raises(UndefinedMetricError):
            compare_weeks(before, after)


class TestFormatting:
    @pytest.mark.parametrize(
        "change, text",
        [(-40.95, "−41%"), (54.89, "+55%"), (12.5, "+13%"), (-0.4, "0%"), (None, "—")],
    )
    def test_signed_percent(self, change, text):
        assert signed_percent(change) == text

    def test_halves_round_away_from_zero(self):
        assert percent(0.125) == "13%"
        assert decimal2(2.0625) == "2.06"
        assert decimal2(2.005) == "2.01"


@st.composite
def week_of_reports(draw):
    """
    1-9 reports of one week; depth and turn length are undefined together with
    an empty engagement.
    """
    reports = []
    for i in range(draw(st.integers(min_value=1, max_value=9))):
        engaged = draw(st.integers(min_value=0, max_value=20))
        depth = draw(st.floats(min_value=1, max_value=3)) if engaged else None
        words = draw(st.floats(min_value=1, max_value=80)) if engaged else None
        reports.append(make_report("w1", engaged / 20, depth, words, submission_id=f"sub-{i}"))
    return reports


def _medians(agg):
    return agg.median_coverage, agg.median_avg_depth, agg.median_avg_turn_length


class TestAggregationProperties:
    def test_even_count_median(self):
        summary = summarize([1.0, 2.0, 2.12, 3.0])
        assert summary.median == pytest.approx(2.06)
        assert decimal2(summary.median) == "2.06"

    @given(reports=week_of_reports(), data=st.data())
    @settings(max_examples=100, deadline=None)
    def test_order_does_not_matter(self, reports, data):
        shuffled = data.draw(st.permutations(reports))
        assert _medians(aggregate_class(shuffled)) == pytest.approx(_medians(aggregate_class(reports)))

    @given(reports=week_of_reports(), copies=st.integers(min_value=2, max_value=4))
    @settings(max_examples=100, deadline=None)
    def test_duplicating_every_report_keeps_the_medians(self, reports, copies):
        repeated = [r for r in reports for _ in range(copies)]
        assert _medians(aggregate_class(repeated)) == pytest.approx(_medians(aggregate_class(reports)))


class TestCompareWeeksProperties:
    @given(reports=week_of_reports())
    @settings(max_examples=100, deadline=None)
    def test_week_against_itself(self, reports):
        agg = aggregate_class(reports)
        assume(all(m for m in _medians(agg)))
        comparison = compare_weeks(agg, agg)
        assert comparison.pct_change_coverage == 0
        assert comparison.pct_change_depth == 0
        assert comparison.pct_change_turn_length == 0

    @given(
        before=st.tuples(
            st.floats(min_value=0.05, max_value=1), st.floats(min_value=1, max_value=3), st.floats(min_value=1, max_value=80)
        ),
        after=st.tuples(
            st.floats(min_value=0.05, max_value=1), st.floats(min_value=1, max_value=3), st.floats(min_value=1, max_value=80)
        ),
    )
    @settings(max_examples=200, deadline=None)
    def test_sign_follows_the_difference(self, before, after):
        agg_a = aggregate_class([make_report("w1", *before)])
        agg_b = aggregate_class([make_report("w2", *after)])
        comparison = compare_weeks(agg_a, agg_b)
        changes = (
            comparison.pct_change_coverage,
            comparison.pct_change_depth,
            comparison.pct_change_turn_length,
        )
        for change, a, b in zip(changes, before, after):
            assert (change > 0) == (b > a)
            assert (change < 0) == (b < a)
