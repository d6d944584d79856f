"""
Synthetic transcripts as an oracle: whatever engagement is planted, the
heuristic evaluator and the metrics must recover it.
"""
import pytest
from hypothesis import given, settings, strategies as st

from conftest import DATA_DIR
from errors import InfeasibleSpecError
from models.synth import SynthSpec
from services.evaluator import evaluate_heuristic
from services.synth import generate_transcript, recovery_check
from services.transcript import student_turns

TOTAL_W1 = 20

histogram_st = st.fixed_dictionaries(
    {
        1: st.integers(min_value=0, max_value=7),
        2: st.integers(min_value=0, max_value=7),
        3: st.integers(min_value=0, max_value=6),
    }
)
messages_st = st.fixed_dictionaries(
    {
        1: st.integers(min_value=1, max_value=3),
        2: st.integers(min_value=1, max_value=3),
        3: st.integers(min_value=1, max_value=3),
    }
)
words_st = st.fixed_dictionaries(
    {
        "mean": st.floats(min_value=3, max_value=40),
        "spread": st.floats(min_value=0, max_value=10),
    }
)


def _spec(seed, histogram, **extra) -> SynthSpec:
    return SynthSpec(
        seed=seed,
        week_id="w1",
        target_coverage=sum(histogram.values()) / TOTAL_W1,
        depth_histogram=histogram,
        **extra,
    )


class TestRecovery:
    @given(
        seed=st.integers(min_value=0, max_value=2**32),
        histogram=histogram_st,
        messages=messages_st,
        words=words_st,
    )
    @settings(max_examples=150, deadline=None)
    def test_planted_engagement_is_recovered(self, w1_subtopics, seed, histogram, messages, words):
        spec = _spec(
            seed,
            histogram,
            messages_per_engaged_subtopic=messages,
            words_per_message=words,
        )
        result = recovery_check(spec, w1_subtopics)

        assert result.exact, result.depth_mismatches
        assert result.coverage_delta == 0
        assert result.recovered.engaged_subtopics == sum(histogram.values())
        if result.depth_delta is not None:
            assert result.depth_delta == pytest.approx(0)
        if result.turn_length_delta is not None:
            assert result.turn_length_delta == pytest.approx(0)

    def test_example_spec_file(self, w1_subtopics):
        spec = SynthSpec.parse_file(DATA_DIR / "synth-w1.json")
        result = recovery_check(spec, w1_subtopics)
        assert result.exact
        assert result.recovered.topic_coverage == pytest.approx(0.5)
        assert result.recovered.avg_topic_depth == pytest.approx((4 * 1 + 3 * 2 + 3 * 3) / 10)

    def test_three_subtopics_one_per_depth(self, w1_subtopics):
        spec = SynthSpec(
            seed=1, week_id="w1", target_coverage=0.15, depth_histogram={1: 1, 2: 1, 3: 1}
        )
        sample = generate_transcript(spec, w1_subtopics)
        assert sample.planted.topic_coverage == pytest.approx(0.15)
        assert sample.planted.avg_topic_depth == pytest.approx(2.0)
        assert sorted(sample.planted_depths.values()) == [1, 2, 3]

    def test_nothing_engaged(self, w1_subtopics):
        spec = _spec(3, {1: 0, 2: 0, 3: 0})
        result = recovery_check(spec, w1_subtopics)
        assert result.exact
        assert result.recovered.avg_topic_depth is None
        assert result.depth_delta is None


class TestGenerateTranscript:
    def test_same_seed_same_transcript(self, w1_subtopics):
        spec = _spec(42, {1: 2, 2: 2, 3: 2})
        assert generate_transcript(spec, w1_subtopics) == generate_transcript(spec, w1_subtopics)

    def test_different_seeds_differ(self, w1_subtopics):
        first = generate_transcript(_spec(1, {1: 2, 2: 2, 3: 2}), w1_subtopics)
        second = generate_transcript(_spec(2, {1: 2, 2: 2, 3: 2}), w1_subtopics)
        assert first.transcript.turns != second.transcript.turns

    def test_opening_turn_is_unattributed(self, w1_subtopics):
        sample = generate_transcript(_spec(5, {1: 1, 2: 0, 3: 1}), w1_subtopics)
        assessment = evaluate_heuristic(sample.transcript, w1_subtopics)
        assert assessment.unattributed_student_turns == [0]
        assert len(student_turns(sample.transcript)) == 1 + 1 + 2

    def test_identity(self, w1_subtopics):
        sample = generate_transcript(_spec(9, {1: 1, 2: 0, 3: 0}), w1_subtopics)
        assert sample.transcript.submission_id == "synth-9"
        assert sample.transcript.week_id == "w1"


class TestInfeasibleSpecs:
    def test_more_engaged_than_subtopics(self, w1_subtopics):
        spec = SynthSpec(seed=0, week_id="w1", target_coverage=1.0, depth_histogram={1: 25})
        with pytest.raises(InfeasibleSpecError) as exc:
            generate_transcript(spec, w1_subtopics)
        assert exc.value.data == {"engaged": 25, "total": 20}

    def test_coverage_disagrees_with_histogram(self, w1_subtopics):
        spec = SynthSpec(seed=0, week_id="w1", target_coverage=0.5, depth_histogram={1: 3})
        with pytest.raises(InfeasibleSpecError) as exc:
            generate_transcript(spec, w1_subtopics)
        assert exc.value.data == {"expected": 10, "engaged": 3}

    def test_no_subtopics(self):
        spec = SynthSpec(seed=0, week_id="w1", target_coverage=0.0, depth_histogram={})
        with pytest.raises(InfeasibleSpecError):
            generate_transcript(spec, [])

    @pytest.mark.parametrize(
        "histogram, messages",
        [({4: 1}, None), ({1: -1}, None), ({1: 1}, {2: 0})],
    )
    def test_invalid_spec(self, histogram, messages):
        extra = {} if messages is None else {"messages_per_engaged_subtopic": messages}
        with pytest.raises(ValueError):
            SynthSpec(seed=0, week_id="w1", target_coverage=0.05, depth_histogram=histogram, **extra)
