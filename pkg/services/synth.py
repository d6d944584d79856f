"""
Synthetic transcripts with planted engagement, used as an oracle for the
heuristic evaluator and the metrics.

The generator writes turns that satisfy the lexical depth rubric by
construction: every engaged subtopic is addressed through a keyword that no
other subtopic's keyword matches, and filler words share no token with any
keyword or rubric marker. It makes no claim of realistic student behavior.
"""
import logging
import random
from typing import Dict, List, Optional, Sequence, Tuple

from config import RubricSettings, get_rubric
from errors import InfeasibleSpecError
from models.curriculum import Subtopic
from models.report import EngagementReport, SubtopicStats
from models.synth import RecoveryResult, SynthSpec, SyntheticSample
from models.transcript import Role, Transcript, Turn
from services.evaluator.heuristic import evaluate_heuristic
from services.evaluator.lexical import has_marker, keyword_hits, tokenize
from services.formatting import round_half_up
from services.metrics import build_report

logger = logging.getLogger(__name__)

FILLER_WORDS = (
    "apple", "basket", "candle", "dolphin", "ember", "feather", "garden", "harbor",
    "island", "jacket", "kettle", "lantern", "meadow", "nutmeg", "orchard", "pebble",
    "quartz", "ribbon", "saddle", "tulip", "umbrella", "velvet", "walnut", "yarrow",
    "zephyr", "acorn", "blossom", "cobble", "dune", "fable", "glimmer", "hazel",
)
MIN_FILLERS = 8
GREETING_WORDS = 4
AGENT_REPLY = "Thanks, let us continue with that."


def _filler_pool(subtopics: Sequence[Subtopic], rubric: RubricSettings) -> List[str]:
    taken = {tok for s in subtopics for k in s.keywords for tok in tokenize(k)}
    taken |= {
        tok
        for marker in [*rubric.comparison_markers, *rubric.reasoning_markers]
        for tok in tokenize(marker)
    }
    pool = [w for w in FILLER_WORDS if w not in taken]
    if len(pool) < MIN_FILLERS:
        raise InfeasibleSpecError("Keywords leave too few neutral filler words")
    return pool


def _distinguishing_keyword(
    subtopic: Subtopic, subtopics: Sequence[Subtopic], rubric: RubricSettings
) -> Optional[str]:
    markers = [*rubric.comparison_markers, *rubric.reasoning_markers]
    for keyword in subtopic.keywords:
        tokens = tokenize(keyword)
        if not tokens or has_marker(tokens, markers):
            continue
        if any(
            keyword_hits(tokens, other)
            for other in subtopics
            if other.subtopic_id != subtopic.subtopic_id
        ):
            continue
        return keyword
    return None


class _Writer:
    """
    Seeded builder of one transcript's turns.
    """

    def __init__(self, spec: SynthSpec, fillers: List[str]):
        self.rng = random.Random(spec.seed)
        self.spec = spec
        self.fillers = fillers
        self.turns: List[Turn] = []

    def length(self, minimum: int, maximum: Optional[int] = None) -> int:
        words = self.spec.words_per_message
        n = round(words.mean + self.rng.uniform(-words.spread, words.spread))
        n = max(n, minimum, 1)
        if maximum is not None:
            if minimum > maximum:
                raise InfeasibleSpecError(
                    f"A turn needs {minimum} words but may have at most {maximum}"
                )
            n = min(n, maximum)
        return n

    def filler(self, n: int) -> List[str]:
        return [self.rng.choice(self.fillers) for _ in range(n)]

    def add(self, role: Role, text: str) -> Turn:
        turn = Turn(index=len(self.turns), role=role, text=text, word_count=len(text.split()))
        self.turns.append(turn)
        return turn

    def question(self, keyword: str, markers: List[str], maximum: Optional[int]) -> Turn:
        fixed = [w for m in markers for w in m.split()] + keyword.split()
        n = self.length(len(fixed), maximum)
        words = fixed + self.filler(n - len(fixed))
        words[-1] += "?"
        turn = self.add(Role.student, " ".join(words))
        self.add(Role.agent, AGENT_REPLY)
        return turn

    def continuation(self) -> Turn:
        turn = self.add(Role.student, " ".join(self.filler(self.length(1))))
        self.add(Role.agent, AGENT_REPLY)
        return turn


def _plant(
    writer: _Writer, keyword: str, depth: int, messages: int, rubric: RubricSettings
) -> List[Turn]:
    compare = rubric.comparison_markers[0]
    reason = rubric.reasoning_markers[0]
    short = rubric.long_turn_words - 1
    if depth == 1:
        turns = [writer.question(keyword, [], None)]
        turns += [writer.continuation() for _ in range(messages - 1)]
        return turns
    if depth == 2:
        if messages == 1:
            return [writer.question(keyword, [compare], short)]
        return [writer.question(keyword, [], short) for _ in range(messages)]
    if messages == 1:
        return [writer.question(keyword, [compare, reason], None)]
    first = writer.question(keyword, [reason], None)
    return [first] + [writer.question(keyword, [], None) for _ in range(messages - 1)]


def _check(turns: List[Turn], subtopic: Subtopic, subtopics: Sequence[Subtopic]) -> None:
    for turn in turns:
        tokens = tokenize(turn.text)
        for other in subtopics:
            if other.subtopic_id != subtopic.subtopic_id and keyword_hits(tokens, other):
                raise InfeasibleSpecError(
                    f"Turn for {subtopic.subtopic_id!r} also matches {other.subtopic_id!r}",
                    data={"subtopic_id": subtopic.subtopic_id},
                )


def _planted_report(
    spec: SynthSpec,
    transcript: Transcript,
    total: int,
    plants: List[Tuple[str, int, List[Turn]]],
) -> EngagementReport:
    per_subtopic = {}
    means = []
    pooled = []
    for subtopic_id, depth, turns in plants:
        counts = [t.word_count for t in turns]
        mean = sum(counts) / len(counts)
        means.append(mean)
        pooled.extend(counts)
        per_subtopic[subtopic_id] = SubtopicStats(
            depth=depth, mean_student_words=mean, message_count=len(turns)
        )
    depths = [depth for _, depth, _ in plants]
    return EngagementReport(
        submission_id=transcript.submission_id,
        student_pseudonym=transcript.student_pseudonym,
        week_id=spec.week_id,
        submitted_at=transcript.submitted_at,
        total_subtopics=total,
        engaged_subtopics=len(plants),
        topic_coverage=len(plants) / total,
        avg_topic_depth=sum(depths) / len(depths) if depths else None,
        avg_turn_length_per_topic=sum(means) / len(means) if means else None,
        pooled_turn_length=sum(pooled) / len(pooled) if pooled else None,
        per_subtopic=per_subtopic,
    )


def generate_transcript(
    spec: SynthSpec,
    subtopics: List[Subtopic],
    rubric: Optional[RubricSettings] = None,
) -> SyntheticSample:
    """
    Generate a transcript whose heuristic assessment equals the plant.

    :param spec: planted parameters
    :type spec: SynthSpec
    :param subtopics: the week's canonical subtopics
    :type subtopics: list[Subtopic]
    :param rubric: rubric constants the plant must satisfy
    :type rubric: RubricSettings
    :return: transcript plus the ground-truth report computed from the plant
    :rtype: SyntheticSample
    :raises InfeasibleSpecError: ``spec`` cannot be realized on these subtopics
    """
    rubric = rubric or get_rubric()
    total = len(subtopics)
    engaged = spec.engaged_count
    if total == 0:
        raise InfeasibleSpecError("Week has no subtopics")
    if engaged > total:
        raise InfeasibleSpecError(
            f"depth_histogram totals {engaged} but the week has {total} subtopics",
            data={"engaged": engaged, "total": total},
        )
    expected = int(round_half_up(spec.target_coverage * total))
    if expected != engaged:
        raise InfeasibleSpecError(
            f"target_coverage {spec.target_coverage} of {total} subtopics means "
            f"{expected} engaged, depth_histogram has {engaged}",
            data={"expected": expected, "engaged": engaged},
        )

    fillers = _filler_pool(subtopics, rubric)
    keywords: Dict[str, str] = {}
    for subtopic in subtopics:
        keyword = _distinguishing_keyword(subtopic, subtopics, rubric)
        if keyword is not None:
            keywords[subtopic.subtopic_id] = keyword
    eligible = [s for s in subtopics if s.subtopic_id in keywords]
    if len(eligible) < engaged:
        raise InfeasibleSpecError(
            f"Only {len(eligible)} subtopics have a distinguishing keyword, {engaged} needed"
        )

    writer = _Writer(spec, fillers)
    chosen = writer.rng.sample(eligible, engaged)
    depths = [d for d, count in spec.depth_histogram.items() for _ in range(count)]
    writer.rng.shuffle(depths)

    writer.add(Role.student, " ".join(writer.filler(GREETING_WORDS)))
    writer.add(Role.agent, "Welcome! Which topic would you like to start with?")
    plants = []
    for subtopic, depth in zip(chosen, depths):
        turns = _plant(
            writer,
            keywords[subtopic.subtopic_id],
            depth,
            spec.messages_per_engaged_subtopic[depth],
            rubric,
        )
        _check(turns, subtopic, subtopics)
        plants.append((subtopic.subtopic_id, depth, turns))

    transcript = Transcript(
        submission_id=f"synth-{spec.seed}",
        student_pseudonym=f"synth-{spec.seed}",
        week_id=spec.week_id,
        submitted_at=0,
        turns=writer.turns,
    )
    order = {s.subtopic_id: i for i, s in enumerate(subtopics)}
    plants.sort(key=lambda plant: order[plant[0]])
    return SyntheticSample(
        transcript=transcript,
        planted=_planted_report(spec, transcript, total, plants),
        planted_depths={subtopic_id: depth for subtopic_id, depth, _ in plants},
    )


def _delta(planted: Optional[float], recovered: Optional[float]) -> Optional[float]:
    if planted is None or recovered is None:
        return None
    return recovered - planted


def recovery_check(
    spec: SynthSpec,
    subtopics: List[Subtopic],
    rubric: Optional[RubricSettings] = None,
) -> RecoveryResult:
    """
    Generate a transcript, assess it heuristically and compare the recovered
    metrics with the plant.
    """
    rubric = rubric or get_rubric()
    sample = generate_transcript(spec, subtopics, rubric)
    assessment = evaluate_heuristic(sample.transcript, subtopics, rubric=rubric)
    recovered = build_report(sample.transcript, assessment, len(subtopics))
    recovered_depths = {sid: stats.depth for sid, stats in recovered.per_subtopic.items()}
    mismatches = sorted(
        sid
        for sid in set(sample.planted_depths) | set(recovered_depths)
        if sample.planted_depths.get(sid) != recovered_depths.get(sid)
    )
    result = RecoveryResult(
        seed=spec.seed,
        planted=sample.planted,
        recovered=recovered,
        coverage_delta=recovered.topic_coverage - sample.planted.topic_coverage,
        depth_delta=_delta(sample.planted.avg_topic_depth, recovered.avg_topic_depth),
        turn_length_delta=_delta(
            sample.planted.avg_turn_length_per_topic, recovered.avg_turn_length_per_topic
        ),
        depth_mismatches=mismatches,
    )
    if not result.exact:
        logger.warning("Recovery of seed %d is not exact: %s", spec.seed, mismatches)
    return result
