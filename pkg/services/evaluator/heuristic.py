"""
Deterministic lexical evaluator.

Each student turn is attributed to the subtopic with the most keyword hits;
turns without hits continue the previous attribution. Attributed turns are
then rated on the four-level depth rubric:

0 - briefly mentioned
1 - basic question asked
2 - explored with follow-ups or comparisons
3 - examined in depth through reasoning or clarification
"""
import logging
import re
from typing import Dict, List, Optional

from config import RubricSettings, get_rubric
from errors import WeekMismatchError
from models.assessment import AssessmentSet, Backend, SubtopicAssessment
from models.curriculum import Subtopic
from models.transcript import Transcript, Turn
from services.evaluator.lexical import has_marker, keyword_hits, tokenize
from services.transcript import student_turns

logger = logging.getLogger(__name__)

EVIDENCE_WORDS = 12
_EVIDENCE_RE = re.compile(r"\S+(?:\s+\S+){0,%d}" % (EVIDENCE_WORDS - 1))


def attribute_turn(
    turn: Turn, subtopics: List[Subtopic], previous: Optional[str] = None
) -> Optional[str]:
    """
    Attribute a student turn to a subtopic.

    :param turn: student turn
    :type turn: Turn
    :param subtopics: subtopics of the week
    :type subtopics: list[Subtopic]
    :param previous: attribution of the nearest preceding attributed student turn
    :type previous: str | None
    :return: subtopic with the most keyword hits (ties to the smallest id),
        ``previous`` when nothing hits
    :rtype: str | None
    """
    tokens = tokenize(turn.text)
    best_id, best_hits = None, 0
    for subtopic in subtopics:
        hits = keyword_hits(tokens, subtopic)
        if hits > best_hits or (
            hits == best_hits and hits > 0 and subtopic.subtopic_id < best_id
        ):
            best_id, best_hits = subtopic.subtopic_id, hits
    if best_id is None:
        return previous
    return best_id


def _is_substantive(turn: Turn, subtopic: Subtopic) -> bool:
    return "?" in turn.text or keyword_hits(tokenize(turn.text), subtopic) > 0


def rate_depth(
    attributed_turns: List[Turn],
    subtopic: Subtopic,
    rubric: Optional[RubricSettings] = None,
) -> int:
    """
    Rate how deeply a subtopic was explored on the 0..3 rubric.

    :param attributed_turns: student turns attributed to the subtopic, in order
    :type attributed_turns: list[Turn]
    :param subtopic: rated subtopic
    :type subtopic: Subtopic
    :param rubric: rubric constants, defaults to the configured ones
    :type rubric: RubricSettings
    :return: ordinal depth
    :rtype: int
    """
    rubric = rubric or get_rubric()
    substantive = [t for t in attributed_turns if _is_substantive(t, subtopic)]
    if not substantive:
        words = sum(t.word_count for t in attributed_turns)
        return 0 if words < rubric.mentioned_words else 1

    token_lists = [tokenize(t.text) for t in attributed_turns]
    compared = any(has_marker(tokens, rubric.comparison_markers) for tokens in token_lists)
    if len(substantive) < 2 and not compared:
        return 1

    reasoned = any(
        has_marker(tokens, rubric.reasoning_markers) for tokens in token_lists
    ) or any(t.word_count >= rubric.long_turn_words for t in substantive)
    return 3 if reasoned else 2


def _evidence(turns: List[Turn], subtopic: Subtopic) -> List[str]:
    for turn in turns:
        if keyword_hits(tokenize(turn.text), subtopic):
            return [_EVIDENCE_RE.match(turn.text).group(0)]
    return []


def evaluate_heuristic(
    transcript: Transcript,
    subtopics: List[Subtopic],
    *,
    week_id: Optional[str] = None,
    rubric: Optional[RubricSettings] = None,
) -> AssessmentSet:
    """
    Assess a transcript against the week's subtopics with the lexical rubric.

    Pure function of its inputs: entries follow the subtopics' declaration order.

    :raises WeekMismatchError: ``week_id`` is given and differs from the transcript's
    """
    if week_id is not None and week_id != transcript.week_id:
        raise WeekMismatchError(
            f"Transcript is for week {transcript.week_id!r}, subtopics for {week_id!r}",
            data={"transcript_week": transcript.week_id, "week_id": week_id},
        )

    groups: Dict[str, List[Turn]] = {}
    unattributed: List[int] = []
    previous = None
    for turn in student_turns(transcript):
        subtopic_id = attribute_turn(turn, subtopics, previous=previous)
        if subtopic_id is None:
            unattributed.append(turn.index)
            continue
        groups.setdefault(subtopic_id, []).append(turn)
        previous = subtopic_id

    entries = {}
    for subtopic in subtopics:
        turns = groups.get(subtopic.subtopic_id)
        if not turns:
            continue
        entries[subtopic.subtopic_id] = SubtopicAssessment(
            subtopic_id=subtopic.subtopic_id,
            depth=rate_depth(turns, subtopic, rubric),
            attributed_student_turns=[t.index for t in turns],
            evidence=_evidence(turns, subtopic),
        )
    logger.debug(
        "Heuristic assessment of %s: %d entries, %d unattributed turns",
        transcript.submission_id,
        len(entries),
        len(unattributed),
    )
    return AssessmentSet(
        week_id=transcript.week_id,
        submission_id=transcript.submission_id,
        entries=entries,
        unattributed_student_turns=unattributed,
        backend=Backend.heuristic,
    )
