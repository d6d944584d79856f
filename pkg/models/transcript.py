"""
This module contains data models of student-agent chat transcripts.
"""
import re
from enum import Enum
from typing import List

from pydantic import BaseModel, validator

from models.curriculum import FrozenModel

PSEUDONYM_RE = re.compile(r"^[A-Za-z0-9._-]+$")


class Role(str, Enum):
    """
    Enum class represents the speaker of a turn.
    """

    student = "student"
    agent = "agent"


class TranscriptFormat(str, Enum):
    """
    Enum class represents supported transcript upload formats.

    canonical_jsonl - one ``{"index", "role", "text"}`` object per line
    plain_text - ``Student:`` / ``Agent:`` prefixed lines with continuations
    """

    canonical_jsonl = "canonical_jsonl"
    plain_text = "plain_text"


def check_pseudonym(value: str) -> str:
    if not PSEUDONYM_RE.match(value):
        raise ValueError(
            "student_pseudonym must be an opaque identifier "
            "(letters, digits, '.', '_' or '-'; no e-mail addresses or names)"
        )
    return value


class SubmissionMeta(BaseModel):
    """
    Model of the metadata sidecar that accompanies an uploaded transcript.

    :param submitted_at: submission time in UTC seconds
    :type submitted_at: int
    """

    submission_id: str
    student_pseudonym: str
    week_id: str
    submitted_at: int = 0

    _pseudonym = validator("student_pseudonym", allow_reuse=True)(check_pseudonym)

    @validator("submission_id", "week_id")
    def _not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("must not be blank")
        return value


class Turn(FrozenModel):
    """
    Model that represents one message of a conversation.

    :param index: position in the normalized transcript, contiguous from 0
    :type index: int
    :param word_count: number of whitespace separated words of ``text``
    :type word_count: int
    """

    index: int
    role: Role
    text: str
    word_count: int


class Transcript(FrozenModel):
    """
    Model that represents one normalized student-week chat session.
    """

    submission_id: str
    student_pseudonym: str
    week_id: str
    submitted_at: int
    turns: List[Turn]

    _pseudonym = validator("student_pseudonym", allow_reuse=True)(check_pseudonym)
