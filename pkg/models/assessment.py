"""
This module contains data models of transcript assessments produced by the
evaluator backends.
"""
from enum import Enum
from typing import Dict, List

from pydantic import BaseModel, Field

from models.curriculum import FrozenModel

ASSESSMENT_SCHEMA_VERSION = "assessment/v1"
MAX_DEPTH = 3


class Backend(str, Enum):
    """
    Enum class represents evaluator backends.

    heuristic - deterministic lexical evaluator
    remote - chat-completion endpoint constrained by the assessment/v1 schema
    """

    heuristic = "heuristic"
    remote = "remote"


class SubtopicAssessment(FrozenModel):
    """
    Model that represents one subtopic's rating within an assessment.

    :param depth: ordinal depth, 0 briefly mentioned .. 3 examined in depth
    :type depth: int
    :param attributed_student_turns: indices of student turns about this subtopic
    :type attributed_student_turns: list[int]
    :param evidence: short verbatim quotes from the transcript
    :type evidence: list[str]
    """

    subtopic_id: str
    depth: int = Field(..., ge=0, le=MAX_DEPTH)
    attributed_student_turns: List[int] = Field(default_factory=list)
    evidence: List[str] = Field(default_factory=list)


class AssessmentSet(FrozenModel):
    """
    Model that represents the structured assessment of one transcript.

    Subtopics absent from ``entries`` were not engaged at all. Attributed and
    unattributed student turn indices partition the transcript's student turns.
    """

    week_id: str
    submission_id: str
    entries: Dict[str, SubtopicAssessment] = Field(default_factory=dict)
    unattributed_student_turns: List[int] = Field(default_factory=list)
    backend: Backend


class RemoteBackendConfig(BaseModel):
    """
    Model that contains connection parameters of the remote evaluator.

    :param auth_token_env_var: name of the environment variable holding the token
    :type auth_token_env_var: str
    :param max_in_flight: bound on concurrent requests of one evaluator instance
    :type max_in_flight: int
    """

    endpoint_url: str
    model_name: str
    auth_token_env_var: str
    max_retries: int = Field(2, ge=0)
    timeout: float = Field(30.0, gt=0)
    max_in_flight: int = Field(4, ge=1)
    retry_backoff: float = Field(0.5, ge=0)
