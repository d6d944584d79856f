"""
This module contains models of synthetic transcript generation.
"""
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, validator

from models.report import EngagementReport
from models.transcript import Transcript

DEPTHS = (1, 2, 3)


class WordsPerMessage(BaseModel):
    mean: float = Field(12.0, gt=0)
    spread: float = Field(4.0, ge=0)


class SynthSpec(BaseModel):
    """
    Planted engagement parameters of a synthetic transcript.

    :param target_coverage: fraction of the week's subtopics to engage; times the
        subtopic count it must round to the total of ``depth_histogram``
    :type target_coverage: float
    :param depth_histogram: number of engaged subtopics per depth 1..3
    :type depth_histogram: dict[int, int]
    :param messages_per_engaged_subtopic: student messages per engaged subtopic, by depth
    :type messages_per_engaged_subtopic: dict[int, int]
    """

    seed: int
    week_id: str
    target_coverage: float = Field(..., ge=0, le=1)
    depth_histogram: Dict[int, int]
    words_per_message: WordsPerMessage = Field(default_factory=WordsPerMessage)
    messages_per_engaged_subtopic: Dict[int, int] = Field(
        default_factory=lambda: {1: 1, 2: 2, 3: 2}
    )

    @validator("depth_histogram")
    def _histogram(cls, value: Dict[int, int]) -> Dict[int, int]:
        if set(value) - set(DEPTHS):
            raise ValueError("depth_histogram keys must be depths 1, 2 or 3")
        if any(count < 0 for count in value.values()):
            raise ValueError("depth_histogram counts must be non-negative")
        return {depth: value.get(depth, 0) for depth in DEPTHS}

    @validator("messages_per_engaged_subtopic")
    def _messages(cls, value: Dict[int, int]) -> Dict[int, int]:
        if set(value) - set(DEPTHS):
            raise ValueError("messages_per_engaged_subtopic keys must be depths 1, 2 or 3")
        merged = {1: 1, 2: 2, 3: 2, **value}
        if any(count < 1 for count in merged.values()):
            raise ValueError("every engaged subtopic needs at least one message")
        return merged

    @property
    def engaged_count(self) -> int:
        return sum(self.depth_histogram.values())


class SyntheticSample(BaseModel):
    """
    A generated transcript and the report planted into it.

    :param planted_depths: depth planted per engaged subtopic id
    :type planted_depths: dict[str, int]
    """

    transcript: Transcript
    planted: EngagementReport
    planted_depths: Dict[str, int]


class RecoveryResult(BaseModel):
    """
    Planted versus recovered metrics of one synthetic transcript.
    """

    seed: int
    planted: EngagementReport
    recovered: EngagementReport
    coverage_delta: float
    depth_delta: Optional[float]
    turn_length_delta: Optional[float]
    depth_mismatches: List[str] = Field(default_factory=list)

    @property
    def exact(self) -> bool:
        return (
            self.coverage_delta == 0
            and not self.depth_mismatches
            and (self.turn_length_delta is None or abs(self.turn_length_delta) <= 1)
        )
