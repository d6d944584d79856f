"""
This module contains data models of the course knowledge model:
curriculum, modules, weeks and subtopics.
"""
from enum import Enum
from typing import List, Optional

from pydantic import BaseModel, Field


class BloomLevel(str, Enum):
    """
    Enum class represents Bloom's taxonomy levels ordered by cognitive complexity.
    """

    remember = "Remember"
    understand = "Understand"
    apply = "Apply"
    analyze = "Analyze"
    evaluate = "Evaluate"
    create = "Create"


class FrozenModel(BaseModel):
    """
    Base of immutable domain values. Safe to share across threads.
    """

    class Config:
        allow_mutation = False
        extra = "forbid"


class Subtopic(FrozenModel):
    """
    Model that represents one canonical subtopic of a week.

    :param subtopic_id: id unique within the week
    :type subtopic_id: str
    :param keywords: lowercase keywords used by the lexical evaluator
    :type keywords: list[str]
    :param bloom_level: expected cognitive level of the learning outcome
    :type bloom_level: BloomLevel
    :param tutorial_only: subtopic is covered in the hands-on tutorial
    :type tutorial_only: bool
    """

    subtopic_id: str
    title: str
    keywords: List[str]
    learning_outcome: str
    bloom_level: BloomLevel
    tutorial_only: bool = False


class WeekSpec(FrozenModel):
    """
    Model that represents one weekly topic with its subtopics and starter prompts.
    """

    week_id: str
    topic_title: str
    subtopics: List[Subtopic]
    starter_prompts: List[str] = Field(default_factory=list)
    prev_week_id: Optional[str] = None
    next_week_id: Optional[str] = None


class ModuleSpec(FrozenModel):
    """
    Model that represents a course module spanning one to four weeks.

    :param evaluation_prompt: module-specific rubric prompt for the remote evaluator
    :type evaluation_prompt: str | None
    """

    module_id: str
    title: str
    weeks: List[WeekSpec]
    evaluation_prompt: Optional[str] = None


class Curriculum(FrozenModel):
    """
    Model that represents the whole semester curriculum.
    """

    course_id: str
    title: str
    modules: List[ModuleSpec]


class Violation(BaseModel):
    """
    One invariant violation found in a curriculum.

    :param path: dotted path of the offending value, e.g. ``modules[0].weeks[1]``
    :type path: str
    """

    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


class ValidationReport(BaseModel):
    violations: List[Violation] = Field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations
