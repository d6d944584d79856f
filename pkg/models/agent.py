"""
This module contains the data model of a weekly instructor-agent configuration.
"""
from typing import List

from pydantic import validator

from models.curriculum import FrozenModel

SECTION_PERSONA = "[PERSONA]"
SECTION_PEDAGOGY = "[PEDAGOGY]"
SECTION_KNOWLEDGE = "[KNOWLEDGE-BASE]"
SECTION_STARTERS = "[STARTER-PROMPTS]"
SECTIONS = (SECTION_PERSONA, SECTION_PEDAGOGY, SECTION_KNOWLEDGE, SECTION_STARTERS)


class AgentConfig(FrozenModel):
    """
    Model that represents the prompt configuration of one week's agent.

    :param assembled: the three layers in order persona, pedagogy, knowledge,
        each under its labeled section header
    :type assembled: str
    """

    week_id: str
    persona_layer: str
    pedagogy_layer: str
    knowledge_layer: str
    starter_prompts: List[str]
    assembled: str

    @validator("starter_prompts")
    def _not_empty(cls, value):
        if not value:
            raise ValueError("starter_prompts must not be empty")
        return value
