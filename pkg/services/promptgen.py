"""
Assembly of the weekly instructor-agent prompt configuration.

An agent is configured from three layers: a persona with guardrails, a
pedagogy block and a knowledge base listing the week's subtopics. The
assembled document is plain text with labeled section headers so that it can
be reviewed, diffed and pasted into any agent platform.
"""
import logging
from typing import List, Optional

from errors import MissingPlaceholderError, TemplateError
from models.agent import (
    SECTION_KNOWLEDGE,
    SECTION_PEDAGOGY,
    SECTION_PERSONA,
    SECTION_STARTERS,
    SECTIONS,
    AgentConfig,
)
from models.curriculum import Curriculum, Subtopic
from services.curriculum import find_week

logger = logging.getLogger(__name__)

COURSE_TITLE_PLACEHOLDER = "{course_title}"

SCOPE_GUARDRAIL = "not deviate from the goals of instructional support"
ACCURACY_GUARDRAIL = "prioritizing truth and facts over agreement with the student"
GUARDRAIL_CLAUSES = (SCOPE_GUARDRAIL, ACCURACY_GUARDRAIL)

GENERIC_STARTER_PROMPTS = (
    "List topics for this week and my progress",
    "Give a quiz on the topics we have discussed",
)

# Reconstructed defaults: only the guardrail clauses are fixed wording.
DEFAULT_PERSONA_TEMPLATE = f"""You are the instructor agent of the course {COURSE_TITLE_PLACEHOLDER}.
During the lecture you are the students' primary tutor for this week's topics.
Address one student at a time, keep a friendly and professional tone and
adapt your explanations to what the student already knows.

Guardrails:
- Stay on the course material and do {SCOPE_GUARDRAIL}.
- Answer accurately, {ACCURACY_GUARDRAIL}; correct misconceptions politely.
- Do not complete graded work on the student's behalf."""

DEFAULT_PEDAGOGY_TEMPLATE = """Follow the Knowledge-Learning-Instruction framework with inquiry-based,
scaffolded learning:
- Link every teaching action to the kind of knowledge it builds: declarative
  (facts and definitions), procedural (how to carry out a task) or conceptual
  (how ideas relate and why they work).
- Ground each explanation in practical examples and real-world use-cases.
- Ask guiding questions before giving full answers and raise the level of
  challenge step by step.
- Encourage students to reflect on what they learned and how it connects to
  earlier topics."""


def _check_sections(layer: str, name: str) -> None:
    for line in layer.splitlines():
        if line.strip() in SECTIONS:
            raise TemplateError(
                f"{name} layer must not contain the section header {line.strip()}",
                data={"layer": name},
            )


def build_persona_layer(course: Curriculum, template: str = DEFAULT_PERSONA_TEMPLATE) -> str:
    """
    Substitute the course title into the persona template and make sure both
    guardrail clauses are present.

    :raises TemplateError: template is empty
    :raises MissingPlaceholderError: template lacks ``{course_title}``
    """
    if not template or not template.strip():
        raise TemplateError("Persona template is empty")
    if COURSE_TITLE_PLACEHOLDER not in template:
        raise MissingPlaceholderError(
            f"Persona template lacks the {COURSE_TITLE_PLACEHOLDER} placeholder",
            data={"placeholder": COURSE_TITLE_PLACEHOLDER},
        )
    layer = template.replace(COURSE_TITLE_PLACEHOLDER, course.title)
    missing = [clause for clause in GUARDRAIL_CLAUSES if clause not in layer]
    if missing:
        logger.warning("Persona template lacks %d guardrail clause(s), appending", len(missing))
        layer = layer.rstrip() + "\n\nGuardrails:\n" + "\n".join(
            f"- Answer accurately, {clause}." if clause == ACCURACY_GUARDRAIL else f"- Do {clause}."
            for clause in missing
        )
    _check_sections(layer, "persona")
    return layer


def build_pedagogy_layer(template: str = DEFAULT_PEDAGOGY_TEMPLATE) -> str:
    """
    Return the pedagogy block. A custom template is returned verbatim.

    :raises TemplateError: template is empty or whitespace only
    """
    if not template or not template.strip():
        raise TemplateError("Pedagogy template is empty")
    _check_sections(template, "pedagogy")
    return template


def _subtopic_line(position: int, subtopic: Subtopic) -> str:
    marker = " (covered in the tutorial)" if subtopic.tutorial_only else ""
    return (
        f"{position}. {subtopic.title} [Bloom: {subtopic.bloom_level.value}]{marker}\n"
        f"   Learning outcome: {subtopic.learning_outcome}\n"
        f"   Keywords: {', '.join(subtopic.keywords)}"
    )


def _adjacent(course: Curriculum, week_id: Optional[str], label: str) -> str:
    if week_id is None:
        return f"{label}: none"
    _, week = find_week(course, week_id)
    return f"{label}: {week.topic_title} ({week.week_id})"


def build_knowledge_layer(course: Curriculum, week_id: str) -> str:
    """
    List the week's subtopics with learning outcomes and Bloom levels, and name
    the adjacent weeks' topics.

    :raises UnknownWeekError: week is not in the curriculum
    """
    module, week = find_week(course, week_id)
    lines = [
        f"Week {week.week_id}: {week.topic_title}",
        f"Module: {module.title}",
        _adjacent(course, week.prev_week_id, "Previous topic"),
        _adjacent(course, week.next_week_id, "Next topic"),
        "Connect explanations to the previous topic and point ahead to the next "
        "one to keep curricular continuity.",
        "",
        "Subtopics of this week:",
    ]
    lines.extend(_subtopic_line(i, s) for i, s in enumerate(week.subtopics, start=1))
    layer = "\n".join(lines)
    _check_sections(layer, "knowledge")
    return layer


def _starter_prompts(week_prompts: List[str]) -> List[str]:
    """
    Week prompts as authored, then both generic prompts verbatim. Only exact
    repeats are dropped.
    """
    prompts: List[str] = []
    for prompt in [*week_prompts, *GENERIC_STARTER_PROMPTS]:
        if prompt.strip() and prompt not in prompts:
            prompts.append(prompt)
    return prompts


def _assemble(persona: str, pedagogy: str, knowledge: str) -> str:
    return (
        f"{SECTION_PERSONA}\n{persona}\n\n"
        f"{SECTION_PEDAGOGY}\n{pedagogy}\n\n"
        f"{SECTION_KNOWLEDGE}\n{knowledge}\n"
    )


def assemble_agent_config(
    course: Curriculum,
    week_id: str,
    persona_template: str = DEFAULT_PERSONA_TEMPLATE,
    pedagogy_template: str = DEFAULT_PEDAGOGY_TEMPLATE,
) -> AgentConfig:
    """
    Compose the agent configuration of one week.

    :param course: validated curriculum
    :type course: Curriculum
    :param week_id: week to configure
    :type week_id: str
    :param persona_template: persona template with a ``{course_title}`` placeholder
    :type persona_template: str
    :param pedagogy_template: pedagogy block
    :type pedagogy_template: str
    :return: agent configuration
    :rtype: AgentConfig
    """
    _, week = find_week(course, week_id)
    persona = build_persona_layer(course, persona_template)
    pedagogy = build_pedagogy_layer(pedagogy_template)
    knowledge = build_knowledge_layer(course, week_id)
    return AgentConfig(
        week_id=week.week_id,
        persona_layer=persona,
        pedagogy_layer=pedagogy,
        knowledge_layer=knowledge,
        starter_prompts=_starter_prompts(week.starter_prompts),
        assembled=_assemble(persona, pedagogy, knowledge),
    )


def serialize_agent_config(config: AgentConfig) -> str:
    """
    File form of an agent configuration: a ``# week:`` header line, the
    assembled layers and a starter prompt section with one ``- `` item per line.
    """
    starters = "\n".join(f"- {p}" for p in config.starter_prompts)
    return f"# week: {config.week_id}\n{config.assembled}\n{SECTION_STARTERS}\n{starters}\n"


def _between(text: str, header: str, next_header: Optional[str]) -> str:
    start = text.index(f"{header}\n") + len(header) + 1
    if next_header is None:
        return text[start:]
    # sections are separated by a blank line
    end = text.index(f"\n{next_header}\n", start - 1)
    return text[start : end - 1]


def parse_agent_config(text: str) -> AgentConfig:
    """
    Inverse of :func:`serialize_agent_config`.

    :raises TemplateError: the document is not an agent configuration
    """
    header, _, rest = text.partition("\n")
    if not header.startswith("# week: "):
        raise TemplateError("Agent config lacks the '# week:' header line")
    try:
        persona = _between(rest, SECTION_PERSONA, SECTION_PEDAGOGY)
        pedagogy = _between(rest, SECTION_PEDAGOGY, SECTION_KNOWLEDGE)
        knowledge = _between(rest, SECTION_KNOWLEDGE, SECTION_STARTERS)
        starters = _between(rest, SECTION_STARTERS, None)
    except ValueError as exc:
        raise TemplateError("Agent config lacks a section header") from exc
    return AgentConfig(
        week_id=header[len("# week: "):],
        persona_layer=persona,
        pedagogy_layer=pedagogy,
        knowledge_layer=knowledge,
        starter_prompts=[
            line[2:] for line in starters.splitlines() if line.startswith("- ")
        ],
        assembled=_assemble(persona, pedagogy, knowledge),
    )
