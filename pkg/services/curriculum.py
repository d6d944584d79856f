"""
Curriculum file parsing, validation and lookups.

The curriculum file syntax is JSON (UTF-8): top-level ``course_id``, ``title``,
``modules[]``; module keys ``module_id``, ``title``, ``weeks[]`` and the optional
``evaluation_prompt``; week keys ``week_id``, ``topic_title``,
``starter_prompts[]``, ``prev_week_id``, ``next_week_id``, ``subtopics[]``;
subtopic keys ``subtopic_id``, ``title``, ``keywords[]``, ``learning_outcome``,
``bloom_level``, ``tutorial_only`` (default false).
"""
import json
import logging
from collections import Counter
from typing import List, Tuple

from pydantic import ValidationError

from errors import CurriculumSchemaError, CurriculumSyntaxError, UnknownWeekError
from models.curriculum import (
    BloomLevel,
    Curriculum,
    ModuleSpec,
    Subtopic,
    ValidationReport,
    Violation,
    WeekSpec,
)
from services.evaluator.lexical import tokenize

logger = logging.getLogger(__name__)

MAX_WEEKS_PER_MODULE = 4


def _loc_to_path(loc: Tuple) -> str:
    path = ""
    for part in loc:
        if isinstance(part, int):
            path += f"[{part}]"
        elif part == "__root__":
            continue
        else:
            path += f".{part}" if path else str(part)
    return path or "<root>"


def _position(text: str, offset: int) -> dict:
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return {"offset": offset, "line": line, "column": column}


def parse_curriculum(document: bytes) -> Curriculum:
    """
    Parse a curriculum document into a validated :class:`Curriculum`.

    :param document: raw curriculum file content
    :type document: bytes
    :return: curriculum with field values and ordering of the document
    :rtype: Curriculum
    :raises CurriculumSyntaxError: document is not UTF-8 JSON
    :raises CurriculumSchemaError: missing field, duplicate id, bad bloom level, ...
    """
    try:
        text = document.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise CurriculumSyntaxError(
            f"Invalid UTF-8 at offset {exc.start}", data={"offset": exc.start}
        )
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CurriculumSyntaxError(
            f"{exc.msg} at line {exc.lineno} column {exc.colno}",
            data=_position(text, exc.pos),
        )
    if not isinstance(raw, dict):
        raise CurriculumSchemaError(
            "Curriculum document must be an object",
            data={"path": "<root>", "violations": ["<root>: expected an object"]},
        )

    try:
        curriculum = Curriculum.parse_obj(raw)
    except ValidationError as exc:
        violations = [
            Violation(path=_loc_to_path(err["loc"]), message=err["msg"])
            for err in exc.errors()
        ]
        raise _schema_error(violations)

    report = validate_curriculum(curriculum)
    if not report.ok:
        raise _schema_error(report.violations)
    logger.info(
        "Parsed curriculum %s: %d modules, %d weeks",
        curriculum.course_id,
        len(curriculum.modules),
        sum(len(m.weeks) for m in curriculum.modules),
    )
    return curriculum


def _schema_error(violations: List[Violation]) -> CurriculumSchemaError:
    first = violations[0]
    return CurriculumSchemaError(
        str(first),
        data={"path": first.path, "violations": [str(v) for v in violations]},
    )


def serialize_curriculum(curriculum: Curriculum) -> bytes:
    """
    Serialize a curriculum back into its file form. Inverse of :func:`parse_curriculum`.
    """
    return curriculum.json(indent=2, ensure_ascii=False).encode("utf-8")


def _duplicates(ids: List[str]) -> List[str]:
    return [item for item, count in Counter(ids).items() if count > 1]


def _validate_subtopic(subtopic: Subtopic, path: str) -> List[Violation]:
    violations = []
    if not subtopic.subtopic_id.strip():
        violations.append(Violation(path=f"{path}.subtopic_id", message="empty id"))
    if not subtopic.keywords:
        violations.append(
            Violation(
                path=f"{path}.keywords",
                message=f"subtopic {subtopic.subtopic_id!r} has no keywords",
            )
        )
    for k, keyword in enumerate(subtopic.keywords):
        if not keyword.strip():
            violations.append(
                Violation(path=f"{path}.keywords[{k}]", message="blank keyword")
            )
        elif keyword != keyword.lower():
            violations.append(
                Violation(
                    path=f"{path}.keywords[{k}]",
                    message=f"keyword {keyword!r} is not lowercase",
                )
            )
        elif not tokenize(keyword):
            violations.append(
                Violation(
                    path=f"{path}.keywords[{k}]",
                    message=f"keyword {keyword!r} contains no words",
                )
            )
        elif " ".join(tokenize(keyword)) != " ".join(keyword.split()):
            violations.append(
                Violation(
                    path=f"{path}.keywords[{k}]",
                    message=f"keyword {keyword!r} matches as {' '.join(tokenize(keyword))!r}",
                )
            )
    if subtopic.bloom_level not in set(BloomLevel):
        violations.append(
            Violation(
                path=f"{path}.bloom_level",
                message=f"unknown bloom level {subtopic.bloom_level!r}",
            )
        )
    return violations


def _validate_week(week: WeekSpec, path: str, known_weeks: set) -> List[Violation]:
    violations = []
    if not week.week_id.strip():
        violations.append(Violation(path=f"{path}.week_id", message="empty id"))
    if not week.subtopics:
        violations.append(
            Violation(
                path=f"{path}.subtopics",
                message=f"week {week.week_id!r} has no subtopics",
            )
        )
    for dup in _duplicates([s.subtopic_id for s in week.subtopics]):
        violations.append(
            Violation(
                path=f"{path}.subtopics",
                message=f"duplicate subtopic_id {dup!r}",
            )
        )
    for field in ("prev_week_id", "next_week_id"):
        ref = getattr(week, field)
        if ref is not None and ref not in known_weeks:
            violations.append(
                Violation(
                    path=f"{path}.{field}",
                    message=f"reference {ref!r} does not resolve to a week",
                )
            )
    for s, subtopic in enumerate(week.subtopics):
        violations.extend(_validate_subtopic(subtopic, f"{path}.subtopics[{s}]"))
    return violations


def _validate_module(module: ModuleSpec, path: str, known_weeks: set) -> List[Violation]:
    violations = []
    if not module.module_id.strip():
        violations.append(Violation(path=f"{path}.module_id", message="empty id"))
    if not module.weeks:
        violations.append(
            Violation(
                path=f"{path}.weeks",
                message=f"module {module.module_id!r} has no weeks",
            )
        )
    elif len(module.weeks) > MAX_WEEKS_PER_MODULE:
        violations.append(
            Violation(
                path=f"{path}.weeks",
                message=(
                    f"module {module.module_id!r} has {len(module.weeks)} weeks, "
                    f"at most {MAX_WEEKS_PER_MODULE} allowed"
                ),
            )
        )
    for dup in _duplicates([w.week_id for w in module.weeks]):
        violations.append(
            Violation(path=f"{path}.weeks", message=f"duplicate week_id {dup!r}")
        )
    for w, week in enumerate(module.weeks):
        violations.extend(_validate_week(week, f"{path}.weeks[{w}]", known_weeks))
    return violations


def validate_curriculum(curriculum: Curriculum) -> ValidationReport:
    """
    Check every curriculum invariant and report each violation with its path.

    Violations are data: this function never raises for an invalid curriculum.

    :param curriculum: curriculum to check
    :type curriculum: Curriculum
    :return: report, empty when the curriculum is valid
    :rtype: ValidationReport
    """
    violations: List[Violation] = []
    if not curriculum.course_id.strip():
        violations.append(Violation(path="course_id", message="empty course_id"))
    if not curriculum.modules:
        violations.append(Violation(path="modules", message="curriculum has no modules"))
    for dup in _duplicates([m.module_id for m in curriculum.modules]):
        violations.append(
            Violation(path="modules", message=f"duplicate module_id {dup!r}")
        )

    all_week_ids = [w.week_id for m in curriculum.modules for w in m.weeks]
    known_weeks = set(all_week_ids)
    per_module_dups = {
        dup for m in curriculum.modules for dup in _duplicates([w.week_id for w in m.weeks])
    }
    for dup in _duplicates(all_week_ids):
        if dup not in per_module_dups:
            violations.append(
                Violation(
                    path="modules",
                    message=f"week_id {dup!r} is used by more than one module",
                )
            )

    for m, module in enumerate(curriculum.modules):
        violations.extend(_validate_module(module, f"modules[{m}]", known_weeks))
    return ValidationReport(violations=violations)


def find_week(curriculum: Curriculum, week_id: str) -> Tuple[ModuleSpec, WeekSpec]:
    """
    Locate a week and the module it belongs to.

    :raises UnknownWeekError: week id is not declared in the curriculum
    """
    for module in curriculum.modules:
        for week in module.weeks:
            if week.week_id == week_id:
                return module, week
    raise UnknownWeekError(f"Unknown week {week_id!r}", data={"week_id": week_id})


def subtopics_for_week(curriculum: Curriculum, week_id: str) -> List[Subtopic]:
    """
    Return the week's subtopics in declaration order, tutorial-only ones included.

    :raises UnknownWeekError: week id is not declared in the curriculum
    """
    _, week = find_week(curriculum, week_id)
    return list(week.subtopics)


def canonical_subtopics(week: WeekSpec, include_tutorial_only: bool = True) -> List[Subtopic]:
    """
    Subtopics that count toward topic coverage for a week.
    """
    if include_tutorial_only:
        return list(week.subtopics)
    return [s for s in week.subtopics if not s.tutorial_only]
