"""
The published assessment/v1 output schema shared by every evaluator backend,
plus the invariant checks a schema alone cannot express.
"""
import json
from typing import Any, Dict, List, Optional

from jsonschema import Draft7Validator, validators

from models.assessment import (
    ASSESSMENT_SCHEMA_VERSION,
    AssessmentSet,
    Backend,
    SubtopicAssessment,
)
from models.curriculum import Subtopic
from models.transcript import Transcript
from services.transcript import student_turns

_INDEX_LIST = {
    "type": "array",
    "items": {"type": "integer", "minimum": 0},
    "uniqueItems": True,
}

ASSESSMENT_SCHEMA: Dict[str, Any] = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "$id": ASSESSMENT_SCHEMA_VERSION,
    "type": "object",
    "additionalProperties": False,
    "required": [
        "week_id",
        "submission_id",
        "backend",
        "entries",
        "unattributed_student_turns",
    ],
    "properties": {
        "schema_version": {"const": ASSESSMENT_SCHEMA_VERSION},
        "week_id": {"type": "string", "minLength": 1},
        "submission_id": {"type": "string", "minLength": 1},
        "backend": {"enum": [b.value for b in Backend]},
        "entries": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": [
                    "subtopic_id",
                    "depth",
                    "attributed_student_turns",
                    "evidence",
                ],
                "properties": {
                    "subtopic_id": {"type": "string", "minLength": 1},
                    "depth": {"type": "integer", "minimum": 0, "maximum": 3},
                    "attributed_student_turns": _INDEX_LIST,
                    "evidence": {"type": "array", "items": {"type": "string"}},
                },
            },
        },
        "unattributed_student_turns": _INDEX_LIST,
    },
}

# Draft 7 counts 2.0 as an integer; depths and turn indices must be JSON integers.
_type_checker = Draft7Validator.TYPE_CHECKER.redefine(
    "integer", lambda checker, instance: isinstance(instance, int) and not isinstance(instance, bool)
)
StrictDraft7Validator = validators.extend(Draft7Validator, type_checker=_type_checker)

_validator = StrictDraft7Validator(ASSESSMENT_SCHEMA)


def assessment_to_document(assessment: AssessmentSet) -> Dict[str, Any]:
    return {
        "schema_version": ASSESSMENT_SCHEMA_VERSION,
        "week_id": assessment.week_id,
        "submission_id": assessment.submission_id,
        "backend": assessment.backend.value,
        "entries": [
            {
                "subtopic_id": entry.subtopic_id,
                "depth": entry.depth,
                "attributed_student_turns": list(entry.attributed_student_turns),
                "evidence": list(entry.evidence),
            }
            for entry in assessment.entries.values()
        ],
        "unattributed_student_turns": list(assessment.unattributed_student_turns),
    }


def assessment_to_json(assessment: AssessmentSet) -> bytes:
    """
    Serialize an assessment as an assessment/v1 document. Byte-stable.
    """
    doc = assessment_to_document(assessment)
    return json.dumps(doc, indent=2, ensure_ascii=False).encode("utf-8")


def assessment_from_document(doc: Dict[str, Any]) -> AssessmentSet:
    """
    Build an :class:`AssessmentSet` from a document that passed :func:`schema_errors`.
    """
    return AssessmentSet(
        week_id=doc["week_id"],
        submission_id=doc["submission_id"],
        backend=Backend(doc["backend"]),
        entries={
            entry["subtopic_id"]: SubtopicAssessment(**entry) for entry in doc["entries"]
        },
        unattributed_student_turns=doc["unattributed_student_turns"],
    )


def assessment_from_json(raw: bytes) -> AssessmentSet:
    doc = json.loads(raw)
    errors = schema_errors(doc)
    if errors:
        raise ValueError("; ".join(errors))
    return assessment_from_document(doc)


def schema_errors(doc: Any) -> List[str]:
    """
    Messages of every assessment/v1 schema violation, ordered by location.
    """
    errors = sorted(_validator.iter_errors(doc), key=lambda e: list(map(str, e.path)))
    return [
        f"{'/'.join(map(str, e.path)) or '<root>'}: {e.message}" for e in errors
    ]


def invariant_errors(
    doc: Dict[str, Any],
    transcript: Transcript,
    subtopics: List[Subtopic],
    expected_backend: Optional[Backend] = None,
) -> List[str]:
    """
    Check a schema-valid document against the transcript it claims to assess.

    Covers identity fields, known and unique subtopic ids, student-only
    attribution, the attribution partition and verbatim evidence.
    """
    errors = []
    if doc["week_id"] != transcript.week_id:
        errors.append(f"week_id {doc['week_id']!r} != {transcript.week_id!r}")
    if doc["submission_id"] != transcript.submission_id:
        errors.append(
            f"submission_id {doc['submission_id']!r} != {transcript.submission_id!r}"
        )
    if expected_backend is not None and doc["backend"] != expected_backend.value:
        errors.append(f"backend must be {expected_backend.value!r}")

    known = {s.subtopic_id for s in subtopics}
    student_indices = {t.index for t in student_turns(transcript)}
    seen: Dict[int, str] = {}
    seen_subtopics = set()
    texts = [t.text for t in transcript.turns]

    for entry in doc["entries"]:
        sid = entry["subtopic_id"]
        if sid not in known:
            errors.append(f"unknown subtopic_id {sid!r}")
        if sid in seen_subtopics:
            errors.append(f"subtopic_id {sid!r} listed twice")
        seen_subtopics.add(sid)
        for index in entry["attributed_student_turns"]:
            if index not in student_indices:
                errors.append(f"{sid}: turn {index} is not a student turn")
            elif index in seen:
                errors.append(f"turn {index} attributed to both {seen[index]!r} and {sid!r}")
            else:
                seen[index] = sid
        for quote in entry["evidence"]:
            if not quote or not any(quote in text for text in texts):
                errors.append(f"{sid}: evidence {quote[:40]!r} is not a transcript quote")

    for index in doc["unattributed_student_turns"]:
        if index not in student_indices:
            errors.append(f"unattributed turn {index} is not a student turn")
        elif index in seen:
            errors.append(f"turn {index} is both attributed and unattributed")
        else:
            seen[index] = "<unattributed>"

    missing = sorted(student_indices - set(seen))
    if missing:
        errors.append(f"student turns {missing} are neither attributed nor unattributed")
    return errors
