"""
Transcript ingestion: decoding, format parsing and normalization.

No semantic curation is applied. Normalization only trims each turn, drops
turns that become empty and re-indexes the rest; consecutive turns of the same
role are never merged.
"""
import json
import logging
import re
from typing import List, Tuple

from pydantic import ValidationError

from errors import (
    EmptyTranscriptError,
    InvalidMetadataError,
    TranscriptDecodeError,
    TranscriptFormatError,
)
from models.transcript import Role, SubmissionMeta, Transcript, TranscriptFormat, Turn

logger = logging.getLogger(__name__)

PLAIN_PREFIX_RE = re.compile(r"^\s*(student|agent)\s*:\s?(.*)$", re.IGNORECASE)


def word_count(text: str) -> int:
    """
    Count maximal runs of non-whitespace characters.

    Unicode whitespace separates words; attached punctuation does not.
    """
    return len(text.split())


def _decode(raw: bytes) -> str:
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise TranscriptDecodeError(
            f"Invalid UTF-8 at byte {exc.start}", data={"offset": exc.start}
        )
    return text.lstrip("\ufeff")


def _lines(text: str) -> List[str]:
    """
    Split on line feeds only. ``str.splitlines`` also breaks on U+2028, U+2029,
    U+0085 and other separators that may appear inside a turn.
    """
    return [line[:-1] if line.endswith("\r") else line for line in text.split("\n")]


def _parse_canonical(text: str) -> List[Tuple[Role, str]]:
    turns = []
    for lineno, line in enumerate(_lines(text), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise TranscriptFormatError(
                f"Line {lineno}: not a JSON object ({exc.msg})", data={"line": lineno}
            )
        if (
            not isinstance(obj, dict)
            or not isinstance(obj.get("index"), int)
            or isinstance(obj.get("index"), bool)
            or not isinstance(obj.get("text"), str)
            or obj.get("role") not in (Role.student.value, Role.agent.value)
        ):
            raise TranscriptFormatError(
                f"Line {lineno}: expected keys index (int), role "
                "('student'|'agent') and text (string)",
                data={"line": lineno},
            )
        turns.append((Role(obj["role"]), obj["text"]))
    return turns


def _parse_plain(text: str) -> List[Tuple[Role, str]]:
    turns: List[List] = []
    for lineno, line in enumerate(_lines(text), start=1):
        match = PLAIN_PREFIX_RE.match(line)
        if match:
            turns.append([Role(match.group(1).lower()), match.group(2)])
        elif turns:
            turns[-1][1] += "\n" + line
        elif line.strip():
            raise TranscriptFormatError(
                f"Line {lineno}: expected a 'Student:' or 'Agent:' prefix",
                data={"line": lineno},
            )
    return [(role, body) for role, body in turns]


def parse_transcript(
    raw: bytes, fmt: TranscriptFormat, meta: SubmissionMeta
) -> Transcript:
    """
    Parse raw transcript bytes into a normalized :class:`Transcript`.

    :param raw: uploaded transcript file
    :type raw: bytes
    :param fmt: file format
    :type fmt: TranscriptFormat
    :param meta: submission metadata sidecar
    :type meta: SubmissionMeta
    :return: transcript with turns in file order, re-indexed from 0
    :rtype: Transcript
    """
    text = _decode(raw)
    if fmt == TranscriptFormat.canonical_jsonl:
        pairs = _parse_canonical(text)
    else:
        pairs = _parse_plain(text)

    turns = []
    for role, body in pairs:
        body = body.strip()
        if not body:
            continue
        turns.append(
            Turn(index=len(turns), role=role, text=body, word_count=word_count(body))
        )
    if not turns:
        raise EmptyTranscriptError(
            f"Submission {meta.submission_id!r} has no turns",
            data={"submission_id": meta.submission_id},
        )
    logger.debug("Parsed %d turns for submission %s", len(turns), meta.submission_id)
    return Transcript(
        submission_id=meta.submission_id,
        student_pseudonym=meta.student_pseudonym,
        week_id=meta.week_id,
        submitted_at=meta.submitted_at,
        turns=turns,
    )


def serialize_transcript(transcript: Transcript) -> bytes:
    """
    Write a transcript in the canonical JSON-lines form.
    """
    lines = [
        json.dumps(
            {"index": t.index, "role": t.role.value, "text": t.text},
            ensure_ascii=False,
        )
        for t in transcript.turns
    ]
    return ("\n".join(lines) + "\n").encode("utf-8")


def parse_metadata(raw: bytes) -> SubmissionMeta:
    """
    Parse the JSON metadata sidecar of a submission.
    """
    try:
        return SubmissionMeta.parse_raw(raw)
    except ValidationError as exc:
        raise InvalidMetadataError(str(exc), data={"errors": exc.errors()})
    except ValueError as exc:
        raise InvalidMetadataError(f"Metadata is not JSON: {exc}")


def student_turns(transcript: Transcript) -> List[Turn]:
    return [t for t in transcript.turns if t.role == Role.student]


def agent_turns(transcript: Transcript) -> List[Turn]:
    return [t for t in transcript.turns if t.role == Role.agent]
