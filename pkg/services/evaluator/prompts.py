"""
Default rubric prompt of the remote evaluator and the request payload builder.

The prompt is a reconstruction from the published rubric labels; the wording of
the system prompt used in the classroom deployment is not public.
"""
import json
from typing import List

from models.assessment import ASSESSMENT_SCHEMA_VERSION
from models.curriculum import Subtopic
from models.transcript import Transcript

DEFAULT_RUBRIC_PROMPT = f"""You are an evaluation engine for classroom chat transcripts between a student and an AI instructor agent.
Analyze the transcript consistently and without bias, following these fixed rules.

1. Attribute every student message (role "student") to at most one subtopic from the provided list, or leave it unattributed.
   Never attribute agent messages. Every student message index must appear exactly once: either in one subtopic's
   attributed_student_turns or in unattributed_student_turns.
2. For each subtopic the student engaged with, rate its depth on this four-level ordinal scale:
   0 - Briefly mentioned
   1 - Basic question asked
   2 - Explored with follow-ups or comparisons
   3 - Examined in depth through reasoning or clarification
   Omit subtopics that were not engaged at all.
3. Evidence must be short verbatim quotes copied from the transcript (at most 30 words each).

Respond with exactly one JSON object and nothing else, following the {ASSESSMENT_SCHEMA_VERSION} schema:
{{"schema_version": "{ASSESSMENT_SCHEMA_VERSION}", "week_id": string, "submission_id": string, "backend": "remote",
 "entries": [{{"subtopic_id": string, "depth": integer 0-3, "attributed_student_turns": [integer], "evidence": [string]}}],
 "unattributed_student_turns": [integer]}}
"""

CORRECTIVE_PROMPT = (
    "Your previous response violated the "
    + ASSESSMENT_SCHEMA_VERSION
    + " schema:\n{errors}\nReturn only one corrected JSON object."
)


def build_user_message(transcript: Transcript, subtopics: List[Subtopic]) -> str:
    """
    Serialize the transcript and the week's subtopics as the user message.
    """
    payload = {
        "week_id": transcript.week_id,
        "submission_id": transcript.submission_id,
        "subtopics": [
            {
                "subtopic_id": s.subtopic_id,
                "title": s.title,
                "keywords": s.keywords,
                "learning_outcome": s.learning_outcome,
            }
            for s in subtopics
        ],
        "transcript": [
            {"index": t.index, "role": t.role.value, "text": t.text}
            for t in transcript.turns
        ],
    }
    return json.dumps(payload, ensure_ascii=False)
