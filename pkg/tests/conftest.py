from pathlib import Path
from typing import List

import pytest

from config import RubricSettings, Settings
from models.curriculum import Curriculum, Subtopic
from models.report import EngagementReport
from models.transcript import Role, SubmissionMeta, Transcript, Turn
from services.curriculum import find_week, parse_curriculum
from services.pipeline import Pipeline
from services.store import ArtifactStore
from services.transcript import word_count

ROOT = Path(__file__).resolve().parent.parent
DATA_DIR = ROOT / "data"
CURRICULUM_PATH = DATA_DIR / "curriculum.json"
SAMPLE_TRANSCRIPT = DATA_DIR / "transcripts" / "w1-sample.txt"
SAMPLE_META = DATA_DIR / "transcripts" / "w1-sample.meta"
GOLDEN_DIR = Path(__file__).resolve().parent / "goldens"


@pytest.fixture(scope="session")
def curriculum() -> Curriculum:
    return parse_curriculum(CURRICULUM_PATH.read_bytes())


@pytest.fixture
def anyio_backend():
    return "asyncio"


@pytest.fixture(scope="session")
def week1(curriculum):
    return find_week(curriculum, "w1")[1]


@pytest.fixture(scope="session")
def week2(curriculum):
    return find_week(curriculum, "w2")[1]


@pytest.fixture(scope="session")
def w1_subtopics(week1) -> List[Subtopic]:
    return list(week1.subtopics)


@pytest.fixture(scope="session")
def rubric() -> RubricSettings:
    return RubricSettings()


@pytest.fixture
def sample_payload() -> bytes:
    return SAMPLE_TRANSCRIPT.read_bytes()


@pytest.fixture
def sample_meta() -> SubmissionMeta:
    return SubmissionMeta(
        submission_id="sub-sample",
        student_pseudonym="stu-001",
        week_id="w1",
        submitted_at=1756800000,
    )


def make_transcript(
    student_texts: List[str],
    week_id: str = "w1",
    submission_id: str = "sub-test",
    agent_reply: str = "Okay.",
) -> Transcript:
    """
    Alternate student and agent turns, one agent reply after every student turn.
    """
    turns = []
    for text in student_texts:
        for role, body in ((Role.student, text), (Role.agent, agent_reply)):
            turns.append(
                Turn(index=len(turns), role=role, text=body, word_count=word_count(body))
            )
    return Transcript(
        submission_id=submission_id,
        student_pseudonym="stu-test",
        week_id=week_id,
        submitted_at=1756800000,
        turns=turns,
    )


def make_report(
    week_id: str,
    coverage: float,
    depth,
    turn_length,
    *,
    total: int = 20,
    submission_id: str = "sub-x",
    submitted_at: int = 1756800000,
) -> EngagementReport:
    """
    A report with the given metrics, bypassing the evaluator.
    """
    engaged = round(coverage * total)
    return EngagementReport(
        submission_id=submission_id,
        student_pseudonym="stu-x",
        week_id=week_id,
        submitted_at=submitted_at,
        total_subtopics=total,
        engaged_subtopics=engaged,
        topic_coverage=coverage,
        avg_topic_depth=depth,
        avg_turn_length_per_topic=turn_length,
        pooled_turn_length=turn_length,
        per_subtopic={},
    )


def week_reports(week_id: str, medians, *, total: int, start_at: int = 1756800000):
    """
    Five reports whose medians of coverage, depth and turn length are ``medians``.
    """
    coverage, depth, words = medians
    offsets = (-0.1, -0.05, 0.0, 0.05, 0.1)
    return [
        make_report(
            week_id,
            round(coverage + offset, 6),
            round(depth + offset * 4, 6),
            round(words + offset * 40, 6),
            total=total,
            submission_id=f"sub-{week_id}-{i}",
            submitted_at=start_at + i,
        )
        for i, offset in enumerate(offsets)
    ]


@pytest.fixture
def settings(tmp_path) -> Settings:
    return Settings(
        _env_file=None,
        curriculum_path=CURRICULUM_PATH,
        store_root=tmp_path / "store",
        worker_limit=2,
        poll_interval=0.05,
        submit_timeout=30,
    )


@pytest.fixture
def store(settings) -> ArtifactStore:
    return ArtifactStore(settings.store_root)


@pytest.fixture
def pipeline(curriculum, store, settings) -> Pipeline:
    return Pipeline(curriculum, store, settings)
