"""
Command line interface of the engagement analytics toolkit.

    python cli.py validate --curriculum curriculum.json
    python cli.py evaluate --week w1 --transcript chat.txt --out reports/
    python cli.py aggregate --week w2 --report a.json --report b.json --previous c.json
    python cli.py promptgen --week w1 --out agent-w1.txt
    python cli.py synth --week w1 --spec synth.json --check
    python cli.py serve --port 8000
"""
import functools
import json
import logging
from pathlib import Path
from typing import List, Optional, Tuple

import click
from pydantic import ValidationError

from config import Settings, load_settings
from errors import ServiceError, UndefinedMetricError, ZeroBaselineError
from models.curriculum import Curriculum
from models.report import EngagementReport
from models.synth import SynthSpec
from models.transcript import SubmissionMeta, TranscriptFormat
from services.curriculum import canonical_subtopics, find_week, parse_curriculum
from services.evaluator import assessment_to_json
from services.metrics import aggregate_class, compare_weeks
from services.pipeline import Pipeline, TranscriptAnalyzer, derive_submission_id
from services.promptgen import (
    DEFAULT_PEDAGOGY_TEMPLATE,
    DEFAULT_PERSONA_TEMPLATE,
    assemble_agent_config,
    serialize_agent_config,
)
from services.report import render_class_report
from services.synth import generate_transcript, recovery_check
from services.transcript import parse_metadata, parse_transcript, serialize_transcript
from utils.logs import setup_logging

logger = logging.getLogger(__name__)

EXISTING_FILE = click.Path(exists=True, dir_okay=False, path_type=Path)
OUT_DIR = click.Path(file_okay=False, path_type=Path)


def diagnostics(func):
    """
    Turn domain and validation errors into a one-line diagnostic and exit code 1.
    """

    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except ServiceError as exc:
            click.echo(f"Error [{exc.error}]: {exc.detail}", err=True)
            for violation in exc.data.get("violations", []):
                click.echo(f"  - {violation}", err=True)
        except ValidationError as exc:
            click.echo(f"Error [invalid_input]: {exc}", err=True)
        raise click.exceptions.Exit(1)

    return wrapper


def _settings(ctx: click.Context, **overrides) -> Settings:
    overrides = {k: v for k, v in overrides.items() if v is not None}
    return load_settings(ctx.obj["config_file"], **overrides)


def _curriculum(settings: Settings) -> Curriculum:
    return parse_curriculum(Path(settings.curriculum_path).read_bytes())


def _write(path: Path, content: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(content)
    click.echo(f"Wrote {path}")


curriculum_option = click.option(
    "--curriculum",
    "curriculum_path",
    type=EXISTING_FILE,
    default=None,
    help="Curriculum JSON file, overrides the configured curriculum_path",
)


@click.group()
@click.option(
    "--config",
    "config_file",
    type=EXISTING_FILE,
    default=None,
    help="dotenv-style config file with ENGAGEMENT_* settings",
)
@click.option("--log-level", default=None, help="Level of the services loggers")
@click.pass_context
def cli(ctx: click.Context, config_file: Optional[Path], log_level: Optional[str]):
    """Engagement analytics for AI-instructor classroom transcripts."""
    setup_logging(level=log_level)
    ctx.ensure_object(dict)
    ctx.obj["config_file"] = config_file


@cli.command()
@curriculum_option
@click.pass_context
@diagnostics
def validate(ctx: click.Context, curriculum_path: Optional[Path]):
    """Check a curriculum file and list every violation."""
    curriculum = _curriculum(_settings(ctx, curriculum_path=curriculum_path))
    weeks = sum(len(m.weeks) for m in curriculum.modules)
    click.echo(
        f"Curriculum {curriculum.course_id} is valid: "
        f"{len(curriculum.modules)} modules, {weeks} weeks"
    )


@cli.command()
@curriculum_option
@click.option("--week", "week_id", default=None, help="Week id, taken from --metadata when absent")
@click.option("--transcript", "transcript_path", type=EXISTING_FILE, required=True)
@click.option(
    "--format",
    "fmt",
    type=click.Choice([f.value for f in TranscriptFormat]),
    default=TranscriptFormat.plain_text.value,
    show_default=True,
)
@click.option("--metadata", "metadata_path", type=EXISTING_FILE, default=None)
@click.option("--pseudonym", default="cli-student", show_default=True)
@click.option("--submitted-at", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", type=OUT_DIR, default=Path("."), show_default=True)
@click.pass_context
@diagnostics
def evaluate(
    ctx: click.Context,
    curriculum_path: Optional[Path],
    week_id: Optional[str],
    transcript_path: Path,
    fmt: str,
    metadata_path: Optional[Path],
    pseudonym: str,
    submitted_at: int,
    out_dir: Path,
):
    """Evaluate one transcript and write its assessment, metrics and feedback."""
    settings = _settings(ctx, curriculum_path=curriculum_path)
    payload = transcript_path.read_bytes()
    if metadata_path is not None:
        meta = parse_metadata(metadata_path.read_bytes())
    elif week_id is None:
        raise click.UsageError("--week is required without --metadata")
    else:
        meta = SubmissionMeta(
            submission_id=derive_submission_id(pseudonym, week_id, payload),
            student_pseudonym=pseudonym,
            week_id=week_id,
            submitted_at=submitted_at,
        )
    if week_id is not None and week_id != meta.week_id:
        raise click.UsageError(f"--week {week_id} contradicts metadata week {meta.week_id}")

    transcript = parse_transcript(payload, TranscriptFormat(fmt), meta)
    assessment, report, document = TranscriptAnalyzer(_curriculum(settings), settings).analyze(
        transcript
    )
    _write(out_dir / "assessment.json", assessment_to_json(assessment))
    _write(out_dir / "report.json", report.json(indent=2, ensure_ascii=False).encode("utf-8"))
    _write(out_dir / document.filename, document.body.encode("utf-8"))


def _read_reports(paths: Tuple[Path, ...]) -> List[EngagementReport]:
    return [EngagementReport.parse_raw(path.read_bytes()) for path in paths]


@cli.command()
@curriculum_option
@click.option("--week", "week_id", required=True)
@click.option(
    "--report",
    "report_paths",
    type=EXISTING_FILE,
    multiple=True,
    help="report.json of the week; without any the configured store is aggregated",
)
@click.option(
    "--previous",
    "previous_paths",
    type=EXISTING_FILE,
    multiple=True,
    help="report.json files of the preceding week to compare with",
)
@click.option("--out", "out_dir", type=OUT_DIR, default=Path("."), show_default=True)
@click.pass_context
@diagnostics
def aggregate(
    ctx: click.Context,
    curriculum_path: Optional[Path],
    week_id: str,
    report_paths: Tuple[Path, ...],
    previous_paths: Tuple[Path, ...],
    out_dir: Path,
):
    """Aggregate a week into a class document."""
    settings = _settings(ctx, curriculum_path=curriculum_path)
    if not report_paths:
        key = Pipeline.from_settings(settings).run_class_aggregation(week_id)
        click.echo(f"Stored class report {key}")
        return

    current = aggregate_class(_read_reports(report_paths))
    aggs = [current]
    comparison = None
    if previous_paths:
        previous = aggregate_class(_read_reports(previous_paths))
        aggs = [previous, current]
        try:
            comparison = compare_weeks(previous, current)
        except (ZeroBaselineError, UndefinedMetricError) as exc:
            click.echo(f"No week comparison: {exc.detail}", err=True)
    document = render_class_report(aggs, comparison)
    _write(out_dir / "aggregate.json", current.json(indent=2, ensure_ascii=False).encode("utf-8"))
    _write(out_dir / document.filename, document.body.encode("utf-8"))


@cli.command()
@curriculum_option
@click.option("--week", "week_id", required=True)
@click.option("--persona-template", type=EXISTING_FILE, default=None)
@click.option("--pedagogy-template", type=EXISTING_FILE, default=None)
@click.option(
    "--out",
    "out_path",
    type=click.Path(dir_okay=False, path_type=Path),
    default=None,
    help="Agent config file, agent-<week>.txt by default",
)
@click.pass_context
@diagnostics
def promptgen(
    ctx: click.Context,
    curriculum_path: Optional[Path],
    week_id: str,
    persona_template: Optional[Path],
    pedagogy_template: Optional[Path],
    out_path: Optional[Path],
):
    """Assemble the layered instructor-agent prompt of a week."""
    settings = _settings(ctx, curriculum_path=curriculum_path)
    config = assemble_agent_config(
        _curriculum(settings),
        week_id,
        persona_template.read_text(encoding="utf-8") if persona_template else DEFAULT_PERSONA_TEMPLATE,
        pedagogy_template.read_text(encoding="utf-8") if pedagogy_template else DEFAULT_PEDAGOGY_TEMPLATE,
    )
    out_path = out_path or Path(f"agent-{week_id}.txt")
    _write(out_path, serialize_agent_config(config).encode("utf-8"))
    starters = "".join(f"{prompt}\n" for prompt in config.starter_prompts)
    _write(out_path.with_name(f"{out_path.stem}.starters.txt"), starters.encode("utf-8"))


@cli.command()
@curriculum_option
@click.option("--spec", "spec_path", type=EXISTING_FILE, required=True, help="SynthSpec JSON file")
@click.option("--out", "out_dir", type=OUT_DIR, default=Path("."), show_default=True)
@click.option("--check", is_flag=True, help="Assess the transcript and print planted vs recovered")
@click.pass_context
@diagnostics
def synth(
    ctx: click.Context,
    curriculum_path: Optional[Path],
    spec_path: Path,
    out_dir: Path,
    check: bool,
):
    """Generate a synthetic transcript with planted engagement."""
    settings = _settings(ctx, curriculum_path=curriculum_path)
    spec = SynthSpec.parse_file(spec_path)
    _, week = find_week(_curriculum(settings), spec.week_id)
    subtopics = canonical_subtopics(week, settings.count_tutorial_only)

    if check:
        result = recovery_check(spec, subtopics)
        click.echo(
            json.dumps(
                {
                    "seed": result.seed,
                    "exact": result.exact,
                    "coverage_delta": result.coverage_delta,
                    "depth_delta": result.depth_delta,
                    "turn_length_delta": result.turn_length_delta,
                    "depth_mismatches": result.depth_mismatches,
                },
                indent=2,
            )
        )
        if not result.exact:
            raise click.exceptions.Exit(1)
        return

    sample = generate_transcript(spec, subtopics)
    stem = sample.transcript.submission_id
    _write(out_dir / f"{stem}.jsonl", serialize_transcript(sample.transcript))
    _write(
        out_dir / f"{stem}.planted.json",
        sample.planted.json(indent=2, ensure_ascii=False).encode("utf-8"),
    )


@cli.command()
@click.option("--host", default=None)
@click.option("--port", type=int, default=None)
@click.option("--watch-dir", type=OUT_DIR, default=None)
@click.pass_context
@diagnostics
def serve(ctx: click.Context, host: Optional[str], port: Optional[int], watch_dir: Optional[Path]):
    """Run the HTTP service and the watch-folder poller."""
    import uvicorn

    from main import create_app

    settings = _settings(ctx, host=host, port=port, watch_dir=watch_dir)
    uvicorn.run(create_app(settings), host=settings.host, port=settings.port, log_config=None)


if __name__ == "__main__":
    cli()
