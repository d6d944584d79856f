from typing import Optional

import anyio
from fastapi import APIRouter, Depends, File, Form, UploadFile
from pydantic import ValidationError
from starlette import status

from depedences.common import get_pipeline, get_worker
from errors import BadRequestError, SubmissionFailedError
from models.artifact import OutcomeStatus, UploadMeta
from models.transcript import TranscriptFormat
from schema import SubmissionResp
from services.pipeline import Pipeline
from services.worker import SubmissionWorker

ROUTER = APIRouter(prefix="/submissions", tags=["Submission"])


def _required(name: str, value):
    if value is None or (isinstance(value, str) and not value.strip()):
        raise BadRequestError(f"missing field {name}", data={"field": name})
    return value


@ROUTER.post(
    "",
    status_code=status.HTTP_200_OK,
    summary="Submit a transcript",
    description="Stores the transcript, queues it for processing and waits for "
    "the outcome",
    response_model=SubmissionResp,
)
async def create_submission(
    student_pseudonym: Optional[str] = Form(None),
    week_id: Optional[str] = Form(None),
    format: TranscriptFormat = Form(TranscriptFormat.plain_text),
    submission_id: Optional[str] = Form(None),
    submitted_at: Optional[int] = Form(None),
    file: Optional[UploadFile] = File(None),
    pipeline: Pipeline = Depends(get_pipeline),
    worker: SubmissionWorker = Depends(get_worker),
):
    """
    API method to upload one transcript submission.

    :param student_pseudonym: pseudonymous student id
    :type student_pseudonym: str
    :param week_id: week the transcript belongs to
    :type week_id: str
    :param file: raw transcript export
    :type file: UploadFile
    """
    _required("student_pseudonym", student_pseudonym)
    _required("week_id", week_id)
    _required("file", file)
    try:
        meta = UploadMeta(
            student_pseudonym=student_pseudonym,
            week_id=week_id,
            format=format,
            submitted_at=submitted_at,
            submission_id=submission_id or None,
        )
    except ValidationError as exc:
        raise BadRequestError("invalid submission metadata", data={"errors": exc.errors()})

    payload = await file.read()
    event = await anyio.to_thread.run_sync(pipeline.event_from_upload, meta, payload)
    outcome = await worker.submit(event)
    if outcome.status == OutcomeStatus.dead_letter:
        error = dict(outcome.error or {})
        raise SubmissionFailedError(
            error=error.get("error", "internal_error"),
            detail=error.get("detail", SubmissionFailedError.detail),
            status_code=outcome.error_status or 500,
            data={
                **error.get("data", {}),
                "submission_id": outcome.submission_id,
                "dead_letter_key": outcome.dead_letter_key,
            },
        )
    return SubmissionResp(
        submission_id=outcome.submission_id,
        status=outcome.status,
        report_key=outcome.report_key,
        assessment_key=outcome.assessment_key,
        metrics_key=outcome.metrics_key,
    )
