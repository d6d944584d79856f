"""
Module that defines list of possible errors which are sent in response.

Two roots live here: :class:`ApiError` for errors raised directly by HTTP
handlers and :class:`ServiceError` for domain errors raised by the analytics
services. Both render the same JSON body.
"""
from typing import Any

from fastapi import HTTPException
from starlette.requests import Request
from starlette.responses import JSONResponse


class ApiError(HTTPException):
    """
    Class of base API error.
    Used to generate status code and message for error response.
    """

    status_code = 500
    error = "internal_error"
    detail = "Unknown server error"

    def __init__(self, detail: str = None, data: dict = None) -> None:
        super().__init__(status_code=self.status_code, detail=detail or self.detail)
        self.data = data


def _error_body(error: str, detail: str, data: dict | None) -> dict[str, Any]:
    body: dict[str, Any] = {"error": error, "detail": detail}
    if data:
        body["data"] = data
    return body


async def api_error_handler(request: Request, exc: ApiError) -> JSONResponse:
    """
    Method to handle API errors. Works as middleware for FastAPI application.

    :param request: incoming request
    :type request: Request
    :param exc: raised error
    :type exc: ApiError
    :return: JSON error response
    :rtype: JSONResponse
    """
    return JSONResponse(
        _error_body(exc.error, exc.detail, exc.data),
        status_code=exc.status_code,
    )


class NotFoundError(ApiError):
    status_code = 404
    error = "not_found"
    detail = "Object not found"


class BadRequestError(ApiError):
    status_code = 400
    error = "bad_request"
    detail = ""


class ForbiddenError(ApiError):
    status_code = 403
    error = "forbidden"
    detail = "Requested resource is forbidden"


class ConflictError(ApiError):
    status_code = 409
    error = "conflict"
    detail = "Request conflicts with stored state"


class ServiceError(Exception):
    """
    Base class of domain errors raised by the analytics services.

    Carries the same attributes as :class:`ApiError` so that a failure can be
    rendered over HTTP, printed by the CLI or stored as a dead-letter artifact
    without translation.
    """

    status_code = 500
    error = "service_error"
    detail = "Unknown service error"

    def __init__(self, detail: str = None, data: dict = None) -> None:
        self.detail = detail or self.detail
        self.data = data or {}
        super().__init__(self.detail)

    def as_dict(self) -> dict[str, Any]:
        return _error_body(self.error, self.detail, self.data)


async def service_error_handler(request: Request, exc: ServiceError) -> JSONResponse:
    """
    Method to handle domain errors escaping from request handlers.
    """
    return JSONResponse(exc.as_dict(), status_code=exc.status_code)


# Curriculum


class CurriculumSyntaxError(ServiceError):
    status_code = 422
    error = "curriculum_syntax"
    detail = "Curriculum document is not well-formed"


class CurriculumSchemaError(ServiceError):
    status_code = 422
    error = "curriculum_schema"
    detail = "Curriculum document violates the curriculum schema"


class UnknownWeekError(ServiceError):
    status_code = 404
    error = "unknown_week"
    detail = "Week is not part of the curriculum"


# Transcripts


class TranscriptDecodeError(ServiceError):
    status_code = 422
    error = "transcript_decode"
    detail = "Transcript is not valid UTF-8"


class TranscriptFormatError(ServiceError):
    status_code = 422
    error = "transcript_format"
    detail = "Unrecognizable transcript line"


class EmptyTranscriptError(ServiceError):
    status_code = 422
    error = "empty_transcript"
    detail = "Transcript has no turns after normalization"


class InvalidMetadataError(ServiceError):
    status_code = 422
    error = "invalid_metadata"
    detail = "Submission metadata is invalid"


# Evaluation


class WeekMismatchError(ServiceError):
    status_code = 422
    error = "week_mismatch"
    detail = "Transcript and subtopics belong to different weeks"


class RemoteUnavailableError(ServiceError):
    status_code = 502
    error = "remote_unavailable"
    detail = "Remote evaluation endpoint is unreachable"


class RemoteAuthError(ServiceError):
    status_code = 502
    error = "remote_auth"
    detail = "Remote evaluation endpoint rejected the credentials"


class AssessmentSchemaError(ServiceError):
    status_code = 502
    error = "assessment_schema"
    detail = "Remote assessment violated the assessment/v1 schema after retries"


# Metrics and reports


class MetricInputError(ServiceError):
    status_code = 422
    error = "metric_input"
    detail = "Invalid input for metric computation"


class UndefinedMetricError(ServiceError):
    status_code = 422
    error = "undefined_metric"
    detail = "Metric is undefined: no engaged subtopics"


class ZeroBaselineError(ServiceError):
    status_code = 422
    error = "zero_baseline"
    detail = "Cannot compute a relative change from a zero baseline"


class EmptyAggregateError(ServiceError):
    status_code = 422
    error = "empty_aggregate"
    detail = "Nothing to aggregate"


class ChartInputError(ServiceError):
    status_code = 422
    error = "chart_input"
    detail = "Invalid chart data"


# Prompt generation


class TemplateError(ServiceError):
    status_code = 422
    error = "template"
    detail = "Template is empty"


class MissingPlaceholderError(TemplateError):
    error = "missing_placeholder"
    detail = "Template lacks a required placeholder"


# Synthetic data


class InfeasibleSpecError(ServiceError):
    status_code = 422
    error = "infeasible_spec"
    detail = "Synthetic transcript spec cannot be realized"


# Pipeline


class NoReportsError(ServiceError):
    status_code = 404
    error = "no_reports"
    detail = "No stored engagement reports for the week"


class DuplicateSubmissionError(ServiceError):
    status_code = 409
    error = "duplicate_submission"
    detail = "Submission id already used with a different payload"


class PayloadMissingError(ServiceError):
    status_code = 422
    error = "payload_missing"
    detail = "Submission payload cannot be resolved"


class ArtifactNotFoundError(ServiceError):
    status_code = 404
    error = "artifact_not_found"
    detail = "No artifact is stored under this key"


class SubmissionFailedError(ApiError):
    """
    Response of an upload whose processing ended in a dead letter.
    Carries the status and error code of the underlying failure.
    """

    error = "internal_error"
    detail = "Submission was dead-lettered"

    def __init__(self, error: str, detail: str, status_code: int, data: dict = None) -> None:
        self.status_code = status_code
        super().__init__(detail=detail, data=data)
        self.error = error
