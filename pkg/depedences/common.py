"""
This module contains common dependencies for API endpoints.
For example, audience checker dependency.
"""
from typing import List, Optional

from fastapi import Request, Security
from fastapi.security import APIKeyHeader

from errors import BadRequestError, ForbiddenError
from models.artifact import Audience
from services.pipeline import Pipeline
from services.worker import SubmissionWorker

AUDIENCE_HEADER = "x-audience"


def get_pipeline(request: Request) -> Pipeline:
    return request.app.state.pipeline


def get_worker(request: Request) -> SubmissionWorker:
    return request.app.state.worker


def parse_audience(raw: Optional[str]) -> Audience:
    """
    Method to parse the audience header value.
    """
    if raw is None:
        raise ForbiddenError(f"Header {AUDIENCE_HEADER} is required")
    try:
        return Audience(raw.strip().lower())
    except ValueError:
        raise BadRequestError(
            f"Unknown audience {raw!r}",
            data={"allowed": [a.value for a in Audience]},
        )


class RequiredAudience:
    """
    Dependency injection method that checks whether the request's audience
    may call the API method. Access control only: there is no authentication.
    """

    def __init__(self, audiences: List[Audience]):
        self._audiences = audiences

    async def __call__(
        self,
        raw: Optional[str] = Security(APIKeyHeader(name=AUDIENCE_HEADER, auto_error=False)),
    ) -> Audience:
        audience = parse_audience(raw)
        if audience not in self._audiences:
            raise ForbiddenError()
        return audience
