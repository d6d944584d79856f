"""
Remote evaluator: asks a chat-completion endpoint for an assessment/v1 object
and validates the answer strictly. Invalid answers are re-prompted with the
validation errors and never repaired locally.
"""
import json
import logging
import os
import threading
from typing import List, Optional, Tuple

import httpx
from tenacity import Retrying, retry_if_exception_type, stop_after_attempt, wait_exponential

from errors import (
    AssessmentSchemaError,
    RemoteAuthError,
    RemoteUnavailableError,
    WeekMismatchError,
)
from models.assessment import AssessmentSet, Backend, RemoteBackendConfig
from models.curriculum import Subtopic
from models.transcript import Transcript
from services.evaluator.prompts import (
    CORRECTIVE_PROMPT,
    DEFAULT_RUBRIC_PROMPT,
    build_user_message,
)
from services.evaluator.schema import (
    assessment_from_document,
    invariant_errors,
    schema_errors,
)

logger = logging.getLogger(__name__)


class _TransientError(Exception):
    """Network failure, timeout or 5xx answer worth another attempt."""


class RemoteEvaluator:
    """
    Client of a chat-completion style evaluation endpoint.

    One instance bounds its concurrent requests by ``cfg.max_in_flight`` and can
    be shared by the pipeline workers.
    """

    def __init__(
        self,
        cfg: RemoteBackendConfig,
        transport: Optional[httpx.BaseTransport] = None,
    ):
        self.cfg = cfg
        self._transport = transport
        self._in_flight = threading.BoundedSemaphore(cfg.max_in_flight)

    def _token(self) -> str:
        token = os.environ.get(self.cfg.auth_token_env_var)
        if not token:
            raise RemoteAuthError(
                f"Environment variable {self.cfg.auth_token_env_var} is not set",
                data={"env_var": self.cfg.auth_token_env_var},
            )
        return token

    def _post(self, client: httpx.Client, token: str, messages: List[dict]) -> httpx.Response:
        payload = {
            "model": self.cfg.model_name,
            "messages": messages,
            "temperature": 0,
            "response_format": {"type": "json_object"},
        }
        try:
            response = client.post(
                self.cfg.endpoint_url,
                json=payload,
                headers={"Authorization": f"Bearer {token}"},
            )
        except httpx.TimeoutException as exc:
            raise _TransientError(f"timeout after {self.cfg.timeout}s: {exc}")
        except httpx.TransportError as exc:
            raise _TransientError(f"transport error: {exc}")

        if response.status_code in (401, 403):
            raise RemoteAuthError(
                f"Endpoint answered HTTP {response.status_code}",
                data={"status": response.status_code},
            )
        if response.status_code == 429 or response.status_code >= 500:
            raise _TransientError(f"endpoint answered HTTP {response.status_code}")
        if response.status_code >= 400:
            raise RemoteUnavailableError(
                f"Endpoint rejected the request with HTTP {response.status_code}",
                data={"status": response.status_code, "body": response.text[:2000]},
            )
        return response

    def _complete(self, client: httpx.Client, token: str, messages: List[dict]) -> str:
        retrying = Retrying(
            retry=retry_if_exception_type(_TransientError),
            stop=stop_after_attempt(self.cfg.max_retries + 1),
            wait=wait_exponential(multiplier=self.cfg.retry_backoff, max=8),
            reraise=True,
        )
        try:
            for attempt in retrying:
                with attempt:
                    response = self._post(client, token, messages)
        except _TransientError as exc:
            raise RemoteUnavailableError(str(exc), data={"endpoint": self.cfg.endpoint_url})

        try:
            return response.json()["choices"][0]["message"]["content"]
        except (ValueError, KeyError, IndexError, TypeError):
            # not a chat-completion envelope; validated as-is below
            return response.text

    def _validate(
        self, raw: str, transcript: Transcript, subtopics: List[Subtopic]
    ) -> Tuple[List[str], Optional[AssessmentSet]]:
        if not isinstance(raw, str):
            return ["response content is not a string"], None
        try:
            doc = json.loads(raw)
        except json.JSONDecodeError as exc:
            return [f"response is not exactly one JSON object: {exc.msg}"], None
        errors = schema_errors(doc)
        if errors:
            return errors, None
        errors = invariant_errors(doc, transcript, subtopics, Backend.remote)
        if errors:
            return errors, None
        return [], assessment_from_document(doc)

    def evaluate(
        self,
        transcript: Transcript,
        subtopics: List[Subtopic],
        rubric_prompt: str = DEFAULT_RUBRIC_PROMPT,
        *,
        week_id: Optional[str] = None,
    ) -> AssessmentSet:
        """
        Evaluate one transcript remotely.

        :param transcript: transcript to assess
        :type transcript: Transcript
        :param subtopics: subtopics of the transcript's week
        :type subtopics: list[Subtopic]
        :param rubric_prompt: system message of the request
        :type rubric_prompt: str
        :return: validated assessment
        :rtype: AssessmentSet
        :raises RemoteUnavailableError: network failure or timeout after retries
        :raises RemoteAuthError: token missing or rejected
        :raises AssessmentSchemaError: no valid answer after ``max_retries`` re-prompts
        """
        if week_id is not None and week_id != transcript.week_id:
            raise WeekMismatchError(
                f"Transcript is for week {transcript.week_id!r}, subtopics for {week_id!r}",
                data={"transcript_week": transcript.week_id, "week_id": week_id},
            )
        token = self._token()
        messages = [
            {"role": "system", "content": rubric_prompt},
            {"role": "user", "content": build_user_message(transcript, subtopics)},
        ]
        raw, errors = "", []
        attempts = self.cfg.max_retries + 1
        with self._in_flight, httpx.Client(
            timeout=self.cfg.timeout, transport=self._transport
        ) as client:
            for attempt in range(1, attempts + 1):
                raw = self._complete(client, token, messages)
                errors, assessment = self._validate(raw, transcript, subtopics)
                if assessment is not None:
                    logger.info(
                        "Remote assessment of %s accepted on attempt %d/%d",
                        transcript.submission_id,
                        attempt,
                        attempts,
                    )
                    return assessment
                logger.warning(
                    "Remote assessment of %s rejected (%d/%d): %s",
                    transcript.submission_id,
                    attempt,
                    attempts,
                    "; ".join(errors[:5]),
                )
                messages = messages + [
                    {"role": "assistant", "content": raw if isinstance(raw, str) else str(raw)},
                    {
                        "role": "user",
                        "content": CORRECTIVE_PROMPT.format(errors="\n".join(errors)),
                    },
                ]
        raise AssessmentSchemaError(
            f"No valid assessment for {transcript.submission_id!r} after {attempts} attempts",
            data={"last_response": raw, "errors": errors, "attempts": attempts},
        )


def evaluate_remote(
    transcript: Transcript,
    subtopics: List[Subtopic],
    cfg: RemoteBackendConfig,
    rubric_prompt: str = DEFAULT_RUBRIC_PROMPT,
    *,
    week_id: Optional[str] = None,
    transport: Optional[httpx.BaseTransport] = None,
) -> AssessmentSet:
    return RemoteEvaluator(cfg, transport=transport).evaluate(
        transcript, subtopics, rubric_prompt, week_id=week_id
    )
