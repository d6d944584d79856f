from typing import Optional

from fastapi import APIRouter, Depends
from fastapi_pagination import Page, Params
from starlette.responses import Response

from crud.artifact import CRUDArtifact
from depedences.common import RequiredAudience, get_pipeline
from depedences.cruds import get_artifact_crud
from errors import ForbiddenError
from models.artifact import ArtifactKind, Audience, StoredArtifact
from schema import AggregationResp
from services.pipeline import Pipeline

ROUTER = APIRouter(tags=["Report"])

HTML_KINDS = (ArtifactKind.report, ArtifactKind.class_report)
HTML_MEDIA_TYPE = "text/html; charset=utf-8"


@ROUTER.get(
    "/reports/{key}",
    summary="Read a stored artifact",
    description="Feedback documents are returned as HTML, everything else as JSON",
)
def read_report(
    key: str,
    audience: Audience = Depends(RequiredAudience([Audience.student, Audience.instructor])),
    pipeline: Pipeline = Depends(get_pipeline),
):
    """
    API method to read one artifact by its content key.
    The artifact ACL must allow the requesting audience.

    :param key: SHA-256 content key
    :type key: str
    """
    content = pipeline.store.get(key)
    meta = pipeline.store.meta(key)
    if not audience.can_read(meta.acl):
        raise ForbiddenError(
            f"Artifact is not readable by {audience.value}",
            data={"key": key, "acl": meta.acl.value},
        )
    media_type = HTML_MEDIA_TYPE if meta.kind in HTML_KINDS else "application/json"
    return Response(content=content, media_type=media_type)


@ROUTER.get(
    "/artifacts",
    summary="List stored artifacts",
    response_model=Page[StoredArtifact],
)
def list_artifacts(
    kind: Optional[ArtifactKind] = None,
    week_id: Optional[str] = None,
    params: Params = Depends(),
    _: Audience = Depends(RequiredAudience([Audience.instructor])),
    artifact_crud: CRUDArtifact = Depends(get_artifact_crud),
):
    return artifact_crud.get_list(params=params, query=artifact_crud.filter(kind=kind, week_id=week_id))


@ROUTER.post(
    "/aggregations/{week_id}",
    summary="Aggregate a week",
    description="Renders and stores the class document of every stored report of the week",
    response_model=AggregationResp,
)
def aggregate_week(
    week_id: str,
    _: Audience = Depends(RequiredAudience([Audience.instructor])),
    pipeline: Pipeline = Depends(get_pipeline),
):
    key = pipeline.run_class_aggregation(week_id)
    return AggregationResp(week_id=week_id, class_report_key=key)
