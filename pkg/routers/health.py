from fastapi import APIRouter, Depends

from depedences.common import get_pipeline, get_worker
from schema import HealthResp
from services.pipeline import Pipeline
from services.worker import SubmissionWorker

ROUTER = APIRouter(tags=["Health"])


@ROUTER.get("/healthz", summary="Liveness check", response_model=HealthResp)
def healthz(
    pipeline: Pipeline = Depends(get_pipeline),
    worker: SubmissionWorker = Depends(get_worker),
):
    return HealthResp(
        backend=pipeline.settings.backend.value,
        artifacts=len(pipeline.store),
        queued=worker.queued,
    )
