"""
Application factory of the engagement analytics service.

Run with ``uvicorn main:create_app --factory``.
"""
import logging
from contextlib import asynccontextmanager
from typing import Optional

from fastapi import FastAPI

from config import Settings, get_settings
from errors import ApiError, ServiceError, api_error_handler, service_error_handler
from routers import health, reports, submissions
from services.pipeline import Pipeline
from services.worker import SubmissionWorker

logger = logging.getLogger(__name__)


def create_app(
    settings: Optional[Settings] = None, *, pipeline: Optional[Pipeline] = None
) -> FastAPI:
    """
    Build the HTTP service. The pipeline and the worker pool live for the
    lifespan of the application; shutdown drains the queue.

    :param settings: service settings, environment by default
    :type settings: Settings | None
    :param pipeline: prebuilt pipeline, built from ``settings`` when absent
    :type pipeline: Pipeline | None
    """
    settings = settings or get_settings()

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        app.state.pipeline = pipeline or Pipeline.from_settings(settings)
        app.state.worker = SubmissionWorker(app.state.pipeline, settings)
        await app.state.worker.start()
        logger.info("Serving with %s backend", settings.backend.value)
        yield
        await app.state.worker.stop()

    app = FastAPI(title="Engagement Analytics Service", version="0.1.0", lifespan=lifespan)
    app.add_exception_handler(ApiError, api_error_handler)
    app.add_exception_handler(ServiceError, service_error_handler)
    app.include_router(submissions.ROUTER)
    app.include_router(reports.ROUTER)
    app.include_router(health.ROUTER)
    return app
