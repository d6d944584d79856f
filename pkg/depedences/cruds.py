"""
This module contains CRUDs dependencies which create a separate database session
per request and give access to the artifact index.
"""
from typing import Iterator

from fastapi import Depends
from sqlmodel import Session

from crud.artifact import CRUDArtifact
from db import session_scope
from depedences.common import get_pipeline
from models.artifact import DBArtifact
from services.pipeline import Pipeline


def get_session(pipeline: Pipeline = Depends(get_pipeline)) -> Iterator[Session]:
    with session_scope(pipeline.store.engine) as session:
        yield session


def get_artifact_crud(session: Session = Depends(get_session)) -> CRUDArtifact:
    """
    Dependency Injection method to get Artifact CRUD wrapper for current session.

    :param session: index database session
    :type session: Session
    :return: Artifact CRUD
    :rtype: CRUDArtifact
    """
    return CRUDArtifact(DBArtifact, session=session)
