import logging
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator

from sqlalchemy.engine import Engine
from sqlmodel import Session, SQLModel, create_engine

logger = logging.getLogger(__name__)


def sqlite_url(path: Path) -> str:
    return f"sqlite:///{Path(path).resolve()}"


def create_db_engine(url: str, echo: bool = False) -> Engine:
    """
    Create an engine for the artifact index. SQLite connections are shared
    between worker threads.
    """
    connect_args = {"check_same_thread": False} if url.startswith("sqlite") else {}
    return create_engine(url, echo=echo, connect_args=connect_args)


def init_db(engine: Engine) -> None:
    """
    Method to initialize database creating missing tables if required.
    """
    # table models register themselves on import
    import models.artifact  # noqa: F401

    SQLModel.metadata.create_all(engine)
    logger.debug("Initialized index database %s", engine.url)


@contextmanager
def session_scope(engine: Engine) -> Iterator[Session]:
    """
    Method to get database session.

    :return: sqlmodel session, objects stay readable after commit
    :rtype: Session
    """
    with Session(engine, expire_on_commit=False) as session:
        yield session
