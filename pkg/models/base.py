"""
This module contains helper models which is used for inheritance purposes.
"""
import time
from typing import Optional

from sqlmodel import Field, SQLModel


def now() -> int:
    return int(time.time())


class IntIdModel(SQLModel):
    """
    Model containing an auto-increment integer identifier.
    This class is used in inheritance to add identifier to database model.
    """

    id: Optional[int] = Field(default=None, primary_key=True, index=True)


class CreatedAtModel(SQLModel):
    """
    Model containing the creation time in UTC seconds.
    """

    created_at: int = Field(default_factory=now, nullable=False)
