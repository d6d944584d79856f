"""
Module that contains the artifact index CRUD subclass.
"""
from typing import List, Optional

from sqlalchemy import func
from sqlmodel import select

from crud.base import CRUDBase
from models.artifact import ArtifactKind, DBArtifact, StoredArtifact


class CRUDArtifact(CRUDBase[DBArtifact, StoredArtifact, StoredArtifact]):
    """
    Wrapper to handle artifact index queries.
    """

    def filter(
        self,
        *,
        kind: Optional[ArtifactKind] = None,
        week_id: Optional[str] = None,
        submission_id: Optional[str] = None,
    ):
        """
        Build a query over the index ordered by creation time and key.
        """
        query = select(DBArtifact)
        if kind is not None:
            query = query.where(DBArtifact.kind == kind)
        if week_id is not None:
            query = query.where(DBArtifact.week_id == week_id)
        if submission_id is not None:
            query = query.where(DBArtifact.submission_id == submission_id)
        return query.order_by(DBArtifact.created_at, DBArtifact.key)

    def list_by(self, **filters) -> List[DBArtifact]:
        return self.get_all(self.filter(**filters))

    def count(self) -> int:
        return self.session.exec(select(func.count()).select_from(DBArtifact)).one()
