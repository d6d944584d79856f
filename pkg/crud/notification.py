from typing import List

from sqlmodel import select

from crud.base import CRUDBase
from models.artifact import DBNotification, NotificationRecord


class CRUDNotification(CRUDBase[DBNotification, NotificationRecord, NotificationRecord]):
    def for_submission(self, submission_id: str) -> List[DBNotification]:
        return self.get_all(
            select(DBNotification)
            .where(DBNotification.submission_id == submission_id)
            .order_by(DBNotification.id)
        )
