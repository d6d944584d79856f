"""
Module that contains the submission ledger CRUD subclass.
"""
from crud.base import CRUDBase
from models.artifact import DBSubmission, SubmissionRecord, SubmissionUpdate


class CRUDSubmission(CRUDBase[DBSubmission, SubmissionRecord, SubmissionUpdate]):
    """
    Wrapper to handle the submission ledger.
    """
