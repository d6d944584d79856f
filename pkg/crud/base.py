from typing import Any, Dict, Generic, List, Optional, Type, TypeVar, Union

from fastapi_pagination import Page, Params
from fastapi_pagination.ext.sqlmodel import paginate
from pydantic import BaseModel
from sqlalchemy import exc
from sqlmodel import Session, SQLModel, select
from sqlmodel.sql.expression import Select

from errors import ConflictError, NotFoundError

ModelType = TypeVar("ModelType", bound=SQLModel)
CreateSchemaType = TypeVar("CreateSchemaType", bound=BaseModel)
UpdateSchemaType = TypeVar("UpdateSchemaType", bound=BaseModel)


class CRUDBase(Generic[ModelType, CreateSchemaType, UpdateSchemaType]):
    """
    Base Create Read Update (CRUD) wrapper to handle typical
    Object-Relational Mapping operations of the index tables.
    Nothing is ever deleted: the store and the ledger are append-only.
    """

    def __init__(self, model: Type[ModelType], session: Session):
        """
        Initialization of CRUD.

        :param model: SQLModel object model
        :type model: ModelType
        :param session: SQLModel session
        :type session: Session
        """
        self.model = model
        self.session = session

    def get_or_none(self, *, id: Union[int, str]) -> Optional[ModelType]:
        return self.session.get(self.model, id)

    def get(self, *, id: Union[int, str]) -> ModelType:
        """
        Method to get object from database by primary key.

        :param id: primary key
        :type id: int | str
        :return: python object of database entry
        :rtype: ModelType
        :raises NotFoundError: no such entry
        """
        obj = self.get_or_none(id=id)
        if obj is None:
            raise NotFoundError(f"Object {id} of class {self.model.__name__} not found")
        return obj

    def get_all(self, query: Optional[Select] = None) -> List[ModelType]:
        if query is None:
            query = select(self.model)
        return list(self.session.exec(query).all())

    def get_list(
        self,
        *,
        params: Params = Params(),
        query: Optional[Select] = None,
    ) -> Page[ModelType]:
        """
        Method to get a page of database objects filtered by a query.
        Offset and limit are applied by the database.

        :param params: page number and size
        :type params: Params
        :param query: filter query, all rows by default
        :type query: Select | None
        :return: page of objects
        :rtype: Page
        """
        if query is None:
            query = select(self.model)
        return paginate(self.session, query, params)

    def create(self, *, obj_in: Union[CreateSchemaType, ModelType]) -> ModelType:
        """
        Method to create new object in database.

        :param obj_in: object containing data to create database entry
        :type obj_in: CreateSchemaType | ModelType
        :return: created object
        :rtype: ModelType
        :raises ConflictError: primary key is already taken
        """
        db_obj = self.model.from_orm(obj_in)  # type: ignore
        try:
            self.session.add(db_obj)
            self.session.commit()
        except exc.IntegrityError:
            self.session.rollback()
            raise ConflictError(f"{self.model.__name__} already exists")
        self.session.refresh(db_obj)
        return db_obj

    def update(
        self,
        *,
        obj_id: Union[int, str],
        obj_new: Union[UpdateSchemaType, Dict[str, Any]],
    ) -> ModelType:
        """
        Method to update database entry.

        :param obj_id: primary key of modified object
        :type obj_id: int | str
        :param obj_new: object containing data to update database entry
        :type obj_new: UpdateSchemaType | dict
        :return: updated object
        :rtype: ModelType
        """
        obj = self.get(id=obj_id)
        values = obj_new if isinstance(obj_new, dict) else obj_new.dict(exclude_unset=True)

        for k, v in values.items():
            setattr(obj, k, v)

        self.session.add(obj)
        self.session.commit()
        self.session.refresh(obj)
        return obj
