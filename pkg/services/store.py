"""
Local content-addressed artifact store.

Blobs live under ``<root>/objects/<key[:2]>/<key>`` where ``key`` is the
SHA-256 hex digest of the content. The index (kind, ACL, week, submission) is
kept in SQLite next to them. The store is append-only: putting content that
is already stored returns the existing entry and never rewrites the blob.
"""
import hashlib
import logging
import os
import threading
import zlib
from pathlib import Path
from typing import List, Optional

from sqlalchemy.engine import Engine

from crud.artifact import CRUDArtifact
from db import create_db_engine, init_db, session_scope, sqlite_url
from errors import ArtifactNotFoundError
from models.artifact import Acl, ArtifactKind, DBArtifact, StoredArtifact
from models.base import now

logger = logging.getLogger(__name__)

STORE_SCHEME = "store://"
INDEX_FILE = "index.db"
LOCK_STRIPES = 64


def content_key(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


class LockStripes:
    """
    Fixed pool of locks shared by hash of the key. Two keys may share a lock;
    the pool never grows.
    """

    def __init__(self, size: int = LOCK_STRIPES):
        self._locks = [threading.Lock() for _ in range(size)]

    def __len__(self) -> int:
        return len(self._locks)

    def __call__(self, key: str) -> threading.Lock:
        return self._locks[zlib.crc32(key.encode("utf-8")) % len(self._locks)]


class ArtifactStore:
    """
    Append-only blob store with a queryable index.

    Writes are serialized per lock stripe of the key.

    :param root: store directory, created when missing
    :type root: Path
    """

    def __init__(self, root: Path, engine: Optional[Engine] = None):
        self.root = Path(root)
        self.objects = self.root / "objects"
        self.objects.mkdir(parents=True, exist_ok=True)
        self.engine = engine or create_db_engine(sqlite_url(self.root / INDEX_FILE))
        init_db(self.engine)
        self._lock_for = LockStripes()

    def path_for(self, key: str) -> Path:
        return self.objects / key[:2] / key

    def put(
        self,
        content: bytes,
        kind: ArtifactKind,
        acl: Acl,
        *,
        week_id: Optional[str] = None,
        submission_id: Optional[str] = None,
        created_at: Optional[int] = None,
    ) -> StoredArtifact:
        """
        Store content under its hash.

        :return: index entry of the new or already stored artifact
        :rtype: StoredArtifact
        """
        key = content_key(content)
        with self._lock_for(key):
            existing = self.meta(key)
            if existing is not None:
                logger.debug("Artifact %s already stored", key)
                return existing

            path = self.path_for(key)
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(f".{key}.{threading.get_ident()}.tmp")
            tmp.write_bytes(content)
            os.replace(tmp, path)

            entry = StoredArtifact(
                key=key,
                kind=kind,
                bytes_len=len(content),
                created_at=now() if created_at is None else created_at,
                acl=acl,
                week_id=week_id,
                submission_id=submission_id,
            )
            with session_scope(self.engine) as session:
                CRUDArtifact(DBArtifact, session).create(obj_in=entry)
        logger.info("Stored %s artifact %s (%d bytes)", kind.value, key, len(content))
        return entry

    def meta(self, key: str) -> Optional[StoredArtifact]:
        with session_scope(self.engine) as session:
            row = CRUDArtifact(DBArtifact, session).get_or_none(id=key)
            return StoredArtifact.from_orm(row) if row is not None else None

    def get(self, key: str) -> bytes:
        """
        :raises ArtifactNotFoundError: nothing is stored under ``key``
        """
        if self.meta(key) is None:
            raise ArtifactNotFoundError(f"No artifact {key!r}", data={"key": key})
        return self.path_for(key).read_bytes()

    def list(
        self,
        kind: Optional[ArtifactKind] = None,
        week_id: Optional[str] = None,
        submission_id: Optional[str] = None,
    ) -> List[StoredArtifact]:
        with session_scope(self.engine) as session:
            rows = CRUDArtifact(DBArtifact, session).list_by(
                kind=kind, week_id=week_id, submission_id=submission_id
            )
            return [StoredArtifact.from_orm(row) for row in rows]

    def __len__(self) -> int:
        with session_scope(self.engine) as session:
            return CRUDArtifact(DBArtifact, session).count()

    def resolve(self, ref: str) -> bytes:
        """
        Read a payload reference: ``store://<key>`` or a filesystem path.

        :raises FileNotFoundError: path does not exist
        :raises ArtifactNotFoundError: key is not stored
        """
        if ref.startswith(STORE_SCHEME):
            return self.get(ref[len(STORE_SCHEME):])
        return Path(ref).read_bytes()
