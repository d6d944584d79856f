"""
Queue-then-process execution of submissions.

HTTP uploads and watch-folder drops are turned into submission events and put
on one asyncio queue. ``worker_limit`` consumer tasks run
:meth:`Pipeline.handle_submission` in worker threads. Stopping drains the queue
before the consumers are cancelled.
"""
import asyncio
import logging
import shutil
from pathlib import Path
from typing import List, Optional, Tuple

import anyio
from pydantic import ValidationError

from config import Settings
from errors import InvalidMetadataError, ServiceError
from models.artifact import ProcessingOutcome, SubmissionEvent, UploadMeta
from services.pipeline import Pipeline

logger = logging.getLogger(__name__)

META_SUFFIX = ".meta"
PAYLOAD_SUFFIX = ".txt"
DONE_DIR = "done"

Job = Tuple[SubmissionEvent, asyncio.Future]


def read_drop_meta(path: Path, submission_id: str) -> UploadMeta:
    """
    Parse a watch-folder ``.meta`` JSON file. The submission id is the file stem.

    :raises InvalidMetadataError: not JSON or fields are invalid
    """
    try:
        meta = UploadMeta.parse_raw(path.read_bytes())
    except ValidationError as exc:
        raise InvalidMetadataError(str(exc), data={"errors": exc.errors()})
    except ValueError as exc:
        raise InvalidMetadataError(f"Metadata is not JSON: {exc}")
    return meta.copy(update={"submission_id": submission_id})


class SubmissionWorker:
    """
    Bounded pool of submission consumers plus the watch-folder poller.
    """

    def __init__(self, pipeline: Pipeline, settings: Settings):
        self.pipeline = pipeline
        self.settings = settings
        self.queue: Optional[asyncio.Queue] = None
        self._tasks: List[asyncio.Task] = []
        self._poller: Optional[asyncio.Task] = None

    @property
    def queued(self) -> int:
        return self.queue.qsize() if self.queue is not None else 0

    async def start(self) -> None:
        self.queue = asyncio.Queue()
        self._tasks = [
            asyncio.create_task(self._consume(n)) for n in range(self.settings.worker_limit)
        ]
        if self.settings.watch_dir is not None:
            Path(self.settings.watch_dir).mkdir(parents=True, exist_ok=True)
            self._poller = asyncio.create_task(self._poll())
        logger.info(
            "Started %d workers%s",
            self.settings.worker_limit,
            f", watching {self.settings.watch_dir}" if self._poller else "",
        )

    async def stop(self) -> None:
        """
        Stop polling, finish every queued job and cancel the consumers.
        """
        if self._poller is not None:
            self._poller.cancel()
            await asyncio.gather(self._poller, return_exceptions=True)
            self._poller = None
        if self.queue is not None:
            await self.queue.join()
        for task in self._tasks:
            task.cancel()
        await asyncio.gather(*self._tasks, return_exceptions=True)
        self._tasks = []
        logger.info("Workers stopped, queue drained")

    async def enqueue(self, event: SubmissionEvent) -> asyncio.Future:
        future = asyncio.get_running_loop().create_future()
        await self.queue.put((event, future))
        return future

    async def submit(self, event: SubmissionEvent) -> ProcessingOutcome:
        """
        Enqueue a submission and wait for its outcome.

        :raises ServiceError: raised by the pipeline (duplicate submission)
        """
        future = await self.enqueue(event)
        return await asyncio.wait_for(future, timeout=self.settings.submit_timeout)

    async def _consume(self, number: int) -> None:
        while True:
            event, future = await self.queue.get()
            try:
                outcome = await anyio.to_thread.run_sync(
                    self.pipeline.handle_submission, event
                )
                if not future.done():
                    future.set_result(outcome)
            except Exception as exc:
                logger.warning("Worker %d: submission %s failed: %s", number, event.submission_id, exc)
                if not future.done():
                    future.set_exception(exc)
            finally:
                self.queue.task_done()

    async def _poll(self) -> None:
        while True:
            try:
                await self.scan_watch_dir()
            except Exception:
                logger.exception("Watch folder scan failed")
            await asyncio.sleep(self.settings.poll_interval)

    def _pairs(self) -> List[Tuple[str, Path, Path]]:
        watch = Path(self.settings.watch_dir)
        pairs = []
        for meta in sorted(watch.glob(f"*{META_SUFFIX}")):
            payload = meta.with_suffix(PAYLOAD_SUFFIX)
            if payload.exists():
                pairs.append((meta.stem, meta, payload))
        return pairs

    def _archive(self, *paths: Path) -> None:
        done = Path(self.settings.watch_dir) / DONE_DIR
        done.mkdir(exist_ok=True)
        for path in paths:
            shutil.move(str(path), str(done / path.name))

    async def scan_watch_dir(self) -> List[ProcessingOutcome]:
        """
        Process every complete ``{submission_id}.meta`` + ``{submission_id}.txt``
        pair of the watch folder and move it to ``done/``.
        """
        outcomes = []
        for submission_id, meta_path, payload_path in self._pairs():
            try:
                meta = read_drop_meta(meta_path, submission_id)
                event = await anyio.to_thread.run_sync(
                    self.pipeline.event_from_upload, meta, payload_path.read_bytes()
                )
                outcomes.append(await self.submit(event))
            except ServiceError as exc:
                await anyio.to_thread.run_sync(
                    self.pipeline.reject_upload, submission_id, str(payload_path), exc
                )
            self._archive(meta_path, payload_path)
            logger.info("Processed dropped submission %s", submission_id)
        return outcomes
