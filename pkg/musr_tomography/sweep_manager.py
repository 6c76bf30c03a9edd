import asyncio
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from typing import Any, Callable, Sequence

from musr_tomography.errors import IncompleteSweepError, TomographyError

logger = logging.getLogger(__name__)

# seconds
DEFAULT_TIMEOUT = 600


class EntryStatus(Enum):
    FINISHED = "finished"
    FAILED = "failed"
    TIMEOUT = "timeout"
    CANCELLED = "cancelled"


@dataclass
class SweepEntry:
    """One independent job of a sweep, e.g. the evolution at one field value."""

    label: str
    job: Callable[[], Any]


@dataclass
class SweepResult:
    label: str
    status: EntryStatus
    value: Any = None
    error: TomographyError | None = None


class SweepManager:
    """Runs sweep entries as concurrent asyncio tasks on a private thread pool."""

    def __init__(self, timeout: float = DEFAULT_TIMEOUT, fail_fast: bool = True):
        """Constructor

        Args:
            timeout (float, optional): Seconds to wait for the whole sweep. Defaults to 600.
            fail_fast (bool, optional): Cancel pending entries once one fails. Defaults to True.
        """
        if timeout <= 0:
            raise ValueError("timeout must be positive")
        self.__timeout = timeout
        self.__fail_fast = fail_fast

    async def run(self, entries: Sequence[SweepEntry]) -> list[SweepResult]:
        """Run every entry and return one result per entry, in entry order.

        Entries still running when the timeout expires, or when an entry fails and
        fail_fast is set, are cancelled and reported as such. Queued jobs never start;
        a job already running in a worker thread is not interrupted and finishes in the
        background, but run returns without waiting for it.
        """
        loop = asyncio.get_running_loop()
        executor = ThreadPoolExecutor(thread_name_prefix="sweep")

        async def entry_task(entry: SweepEntry):
            return await loop.run_in_executor(executor, entry.job)

        async def timeout_task(timeout: float):
            await asyncio.sleep(timeout)

        tasks = {asyncio.create_task(entry_task(entry)): index for index, entry in enumerate(entries)}
        timer = asyncio.create_task(timeout_task(self.timeout))
        results: list[SweepResult | None] = [None] * len(entries)
        pending = set(tasks)

        try:
            while pending:
                done, pending = await asyncio.wait(pending | {timer}, return_when=asyncio.FIRST_COMPLETED)
                pending.discard(timer)
                stop = None

                for task in done:
                    if task is timer:
                        stop = EntryStatus.TIMEOUT
                        continue
                    entry = entries[tasks[task]]
                    error = task.exception()
                    if error is None:
                        results[tasks[task]] = SweepResult(entry.label, EntryStatus.FINISHED, task.result())
                        logger.info(f"[Sweep Manager]: entry {entry.label} finished")
                    elif isinstance(error, TomographyError):
                        results[tasks[task]] = SweepResult(entry.label, EntryStatus.FAILED, error=error)
                        logger.warning(f"[Sweep Manager]: entry {entry.label} failed: {error}")
                        if self.__fail_fast:
                            stop = stop or EntryStatus.CANCELLED
                    else:
                        raise error

                if stop is not None and pending:
                    logger.warning(f"[Sweep Manager]: cancelling {len(pending)} pending entries ({stop.value})")
                    for task in pending:
                        task.cancel()
                        results[tasks[task]] = SweepResult(entries[tasks[task]].label, stop)
                    break
        finally:
            timer.cancel()
            for task in tasks:
                if not task.done():
                    task.cancel()
            executor.shutdown(wait=False, cancel_futures=True)

        return results

    def run_sync(self, entries: Sequence[SweepEntry]) -> list[SweepResult]:
        return asyncio.run(self.run(entries))

    @property
    def timeout(self) -> float:
        return self.__timeout


def first_failure(results: Sequence[SweepResult]) -> TomographyError | None:
    """The first entry error, else an IncompleteSweepError for the first unfinished entry."""
    for result in results:
        if result.error is not None:
            return result.error
    for result in results:
        if result.status is not EntryStatus.FINISHED:
            return IncompleteSweepError(f"sweep entry {result.label} did not finish ({result.status.value})")
    return None
