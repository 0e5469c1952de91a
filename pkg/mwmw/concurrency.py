"""Run independent report rows on worker threads with a shared progress bar."""

from __future__ import annotations

import asyncio
import logging
from typing import Callable, List, Sequence, TypeVar, Union

from tqdm import tqdm


T = TypeVar("T")
R = TypeVar("R")


async def _worker(fn: Callable[[T], R], item: T, gate: asyncio.Semaphore, bar: tqdm) -> R:
    async with gate:
        try:
            return await asyncio.to_thread(fn, item)
        except Exception:
            logging.exception("Row failed for %r", item)
            raise
        finally:
            bar.update(1)


async def gather_rows(
    fn: Callable[[T], R], items: Sequence[T], threads: int = 1, desc: str = "Rows", progress: bool = False
) -> List[Union[R, BaseException]]:
    """Apply ``fn`` to every item, at most ``threads`` at a time.

    Results keep the order of ``items``; a failing row yields its exception.
    """
    gate = asyncio.Semaphore(max(1, int(threads)))
    with tqdm(total=len(items), desc=desc, disable=not progress, leave=True) as bar:
        tasks = [_worker(fn, item, gate, bar) for item in items]
        return await asyncio.gather(*tasks, return_exceptions=True)


def run_rows(
    fn: Callable[[T], R], items: Sequence[T], threads: int = 1, desc: str = "Rows", progress: bool = False
) -> List[Union[R, BaseException]]:
    """Synchronous entry point of :func:`gather_rows`."""
    return asyncio.run(gather_rows(fn, items, threads=threads, desc=desc, progress=progress))
