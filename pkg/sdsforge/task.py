"""Utility functions for running independent jobs on a thread pool.

Functions:
    handle_exception: A callback attached to futures that logs any exception
        other than cancellation and cancels the sibling jobs still queued.
    create_task: Submit a job to an executor with the exception handler.
"""

from __future__ import annotations

from concurrent import futures
from typing import Any, Callable, Optional
import functools
import logging

__all__ = (
    "create_task",
    "handle_exception",
)


def handle_exception(future: futures.Future, siblings: Optional[list[futures.Future]] = None) -> None:
    """Handle any exceptions that occur in jobs.

    Log all errors and cancel the queued siblings when any exception other
    than cancellation is raised.

    Args:
        future: The finished job.
        siblings: Jobs to cancel when this one failed.
    """
    if future.cancelled():
        return
    e = future.exception()
    if e is None:
        return
    name = getattr(future, "name", "job")
    if logging.getLogger().level <= logging.DEBUG:
        logging.error("Exception raised by %s", name, exc_info=e)
    else:
        logging.error("%s: %s", name, e)
    for sibling in siblings or ():
        if sibling is not future:
            sibling.cancel()


def create_task(
    executor: futures.Executor,
    fn: Callable[..., Any],
    *args: Any,
    name: Optional[str] = None,
    siblings: Optional[list[futures.Future]] = None,
) -> futures.Future:
    """Submit a job and add an exception handler.

    Args:
        executor: The executor to run the job on.
        fn: The callable to run with `args`.
        name: A name used in log messages.
        siblings: A list the future is appended to; all of its members are
            cancelled if this job fails.

    Returns: The future, carrying `name` as an attribute.
    """
    future = executor.submit(fn, *args)
    future.name = name or getattr(fn, "__name__", "job")
    if siblings is not None:
        siblings.append(future)
    future.add_done_callback(functools.partial(handle_exception, siblings=siblings))
    return future
