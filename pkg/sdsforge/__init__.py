"""Diffusion-guided domain adaptation of toy style-based generators."""

from __future__ import annotations

import functools
import logging

TRACE = 5


def _install_trace_level() -> None:
    """Add a TRACE level below DEBUG to the logging module."""
    if hasattr(logging, "TRACE"):
        return
    logging.TRACE = TRACE
    logging.addLevelName(TRACE, "TRACE")

    def trace(self, msg, *args, **kwargs) -> None:
        if self.isEnabledFor(TRACE):
            self._log(TRACE, msg, args, **kwargs)

    logging.Logger.trace = trace
    logging.trace = functools.partial(logging.log, TRACE)


_install_trace_level()
