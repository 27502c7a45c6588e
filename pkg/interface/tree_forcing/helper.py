#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
import logging
import time
from typing import Optional, Protocol


class Logger(Protocol):
    def log_debug(self, msg: str) -> None: ...

    def log_info(self, msg: str, category: Optional[str] = None) -> None: ...

    def log_error(self, msg: str) -> None: ...


class StdLogger:
    """Adapts a standard library logger to the Logger protocol."""

    def __init__(self, name: str = "tree_forcing"):
        self._logger = logging.getLogger(name)

    def log_debug(self, msg: str) -> None:
        self._logger.debug(msg)

    def log_info(self, msg: str, category: Optional[str] = None) -> None:
        if category:
            self._logger.info("[%s] %s", category, msg)
        else:
            self._logger.info(msg)

    def log_error(self, msg: str) -> None:
        self._logger.error(msg)


class TimeHelper:
    """
    A helper class for time calculations.

    Used by the CLI to stamp verification transcripts with elapsed times.
    """

    @classmethod
    def duration_ms(cls, start: float, end: float) -> int:
        return int((end - start) * 1000)

    @classmethod
    def duration_ms_since(cls, start: float) -> int:
        return cls.duration_ms(start, time.time())
