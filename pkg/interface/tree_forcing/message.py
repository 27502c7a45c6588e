#
# This file is part of TEN Framework, an open source project.
# Licensed under the Apache License, Version 2.0.
# See the LICENSE file for more information.
#
from enum import IntEnum
from typing import Any

from pydantic import BaseModel

from .const import EXIT_BUDGET_EXCEEDED, EXIT_INPUT_ERROR, EXIT_NEGATIVE, EXIT_OK


class ErrorCode(IntEnum):
    OK = EXIT_OK
    INPUT = EXIT_INPUT_ERROR  # malformed input or violated precondition
    BUDGET = EXIT_BUDGET_EXCEEDED  # search budget exhausted
    NEGATIVE = EXIT_NEGATIVE  # mathematically negative or undecided outcome


class ErrorReport(BaseModel):
    code: int = 0
    kind: str = ""
    message: str = ""
    metadata: dict[str, Any] = {}


class TreeForcingError(Exception):
    code: ErrorCode = ErrorCode.NEGATIVE

    def __init__(self, message: str, **metadata: Any) -> None:
        super().__init__(message)
        self.message = message
        self.metadata = metadata

    @property
    def report(self) -> ErrorReport:
        return ErrorReport(
            code=int(self.code),
            kind=type(self).__name__,
            message=self.message,
            metadata=self.metadata,
        )

    def __str__(self) -> str:
        if not self.metadata:
            return f"{type(self).__name__}: {self.message}"
        return f"{type(self).__name__}: {self.message} ({self.metadata})"


class PreconditionError(TreeForcingError, ValueError):
    code = ErrorCode.INPUT


class EmptyInputError(PreconditionError):
    def __init__(self, message: str = "empty input", **metadata: Any) -> None:
        super().__init__(message, **metadata)


class MalformedInputError(TreeForcingError, ValueError):
    code = ErrorCode.INPUT


class BudgetExceededError(TreeForcingError):
    """Raised when a bounded search runs out of budget.

    The metadata carries whatever the search knew when it stopped: best
    bounds for colorings, the partial ladder for tree builders, the
    exhausted depth for splitting-node searches.
    """

    code = ErrorCode.BUDGET


class CertificateViolationError(TreeForcingError):
    def __init__(self, index: int, message: str = "") -> None:
        super().__init__(
            message or f"fusion certificate fails at index {index}", index=index
        )
        self.index = index


class RefuterFailureError(TreeForcingError):
    pass


class DensityFailureError(TreeForcingError):
    pass


class FatnessMissingError(TreeForcingError):
    def __init__(self, s: str, t: str, message: str = "") -> None:
        super().__init__(
            message or f"no fatness witness for node {s!r} and shift {t!r}",
            s=s,
            t=t,
        )
        self.s = s
        self.t = t


class NotFoundError(TreeForcingError):
    pass
