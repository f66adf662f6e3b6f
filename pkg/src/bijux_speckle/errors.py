"""Exception hierarchy and failure taxonomy for Bijux Speckle."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import ClassVar


class FailureClass(str, Enum):
    INPUT_FORMAT = "input_format"
    SHAPE = "shape"
    PARAMETER = "parameter"
    NUMERICAL = "numerical"
    CONFIGURATION = "configuration"
    STAGE = "stage"


@dataclass(frozen=True)
class FailureProfile:
    exit_code: int
    user_visible: bool
    retryable: bool


FAILURE_PROFILES: dict[FailureClass, FailureProfile] = {
    FailureClass.INPUT_FORMAT: FailureProfile(
        exit_code=3, user_visible=True, retryable=False
    ),
    FailureClass.SHAPE: FailureProfile(exit_code=3, user_visible=True, retryable=False),
    FailureClass.PARAMETER: FailureProfile(
        exit_code=3, user_visible=True, retryable=False
    ),
    FailureClass.NUMERICAL: FailureProfile(
        exit_code=3, user_visible=True, retryable=True
    ),
    FailureClass.CONFIGURATION: FailureProfile(
        exit_code=2, user_visible=True, retryable=False
    ),
    FailureClass.STAGE: FailureProfile(exit_code=3, user_visible=True, retryable=False),
}


def failure_profile_for(failure_class: FailureClass) -> FailureProfile:
    profile = FAILURE_PROFILES.get(failure_class)
    if profile is None:
        raise RuntimeError(f"Missing failure profile for {failure_class.value}")
    return profile


class SpeckleError(RuntimeError):
    """Base class for every domain error raised by the toolkit."""

    failure_class: ClassVar[FailureClass] = FailureClass.STAGE

    @property
    def exit_code(self) -> int:
        return failure_profile_for(self.failure_class).exit_code


class _FileError(SpeckleError):
    failure_class = FailureClass.INPUT_FORMAT

    def __init__(self, path: str | Path, detail: str) -> None:
        self.path = Path(path)
        self.detail = detail
        super().__init__(f"{self.path}: {detail}")


class BadMagicError(_FileError):
    def __init__(self, path: str | Path, found: int, expected: int) -> None:
        self.found = found
        self.expected = expected
        super().__init__(
            path, f"bad magic number 0x{found:08x} (expected 0x{expected:08x})"
        )


class CountMismatchError(_FileError):
    def __init__(self, path: str | Path, images: int, labels: int) -> None:
        self.images = images
        self.labels = labels
        super().__init__(path, f"{labels} labels for {images} images")


class TruncatedFileError(_FileError):
    def __init__(self, path: str | Path, expected: int, found: int) -> None:
        super().__init__(path, f"truncated: expected {expected} bytes, found {found}")


class MalformedHeaderError(_FileError):
    pass


class UnsupportedMaxvalError(_FileError):
    def __init__(self, path: str | Path, maxval: int) -> None:
        self.maxval = maxval
        super().__init__(path, f"unsupported maxval {maxval} (only 255)")


class ShapeError(SpeckleError):
    failure_class = FailureClass.SHAPE


class ZeroDimensionError(ShapeError):
    pass


class DimensionMismatchError(ShapeError):
    pass


class ShapeMismatchError(ShapeError):
    pass


class ParameterError(SpeckleError):
    failure_class = FailureClass.PARAMETER


class OrderTooLargeError(ParameterError):
    def __init__(self, order_log2: int, limit: int) -> None:
        self.order_log2 = order_log2
        super().__init__(
            f"Hadamard order 2^{order_log2} exceeds the limit 2^{limit}"
        )


class MaskEmptyError(ParameterError):
    pass


class ParamOutOfRangeError(ParameterError):
    pass


class BadParamsError(ParameterError):
    pass


class EmptyDatasetError(ParameterError):
    pass


class InsufficientLengthError(ParameterError):
    def __init__(self, test_name: str, minimum: int, found: int) -> None:
        self.test_name = test_name
        self.minimum = minimum
        super().__init__(
            f"{test_name} needs at least {minimum} bits, stream has {found}"
        )


class TestNotApplicableError(ParameterError):
    """The statistic is undefined for this particular stream."""

    __test__ = False

    def __init__(self, test_name: str, reason: str) -> None:
        self.test_name = test_name
        self.reason = reason
        super().__init__(f"{test_name} not applicable: {reason}")


class NumericalError(SpeckleError):
    failure_class = FailureClass.NUMERICAL


class NonFiniteLossError(NumericalError):
    def __init__(self, epoch: int, loss: float) -> None:
        self.epoch = epoch
        self.loss = loss
        super().__init__(f"non-finite loss {loss} at epoch {epoch}")


class DegenerateRangeError(NumericalError):
    pass


class ConfigParseError(SpeckleError):
    failure_class = FailureClass.CONFIGURATION

    def __init__(self, path: str | Path, line: int, column: int, problem: str) -> None:
        self.path = Path(path)
        self.line = line
        self.column = column
        super().__init__(f"{self.path}:{line}:{column}: {problem}")


class ConfigInvalidError(SpeckleError):
    failure_class = FailureClass.CONFIGURATION

    def __init__(self, errors: list[str]) -> None:
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


class StageFailureError(SpeckleError):
    failure_class = FailureClass.STAGE

    def __init__(self, stage: str, cause: BaseException) -> None:
        self.stage = stage
        self.cause = cause
        super().__init__(f"stage '{stage}' failed: {cause}")


if set(FAILURE_PROFILES.keys()) != set(FailureClass):
    missing = set(FailureClass) - set(FAILURE_PROFILES.keys())
    raise RuntimeError(
        "Failure profiles must cover all failure classes: "
        f"missing={sorted(cls.value for cls in missing)}"
    )
