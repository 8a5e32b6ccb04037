"""Exception hierarchy shared by the library and the CLI.

Library code raises these; only ``app.main`` turns them into process exit codes.
"""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERIC = 3


class NlrmError(Exception):
    """Base class for all errors raised by the pipeline."""

    exit_code: int = EXIT_DATA


class ConfigurationError(NlrmError, ValueError):
    """Invalid or pathological configuration (usage error)."""

    exit_code = EXIT_USAGE


class DataError(NlrmError):
    """Input data is malformed, inconsistent, or cannot be processed."""

    exit_code = EXIT_DATA


class ShapeMismatchError(DataError, ValueError):
    """Array shapes or grids do not agree."""


class DegenerateRangeError(DataError, ValueError):
    """Min-max normalization of constant data."""

    def __init__(self, message: str = "degenerate range") -> None:
        super().__init__(message)


class BadMagicError(DataError):
    """File does not start with the expected magic bytes."""


class VersionMismatchError(DataError):
    """File format version is not supported."""


class TruncatedRecordError(DataError):
    """A dataset record ends before its declared size."""

    def __init__(self, index: int, message: str | None = None) -> None:
        self.index = index
        super().__init__(message or f"truncated record at index {index}")


class WeightFormatError(DataError):
    """Weight file layer table is inconsistent with its payload."""

    def __init__(self, message: str, layer_index: int | None = None) -> None:
        self.layer_index = layer_index
        if layer_index is not None:
            message = f"layer {layer_index}: {message}"
        super().__init__(message)


class OrderMismatchError(DataError):
    """Network order tag does not match the dataset or pipeline order."""


class CalibrationError(DataError):
    """Mirror signals cannot produce a valid calibration."""


class PeakNotFoundError(DataError, ValueError):
    """No half-maximum crossing on one side of a peak."""


class NumericError(NlrmError):
    """Numeric failure during computation."""

    exit_code = EXIT_NUMERIC


class NonFiniteError(NumericError, ValueError):
    """NaN or infinite values where finite values are required."""


class TrainingDivergedError(NumericError):
    """Loss became NaN during training."""
