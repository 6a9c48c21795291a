"""Exception hierarchy shared by every featbench package"""
from typing import Optional


class FeatBenchError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(FeatBenchError, ValueError):
    """A numeric parameter is outside its admissible range."""


class OutOfBoundsError(FeatBenchError):
    """A pixel access or support window leaves the image."""


class DegenerateDescriptorError(FeatBenchError):
    """The patch carries no usable signal for a float descriptor."""


class IncompatibleDescriptorError(FeatBenchError):
    """Descriptors of different kinds or dimensions were compared."""


class InsufficientTrainSetError(FeatBenchError):
    """kNN matching needs at least two train descriptors."""


class ProjectionError(FeatBenchError):
    """A point was mapped to infinity by a homography."""


class InvalidInputError(FeatBenchError):
    """Malformed caller input (indices, manifest rows, file contents)."""


class ConfigError(FeatBenchError):
    """Configuration file or environment failed validation."""


class DatasetNotFoundError(FeatBenchError):
    """The ALOI loader found nothing to pair."""


class BenchmarkFailedError(FeatBenchError):
    """More than half of the benchmark cells failed."""

    def __init__(self, failed: int, total: int):
        super().__init__(f"{failed} of {total} benchmark cells failed")
        self.failed = failed
        self.total = total


class ImageLoadError(FeatBenchError):
    """An image or homography file could not be decoded."""

    def __init__(self, path: str, reason: str, offset: Optional[int] = None):
        where = f" at byte {offset}" if offset is not None else ""
        super().__init__(f"{path}{where}: {reason}")
        self.path = path
        self.offset = offset
        self.reason = reason
