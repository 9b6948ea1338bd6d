"""Exception types shared across the package.

Every error raised on bad user input derives from :class:`ValidationError`
so callers (and the CLI) can map the whole family to a single exit code.
"""


class CubeRecError(Exception):
    """Base class for all package-specific errors."""

    code = "E_INTERNAL"


class ValidationError(CubeRecError, ValueError):
    """Invalid argument, malformed input file, or violated precondition."""

    code = "E_DOMAIN"


class DimensionMismatchError(ValidationError):
    """Vectors of different dimensions were combined."""

    code = "E_DIMENSION"


class CapacityError(ValidationError):
    """A request exceeds an enforced size cap (e.g. exhaustive enumeration)."""

    code = "E_CAPACITY"


class DatasetFormatError(ValidationError):
    """A dataset / predictions file failed schema validation.

    ``context`` carries the offending field, item id, or row number.
    """

    code = "E_DATA_FORMAT"

    def __init__(self, message, context=None):
        self.context = context
        super().__init__(message if context is None
                         else f"{message} ({context})")


class CoverageError(ValidationError):
    """A predictions file does not cover every required (fold, item) pair."""

    code = "E_COVERAGE"
