"""Error taxonomy shared by the library, the service, and the CLI.

Every error carries a short machine-parseable code; the CLI prints it as
``ERROR <code>: <message>`` and the service returns it in the JSON error
payload.
"""


class DamtevalError(Exception):
    """Base class for all toolkit errors."""

    code = "INTERNAL"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class DegenerateEmbedding(DamtevalError):
    """A token embedding is unusable (zero vector or non-finite values)."""

    code = "DEGENERATE_EMBEDDING"


class DimensionMismatch(DamtevalError):
    """Embeddings with different dimensionality were combined."""

    code = "DIMENSION_MISMATCH"


class EmptySystemSet(DamtevalError):
    """Difficulty requested over zero systems."""

    code = "EMPTY_SYSTEM_SET"


class EmptyCorpus(DamtevalError):
    """An aggregate was requested over zero segments."""

    code = "EMPTY_CORPUS"


class AlignmentError(DamtevalError):
    """Parallel files disagree on segment counts."""

    code = "ALIGNMENT"


class ConfigError(DamtevalError):
    """Inconsistent or invalid run configuration."""

    code = "CONFIG"


class ParseError(DamtevalError):
    """A text input could not be parsed."""

    code = "PARSE"


class FormatError(DamtevalError):
    """A binary embedding file is malformed."""

    code = "FORMAT"


class CoverageError(DamtevalError):
    """An embedding file does not cover every corpus segment."""

    code = "COVERAGE"


class UndefinedCorrelation(DamtevalError):
    """The requested correlation statistic is undefined for the input."""

    code = "UNDEFINED_CORRELATION"


class InsufficientSystems(DamtevalError):
    """A top-K selection would leave fewer than two systems."""

    code = "INSUFFICIENT_SYSTEMS"
