"""Exception types shared across the package."""


class HashbridgeError(Exception):
    """Base class for all package-specific errors."""


class AllRecordsInvalid(HashbridgeError):
    """No line of an input file could be parsed into a valid item."""


class SchemaViolation(HashbridgeError):
    """A single record is malformed (missing field, wrong type, bad value)."""


class EmptyVocabulary(HashbridgeError):
    """No token survived stopword and frequency filtering."""


class TooFewDocuments(HashbridgeError):
    """Topic model fitting needs at least two non-empty documents."""


class UnknownItem(HashbridgeError):
    """A profile references an item that was not modeled."""


class ParseError(HashbridgeError):
    """A structured input file has an invalid line; carries the line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NonConvergence(HashbridgeError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class SingularSystem(HashbridgeError):
    """A linear system that should be invertible is numerically singular."""


class InfeasibleConfig(HashbridgeError):
    """Requested cluster counts exceed the matrix dimensions."""


class EmptyCluster(HashbridgeError):
    """A cluster referenced by a ranking operation contains no members."""


class DuplicateElements(HashbridgeError):
    """A ranked list contains the same element twice."""


class ZeroVariance(HashbridgeError):
    """Correlation is undefined for a constant sequence."""


class EmptyList(HashbridgeError):
    """An operation received an empty list where elements are required."""


class StageError(HashbridgeError):
    """Wraps a pipeline stage failure with the stage name for diagnostics."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {cause}")
        self.stage = stage
        self.cause = cause
