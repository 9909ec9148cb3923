"""Exception hierarchy shared by the backends, the simulator and the probes."""


class PuwError(Exception):
    """Base class for every error raised by puwbench."""


class EmptySupply(PuwError):
    """No admissible instance in the task supply state."""


class UnknownClass(PuwError):
    """Task class is not one of the registered backends."""


class ClassMismatch(PuwError):
    """A proof was checked against a task of a different class."""


class MissingTransform(PuwError):
    """Reconstruct needs the inverse transform record for this backend."""


class DimensionMismatch(PuwError, ValueError):
    """Instances cannot be combined or split with the requested shape."""


class TooLarge(PuwError, ValueError):
    """Instance exceeds the size an exhaustive oracle accepts."""


class InsufficientData(PuwError):
    """A probe was given fewer samples than its precondition requires."""


class UnknownParent(PuwError):
    """Block references a parent the local chain has not seen yet."""


class InvalidProof(PuwError):
    """Block failed validation."""


class ScenarioError(PuwError, ValueError):
    """Malformed scenario file; carries the offending line number."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class TsplibError(PuwError, ValueError):
    """Malformed or unsupported TSPLIB input."""
