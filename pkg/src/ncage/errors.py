"""Exception types shared across the package."""


class NcageError(Exception):
    """Base class for all package-specific errors."""


class InvalidParameterError(NcageError):
    """A parameter value is outside its documented domain."""


class EdgeListError(NcageError):
    """An edge-list file could not be parsed.

    Carries the 1-based line number when the problem is tied to a line.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DisconnectedGraphError(NcageError):
    """An operation that requires a connected graph got a disconnected one."""


class ConvergenceError(NcageError):
    """An iterative solver hit its iteration cap before reaching tolerance."""


class ShapeError(NcageError):
    """Array arguments have inconsistent or unexpected shapes."""


class CheckpointError(NcageError):
    """A checkpoint file is truncated, corrupt, or from an unknown version."""


class KindMismatchError(NcageError):
    """A model trained for one centrality was asked to serve another."""
