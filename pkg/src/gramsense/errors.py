"""Exception hierarchy shared by all gramsense modules."""

from __future__ import annotations


class GramsenseError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(GramsenseError, ValueError):
    pass


class DimensionMismatchError(GramsenseError, ValueError):
    pass


class ConstructionError(GramsenseError):
    """Randomized system construction could not satisfy its constraints."""


class DecompositionError(GramsenseError):
    """The generalized eigenproblem could not be solved (e.g. mass not positive-definite)."""


class RigidBodyModeError(DecompositionError):
    def __init__(self, modes):
        self.modes = tuple(int(m) for m in modes)
        super().__init__(
            f"near-zero natural frequency (rigid body mode) for mode(s) {list(self.modes)}; "
            "damping ratio undefined"
        )


class SingularSystemError(GramsenseError):
    """Dynamic stiffness matrix is singular at the requested frequency."""


class DegenerateColumnError(GramsenseError):
    def __init__(self, column, norm):
        self.column = int(column)
        self.norm = float(norm)
        super().__init__(f"FRF column {self.column} has (near-)zero norm {self.norm:.3e}")


class PartialMeasurementError(InvalidParameterError):
    """Modal Gram approximation requested for a matrix that does not cover every node."""


class CombinatorialGuardError(GramsenseError):
    pass


class InsufficientExtremaError(GramsenseError):
    pass


class ReconstructionError(GramsenseError):
    def __init__(self, force_index, cause):
        self.force_index = int(force_index)
        self.cause = cause
        super().__init__(f"reconstruction failed for unit force at node {self.force_index}: {cause}")


class ParseError(GramsenseError):
    def __init__(self, source, line, column, message):
        self.source = str(source)
        self.line = line
        self.column = column
        super().__init__(f"{self.source}:{line}:{column}: {message}")
