"""Exception types shared across the package."""


class PaddleLabError(Exception):
    """Base class for all paddle-lab errors."""


class InvalidParameter(PaddleLabError):
    """A physical or numerical parameter violates its domain."""

    def __init__(self, name: str, reason: str):
        self.name = name
        self.reason = reason
        super().__init__(f"{name}: {reason}")


class TouchViolation(PaddleLabError):
    """A requested deflection puts an electrode gap at or below zero."""


class OutOfRange(PaddleLabError):
    """A capacitance value lies outside the attainable inversion range."""

    def __init__(self, message: str, row: int | None = None):
        self.row = row
        super().__init__(message)


class NoStableEquilibrium(PaddleLabError):
    """No force balance with restoring slope exists (beyond pull-in)."""


class InsufficientData(PaddleLabError):
    """Too few distinct data points for the requested operation."""


class DegenerateData(PaddleLabError):
    """Dataset cannot identify the requested parameters."""
