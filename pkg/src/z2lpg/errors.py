class CapacityError(RuntimeError):
    """A dimension or enumeration size exceeds its configured cap."""


class SectorError(ValueError):
    """A state or configuration lies outside the target gauge sector."""

    def __init__(self, message: str, violated: list[int] | None = None):
        super().__init__(message)
        self.violated = violated or []


class ConvergenceError(RuntimeError):
    """An iterative propagator failed to reach its tolerance."""
