"""Structured exceptions raised by the public API."""


class SandcrossError(Exception):
    """Base class for all structured errors of this package."""


class NonConvergent(SandcrossError):
    """Stabilization cannot terminate (all neighborhood vectors collinear)."""


class BudgetExhausted(SandcrossError):
    """Stabilization did not finish within the step budget."""

    def __init__(self, message, steps=None):
        super().__init__(message)
        self.steps = steps


class EmptyNeighborhood(SandcrossError):
    """Discretization produced no lattice vectors."""


class FlatShape(SandcrossError):
    """Shape has a zero-area primitive, so scaled counts cannot grow."""


class ZeroVector(SandcrossError):
    """An operation received the zero vector where a direction is required."""


class NotACrossing(SandcrossError):
    """The configuration failed crossing verification."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class PlanFailure(SandcrossError):
    """No valid continuous plan exists for this shape under the fixed
    west-to-east / north-to-south orientation."""


class RatioTooSmall(SandcrossError):
    """The lattice at this ratio is too coarse to realize the plan."""


class GeometryConflict(SandcrossError):
    """Materialized cells violate a separation or tolerance constraint."""


class SynthesisBug(SandcrossError):
    """Synthesized output failed its own mandatory verification."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class NoRatioFound(SandcrossError):
    """Ratio sweep exhausted its grid without a verified synthesis."""
