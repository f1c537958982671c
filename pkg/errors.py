"""
Exception hierarchy for the chain-strength toolkit.

Every error also derives from ValueError so callers that only know the
standard library type still catch it.
"""


class ChainBoundError(ValueError):
    """Base class for all toolkit errors."""


class DimensionError(ChainBoundError):
    """A configuration or vector does not match the problem size."""


class SizeCapError(ChainBoundError):
    """An exhaustive computation would exceed its configured size cap."""


class EmbeddingValidationError(ChainBoundError):
    """An operation that requires a valid minor embedding received an invalid one."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class ConstraintError(ChainBoundError):
    """A field distribution violates the per-chain sum constraint."""


class SignError(ChainBoundError):
    """A chain coupler is not strictly ferromagnetic (negative)."""


class InstanceError(ChainBoundError):
    """A problem, hardware graph or scheduling instance is malformed."""
