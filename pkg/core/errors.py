"""
Exception hierarchy for the dessync library.

The CLI maps these onto exit codes:
- ModelError (and subclasses) -> 2
- UsageError (and subclasses) -> 1
"""
from typing import Optional


class DessyncError(Exception):
    """Base class for every error raised by the library."""


class ModelError(DessyncError):
    """Raised when a plant model or identifier is malformed."""

    def __init__(self, message: str, identifier: Optional[str] = None):
        self.identifier = identifier
        super().__init__(message)


class ConfigError(ModelError):
    """Raised when an observation architecture or runtime setting is invalid."""


class NotInLanguageError(ModelError):
    """Raised when a replayed event sequence is not generated by the plant."""

    def __init__(self, trace: list, executed: int):
        self.trace = trace
        self.executed = executed
        super().__init__(
            f"Trace is not in L(G): no run survives after {executed} of {len(trace)} events"
        )


class UsageError(DessyncError):
    """Raised when an operation is called outside its domain."""


class UndefinedTransitionError(UsageError):
    """Raised when the absorbing transition is applied to a critical SI-state."""

    def __init__(self, si_state: str, event: str):
        self.si_state = si_state
        self.event = event
        super().__init__(f"Absorbing transition undefined on critical SI-state {si_state} (event {event})")


class CorruptedStateError(DessyncError):
    """Raised when an SI-state component exceeds its site threshold."""

    def __init__(self, site: int, length: int, kappa: int):
        self.site = site
        self.length = length
        self.kappa = kappa
        super().__init__(f"Site {site} holds {length} events but its threshold is {kappa}")


class FixtureInvalidError(DessyncError):
    """Raised when a golden fact does not hold on a fixture model."""

    def __init__(self, fact: str, details: str = "", report: Optional[object] = None):
        self.fact = fact
        self.details = details
        self.report = report
        super().__init__(f"Golden fact failed: {fact} - {details}")


class StateSpaceLimitError(DessyncError):
    """Raised when a subset construction exceeds the configured state cap."""

    def __init__(self, structure: str, limit: int):
        self.structure = structure
        self.limit = limit
        super().__init__(f"{structure} exceeded {limit} states")
