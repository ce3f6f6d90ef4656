"""Exception types shared across the package.

Parsers raise the Malformed* family; stores and services raise the rest.
Everything derives from MementoError so callers can catch broadly.
"""


class MementoError(Exception):
    """Base class for all errors raised by this package."""


class MalformedHeader(MementoError):
    """A temporal header value does not match its grammar."""


class MalformedDate(MalformedHeader):
    """Text is not a valid fixed-width GMT HTTP-date."""


class EmptyHeader(MalformedHeader):
    """A header that must carry at least one item is empty."""


class InvertedInterval(MalformedHeader):
    """A datetime interval with from > until."""


class InvalidRecord(MementoError):
    """A memento record violates a construction invariant."""


class DuplicateMemento(MementoError):
    """A memento with this URI-M is already stored."""


class MixedOriginals(MementoError):
    """TimeMaps for different original resources cannot be merged."""


class AllArchivesEmpty(MementoError):
    """No registered archive holds any memento for the resource."""


class UnknownHost(MementoError):
    """Request targets a hostname not registered in the simulated web."""


class ConnectionFailure(MementoError):
    """The target host is unreachable."""


class ClockMovedBackwards(MementoError):
    """Simulated clocks only move forward."""


class InvalidScript(MementoError):
    """A scenario script cannot be loaded."""


class NoMementoFound(MementoError):
    """Time travel exhausted every route without reaching a memento."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class HopLimitExceeded(MementoError):
    """A travel request exceeded its redirect budget."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class MalformedResponse(MementoError):
    """A response required by the protocol is structurally unusable."""
