"""Exception hierarchy.

Every domain error carries a short ``name`` that the CLI prints on the
diagnostic stream, so scripts can match on it.
"""

from __future__ import annotations


class RdlError(Exception):
    """Base class for all domain errors raised by this package."""

    @property
    def name(self) -> str:
        return type(self).__name__


class EmptySupport(RdlError):
    pass


class OutOfRange(RdlError):
    pass


class NonMonotone(RdlError):
    pass


class InvariantViolation(RdlError):
    pass


class GridMismatch(RdlError):
    pass


class ChainViolation(RdlError):
    pass


class NegativeInput(RdlError):
    pass


class BracketFailure(RdlError):
    pass


class RecursionInconsistency(RdlError):
    pass


class InvalidBin(RdlError):
    pass


class EpsilonTooLarge(RdlError):
    pass


class ThresholdViolation(RdlError):
    pass


class CertificateMismatch(RdlError):
    """An adversarial construction failed to attain its target ratio."""


class ParseError(RdlError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


class UnknownSuite(RdlError):
    pass
