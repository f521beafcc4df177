"""Exception hierarchy shared by every module in the package."""

from __future__ import annotations


class QmldError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(QmldError, ValueError):
    pass


class BadDimensions(QmldError, ValueError):
    pass


class RankDeficient(QmldError, ValueError):
    pass


class Infeasible(QmldError):
    """The linear system has no solution."""


class TooLarge(QmldError):
    """An exhaustive enumeration would exceed the configured cap."""

    def __init__(self, bits: int, cap: int, what: str = "enumeration") -> None:
        super().__init__(f"{what} needs 2^{bits} elements, cap is 2^{cap}")
        self.bits = bits
        self.cap = cap


class InvalidP(QmldError, ValueError):
    pass


class InvalidBasis(QmldError, ValueError):
    pass


class GammaNotInT(QmldError, ValueError):
    pass


class NotStandardForm(QmldError, ValueError):
    pass


class InconsistentResult(QmldError):
    """A decoder output failed a postcondition; indicates a bug upstream."""


class ParseError(QmldError, ValueError):
    pass
