"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations

from typing import Any


class SurjunctError(Exception):
    """Base class for all errors raised by this package."""


class UnsupportedUniverse(SurjunctError):
    pass


class InfiniteUniverse(SurjunctError):
    pass


class NotAGroup(SurjunctError):
    """A multiplication table failed one of the group axioms."""


class DomainMismatch(SurjunctError):
    pass


class NotAGroupAlphabet(SurjunctError):
    pass


class NotPrime(SurjunctError):
    pass


class InvalidRule(SurjunctError):
    """A local rule body is malformed or violates its structural invariant.

    ``report`` carries machine-readable details (violated identity, witnesses).
    """

    def __init__(self, message: str, report: dict[str, Any] | None = None):
        super().__init__(message)
        self.report = report or {}


class BudgetExceeded(SurjunctError):
    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial


class CapExceeded(SurjunctError):
    pass


class WindowTooLarge(CapExceeded):
    pass


class IncompatibleAutomata(SurjunctError):
    pass


class RankDeficientLattice(SurjunctError):
    pass


class NotAGroupOrLinearCA(SurjunctError):
    pass


class NotLinear(SurjunctError):
    pass


class UnsupportedCombination(SurjunctError):
    pass


class PreconditionFailed(SurjunctError):
    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class IncompatibleOperands(SurjunctError):
    pass


class RaggedInput(SurjunctError):
    pass


class InconsistentOracles(SurjunctError):
    """Two independent routes disagreed; always a bug in this package."""


class ConfigError(SurjunctError):
    pass
