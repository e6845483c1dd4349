"""Exception types shared across the package."""

from __future__ import annotations


class ReformistError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(ReformistError):
    """Input data violates a structural precondition."""


class FileFormatError(ReformistError):
    """A document could not be parsed or deviates from its schema.

    Distinct from ValidationError so the command line can map it to the
    usage/parse exit status instead of the domain-failure status.
    """


class StepError(ReformistError):
    """An exchange step is not feasible in the current matching."""

    def __init__(self, reason: str, envy_pair: tuple[int, int] | None = None):
        super().__init__(reason)
        self.reason = reason
        self.envy_pair = envy_pair


class BudgetExceededError(ReformistError):
    """A search exceeded its configured state or node budget."""


class GenerationError(ReformistError):
    """A random generator could not produce a valid instance."""


class InternalInvariantError(ReformistError):
    """An internal consistency check failed; indicates a bug, not bad input."""
