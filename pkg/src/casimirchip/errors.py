"""Exception types shared across the library.

The CLI maps these onto exit codes: domain/convergence problems exit 1,
configuration and usage problems exit 2.
"""

from __future__ import annotations


class CasimirChipError(Exception):
    """Base class for all library errors."""


class DomainError(CasimirChipError, ValueError):
    """An argument is outside the physical/mathematical domain of an operation."""


class ConvergenceError(CasimirChipError, RuntimeError):
    """A series or quadrature failed to converge within its budget.

    Carries the best partial result so callers can inspect how far the
    evaluation got.
    """

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class TransitionNotFoundError(CasimirChipError, ValueError):
    """A resistance curve contains no detectable superconducting transition."""


class ConditioningError(CasimirChipError, ValueError):
    """A fit dataset is too degenerate to constrain the requested parameter."""


class ConfigError(CasimirChipError, ValueError):
    """A config file is malformed.  Collects every problem, not just the first."""

    def __init__(self, problems):
        problems = list(problems)
        super().__init__("; ".join(problems))
        self.problems = problems
