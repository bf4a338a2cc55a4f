"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI:
  2 -- input errors (bad problem files, unknown generators, malformed words)
  3 -- budget exceeded (combinatorial guardrails)
  4 -- numerical failure (indefinite B, kernel violation in a pencil)
"""


class NCUpperError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class InputError(NCUpperError):
    """Malformed input: problem files, words, generator references."""

    exit_code = 2


class BudgetExceededError(NCUpperError):
    """A combinatorial guardrail refused to run an oversized computation."""

    exit_code = 3


class NumericalError(NCUpperError):
    """Numerical failure in the generalized eigenvalue solve."""

    exit_code = 4


class IndefiniteBError(NumericalError):
    """B is not positive semidefinite within tolerance."""


class KernelViolationError(NumericalError):
    """ker B is not contained in ker A within tolerance; A and B are
    inconsistent (not assembled from a common state)."""
