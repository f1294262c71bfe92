"""Exception hierarchy shared by all gmmstab modules.

Public functions never raise bare ValueError/ArithmeticError; they raise one
of the semantic exceptions below so callers can distinguish bad inputs from
numerical failures.
"""


class GmmStabError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GmmStabError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class BracketError(GmmStabError):
    """A root bracket does not actually bracket a sign change."""


class NoConvergence(GmmStabError, ArithmeticError):
    """An iterative method hit its iteration cap before reaching tolerance."""


class DimensionMismatch(GmmStabError, ValueError):
    """Two distributions live in Euclidean spaces of different dimension."""


class SizeMismatch(GmmStabError, ValueError):
    """Two mixtures have different component counts where equality is required."""


class TooManyComponents(GmmStabError, ValueError):
    """Component count exceeds the exhaustive-search limit."""


class InfeasibleEpsilon(GmmStabError, ValueError):
    """The goodness-of-fit level is too large for the class constants to exist."""


class RefinementInapplicable(GmmStabError):
    """The component-TV bound is too weak for the refinement step to be valid."""


class SeparationTooSmall(GmmStabError):
    """The class separation is below the minimum the theory requires."""


class UnknownExample(GmmStabError, KeyError):
    """Requested built-in example id does not exist."""
