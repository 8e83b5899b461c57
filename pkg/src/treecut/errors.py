"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: parameter/parse problems exit 2,
brute-force size limits exit 3, embedding failures exit 4, anything
else exits 1.
"""


class TreecutError(Exception):
    """Base class for all package errors."""


class ParameterError(TreecutError):
    """An argument violates a documented precondition."""


class GenerationError(TreecutError):
    """Rejection sampling exhausted its attempt budget."""


class ParseError(TreecutError):
    """An input file is malformed; message carries line/field context."""


class InstanceError(TreecutError):
    """A tree instance violates a structural invariant."""


class SizeLimitError(TreecutError):
    """A model is too large for exhaustive enumeration."""


class InfeasibleInstanceError(TreecutError):
    """Some constraint path has no removable vertex."""


class EmbeddingError(TreecutError):
    """An embedding is invalid for the model, or none could be found."""


class SearchBudgetError(TreecutError):
    """Branch-and-bound exceeded its node budget."""
