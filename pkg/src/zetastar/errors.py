"""Exception hierarchy.

Domain errors (bad inputs, values outside a theorem's range) all derive
from ``DomainError`` so the CLI can map them to a single exit code.
``PrecisionInsufficient`` is kept separate: it signals that a comparison
could not be certified at the working precision even after escalation,
which callers may want to retry rather than reject.
"""


class ZetaStarError(Exception):
    """Base class for all library errors."""


class DomainError(ZetaStarError):
    """Input outside the mathematical domain of an operation."""


class InvalidIndex(DomainError):
    """Composition violates k1 >= 2 or k_i >= 1."""


class InvalidNode(DomainError):
    """Subdivision node parameters inconsistent with its family."""


class OutOfDomain(DomainError):
    """Real argument outside the admissible range (e.g. x <= 1 for expand)."""


class OutOfRange(DomainError):
    """Target outside the exact sumset range of the binary-map theorem."""


class BelowRange(DomainError):
    """Decomposition target below the certified left endpoint."""


class DivergentValue(DomainError):
    """The requested series diverges (only (2,{1}^inf)-type tails)."""


class NotInDomain(DomainError):
    """Tailed index falls outside the admissible sequence set."""


class NonTerminating(DomainError):
    """Digit sequence has no rational value (no periodic tail)."""


class UnboundedFamily(DomainError):
    """Thickness requested for a family with infinite diameter."""


class CorruptCache(ZetaStarError):
    """Cache entry failed to decode; caller should discard and recompute."""


class PrecisionInsufficient(ZetaStarError):
    """A required comparison is undecidable at the working precision."""
