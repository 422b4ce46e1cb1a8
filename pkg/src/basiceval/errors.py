"""Exception hierarchy shared across the package."""


class BasicEvalError(Exception):
    """Base class for all package-specific errors."""


class MalformedFile(BasicEvalError):
    """File could not be parsed at all (syntax level)."""


class SchemaViolation(BasicEvalError):
    """File parsed but violates the documented schema or an invariant."""


class RleLengthMismatch(SchemaViolation):
    """Run lengths of a mask do not sum to height * width."""


class DuplicateEntry(SchemaViolation):
    """A (granularity, label, instance) key occurs more than once."""


class DimensionMismatch(BasicEvalError):
    """Two masks being compared have different height or width."""


class NegativeCount(BasicEvalError):
    """A match count passed to a score function was negative."""


class EmptyInput(BasicEvalError):
    """An aggregation was requested over zero records."""


class MixedMethods(BasicEvalError):
    """Records from more than one (method, dataset) were aggregated together."""


class MismatchedSets(BasicEvalError):
    """Two rankings do not cover the same item set."""


class UnparsableSentence(BasicEvalError):
    """A sentence falls outside the controlled fallback grammar."""
