"""Exception types shared across the toolkit."""


class EqsmoothError(Exception):
    """Base class for all toolkit errors."""


class InvalidInput(EqsmoothError):
    """Malformed or inconsistent input (dimension mismatch, empty data, budget violation)."""


class DegenerateRecord(EqsmoothError):
    """A record with classifier score exactly zero and no label to disambiguate the sign."""


class ZeroGradient(EqsmoothError):
    """An operation that divides by the gradient norm met a zero gradient."""


class ModelRequired(EqsmoothError):
    """An attack that queries the classifier was requested without a model."""


class TooLarge(EqsmoothError):
    """Instance exceeds the size cap of an exact (exponential) routine."""


class Unsupported(EqsmoothError):
    """Operation is only defined for a different model family."""


class ModelAssumptionViolated(EqsmoothError):
    """A query point falls where the piecewise model is not locally linear."""


class DistributionMismatch(EqsmoothError):
    """Rejection sampling accepted almost nothing; distribution and model disagree."""
