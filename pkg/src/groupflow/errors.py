"""Exception hierarchy used across the package."""


class GroupFlowError(Exception):
    """Base class for all groupflow errors."""


class ValidationError(GroupFlowError, ValueError):
    """Malformed input data."""


class EmptyGroup(ValidationError):
    pass


class NonpositiveWeight(ValidationError):
    pass


class IndexOutOfRange(ValidationError):
    pass


class DuplicateIndex(ValidationError):
    pass


class InvalidLength(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class InvalidKind(ValidationError):
    pass


class InvalidWarmStart(GroupFlowError):
    """Warm-start flow violates arc capacities beyond tolerance."""


class NotMaximal(GroupFlowError):
    """Min-cut requested from a flow that is not maximum."""


class ToleranceNotReached(GroupFlowError):
    """Iterative reference solver hit its iteration cap."""
