"""Exception types raised by listintersect.

Everything that signals bad user input derives from ``ValidationError`` so the
CLI can map it to a single exit code.
"""


class ValidationError(ValueError):
    """Input parameters violate a documented precondition."""


class InvalidProbabilityError(ValidationError):
    pass


class ParameterOutOfRangeError(ValidationError):
    pass


class MissingCandidateSizeError(ValidationError):
    pass


class UndefinedFDRError(ValidationError):
    """The within-set FDR estimate has no value for an empty observed set."""


class ShortListError(ValidationError):
    pass


class DuplicateStudyError(ValidationError):
    pass


class DuplicateGeneError(ValidationError):
    pass


class EmptyCandidateListError(ValidationError):
    pass


class UnsupportedRhoError(ValidationError):
    """No closed-form correction exists for 0 < rho < 1; simulate instead."""


class InfeasibleDesignError(ValidationError):
    """No (n, r) pair keeps the analytic FDR below the budget."""
