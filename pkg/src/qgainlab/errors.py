"""Exception hierarchy shared across the laboratory modules."""


class LabError(Exception):
    """Base class for all qgainlab errors."""


class ConfigError(LabError):
    """Malformed or inconsistent configuration input (CLI exit code 2)."""


class PreconditionError(LabError):
    """An operation was called outside its stated preconditions (CLI exit code 3)."""


class DomainError(PreconditionError):
    """Argument outside the mathematical domain of the operation."""


class SingularityError(PreconditionError):
    """Evaluation would hit a genuine singularity (for example a zero probability)."""


class BoundaryError(PreconditionError):
    """Frequencies on the simplex boundary where an interior expansion is invalid."""


class DegenerateDataError(PreconditionError):
    """Data assigns zero likelihood everywhere on the evaluation grid."""


class SupportError(PreconditionError):
    """A density is positive where the reference prior vanishes."""


class NotRepresentableError(PreconditionError):
    """Orthogonal map violates the block constraints required for a complex recast."""


class SigmaDiscontinuityError(PreconditionError):
    """A path of complex maps mixes unitary and antiunitary members."""


class UnreachablePreparationError(PreconditionError):
    """The selected preparation outcome has zero probability under the source."""
