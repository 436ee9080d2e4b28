"""Exception types. Class names double as the error tags printed by the CLI."""


class CohDistError(ValueError):
    pass


class ValidationError(CohDistError):
    pass


class NotHermitian(ValidationError):
    pass


class NotPositive(ValidationError):
    pass


class BadTrace(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class EmptyKeepSet(CohDistError):
    pass


class IndexOutOfRange(CohDistError):
    pass


class EmptySubset(CohDistError):
    pass


class BadSubset(CohDistError):
    pass


class BadPartition(CohDistError):
    pass


class NoConvergence(CohDistError, ArithmeticError):
    pass


class BadAngleCount(CohDistError):
    pass


class UnknownName(CohDistError):
    pass


class BadParameter(CohDistError):
    pass


class NotTracePreserving(ValidationError):
    pass


class NotIncoherent(ValidationError):
    pass


class UnknownTheorem(CohDistError):
    pass


class BadInputFile(CohDistError):
    pass
