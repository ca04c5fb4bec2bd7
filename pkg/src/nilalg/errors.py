"""Exception types raised across the package."""


class NilAlgError(Exception):
    """Base class for all errors raised by nilalg."""


class SingularMatrix(NilAlgError):
    pass


class DimensionMismatch(NilAlgError):
    pass


class DimensionTooLarge(NilAlgError):
    pass


class NotNilpotentInput(NilAlgError):
    pass


class NotNilpotentOperator(NilAlgError):
    pass


class BudgetExceeded(NilAlgError):
    pass


class InvalidDimension(NilAlgError):
    pass


class InvalidParameter(NilAlgError):
    pass


class DegenerateChange(NilAlgError):
    pass


class MalformedDocument(NilAlgError):
    pass
