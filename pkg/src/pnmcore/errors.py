"""Shared exception types."""


class PnmError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(PnmError):
    pass


class SingularMap(PnmError):
    """Raised when a superoperator cannot be inverted (non-bijective map)."""


class NonHermitianChoi(PnmError):
    """Raised when a Choi matrix has a non-negligible anti-hermitian part."""


class UnsupportedDimension(PnmError):
    pass


class NonFiniteResult(PnmError):
    """An expression evaluated to inf or nan where a finite value is required."""


class ExprSyntaxError(PnmError):
    """Expression text could not be parsed. Carries the byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at offset {offset})")
        self.offset = offset


class UnknownFunction(ExprSyntaxError):
    pass


class UnbalancedParens(ExprSyntaxError):
    pass


class QuadratureFailure(PnmError):
    pass


class CPTPViolation(PnmError):
    pass


class UndefinedIntermediateMap(PnmError):
    """The intermediate map V_{t,s} does not exist (non-bijective start time)."""


class ZeroDifference(PnmError):
    pass


class DegeneratePair(PnmError):
    pass


class DomainError(PnmError):
    pass


class ConfigError(PnmError):
    """Invalid analysis configuration (schema or value errors)."""


class ParseError(ConfigError):
    """Configuration text is not valid JSON."""


class SchemaError(ConfigError):
    """Configuration JSON violates the documented schema. Carries the
    JSON-pointer path of the offending field."""

    def __init__(self, message: str, pointer: str = ""):
        super().__init__(f"{message} (at {pointer or '/'})")
        self.pointer = pointer
