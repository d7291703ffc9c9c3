"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class BertrandLabError(Exception):
    """Root of all library errors."""


# -- expression language ----------------------------------------------------


class ExprError(BertrandLabError):
    pass


class ExprSyntaxError(ExprError):
    """Raised when a source string does not parse.

    ``offset`` is a byte offset into the UTF-8 encoded source and
    ``expected`` the set of token kinds that would have been accepted.
    """

    def __init__(self, message: str, offset: int, expected: frozenset[str] | set[str] = frozenset()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"{message} at byte {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(detail)


class UnknownFunction(ExprSyntaxError):
    pass


class ArityMismatch(ExprSyntaxError):
    pass


class UnboundName(ExprError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"name {name!r} is not bound")


class NonFiniteValue(ExprError):
    """An expression (or ODE right-hand side) produced inf/nan at ``param``."""

    def __init__(self, param: float, detail: str = ""):
        self.param = float(param)
        msg = f"non-finite value at t={self.param!r}"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class NotDifferentiable(ExprError):
    pass


# -- geometry ---------------------------------------------------------------


class DegeneratePair(BertrandLabError):
    pass


class NotRegular(BertrandLabError):
    def __init__(self, param: float, speed: float):
        self.param = float(param)
        self.speed = float(speed)
        super().__init__(f"curve is not regular at t={self.param!r} (|gamma'|={self.speed:.3e})")


class Degenerate(BertrandLabError):
    def __init__(self, param: float, cross_norm: float):
        self.param = float(param)
        self.cross_norm = float(cross_norm)
        super().__init__(
            f"curve is degenerate at t={self.param!r} (|gamma' x gamma''|={self.cross_norm:.3e})"
        )


class InvalidInit(BertrandLabError):
    pass


class GridMismatch(BertrandLabError):
    pass


class DegenerateInput(BertrandLabError):
    pass


class DivisionByZeroDomain(BertrandLabError):
    def __init__(self, param: float, what: str):
        self.param = float(param)
        super().__init__(f"{what} vanishes at parameter {self.param!r}")


class NoFeasibleConstant(BertrandLabError):
    pass


class VerificationFailed(BertrandLabError):
    def __init__(self, message: str, param: float | None = None, residual: float | None = None):
        self.param = param
        self.residual = residual
        extra = []
        if param is not None:
            extra.append(f"worst parameter {param!r}")
        if residual is not None:
            extra.append(f"residual {residual:.3e}")
        super().__init__(f"{message} ({', '.join(extra)})" if extra else message)


class SpecValidationError(BertrandLabError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
