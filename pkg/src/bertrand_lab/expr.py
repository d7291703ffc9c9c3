"""A small expression language for curves and curvature functions.

Grammar (EBNF)::

    expr    = term , { ( "+" | "-" ) , term } ;
    term    = unary , { ( "*" | "/" ) , unary } ;
    unary   = "-" , unary | power ;
    power   = primary , [ "^" , unary ] ;
    primary = number | name | name , "(" , expr , { "," , expr } , ")"
            | "(" , expr , ")" ;

``^`` binds tighter than unary minus (``-2^2 == -4``) and is right
associative (``2^3^2 == 512``). The parameter is spelled ``t``; ``pi`` and
``e`` are predefined and may be shadowed by user constants.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Union

import numpy as np

from .errors import (
    ArityMismatch,
    ExprSyntaxError,
    NonFiniteValue,
    NotDifferentiable,
    UnboundName,
    UnknownFunction,
)

PARAM = "t"
BUILTIN_CONSTANTS = {"pi": math.pi, "e": math.e}
FUNCTIONS = {
    "sin": 1,
    "cos": 1,
    "tan": 1,
    "exp": 1,
    "ln": 1,
    "sqrt": 1,
    "abs": 1,
    "sgn": 1,
    "atan2": 2,
}

# -- AST ----------------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Name:
    id: str


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Bin:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple["Expr", ...]


Expr = Union[Num, Name, Neg, Bin, Call]

# -- lexer --------------------------------------------------------------------

_PUNCT = set("+-*/^(),")


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "name", one of _PUNCT, or "end"
    text: str
    pos: int  # character index


def _byte_offset(src: str, pos: int) -> int:
    return len(src[:pos].encode("utf-8", errors="surrogatepass"))


def _tokenize(src: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i, n = 0, len(src)
    while i < n:
        c = src[i]
        if c in " \t\r\n":
            i += 1
        elif c in _PUNCT:
            toks.append(_Tok(c, c, i))
            i += 1
        elif c.isascii() and (c.isdigit() or c == "."):
            j = i
            while j < n and src[j].isascii() and src[j].isdigit():
                j += 1
            if j < n and src[j] == ".":
                j += 1
                while j < n and src[j].isascii() and src[j].isdigit():
                    j += 1
            mantissa = src[i:j]
            if mantissa == ".":
                raise ExprSyntaxError("malformed number", _byte_offset(src, i), {"number"})
            if j < n and src[j] in "eE":
                k = j + 1
                if k < n and src[k] in "+-":
                    k += 1
                if k < n and src[k].isascii() and src[k].isdigit():
                    while k < n and src[k].isascii() and src[k].isdigit():
                        k += 1
                    j = k
            toks.append(_Tok("num", src[i:j], i))
            i = j
        elif c.isascii() and (c.isalpha() or c == "_"):
            j = i
            while j < n and src[j].isascii() and (src[j].isalnum() or src[j] == "_"):
                j += 1
            toks.append(_Tok("name", src[i:j], i))
            i = j
        else:
            raise ExprSyntaxError(f"unexpected character {c!r}", _byte_offset(src, i), {"number", "name", "(", "-"})
    toks.append(_Tok("end", "", n))
    return toks


# -- parser -------------------------------------------------------------------

_OPERAND_START = frozenset({"number", "name", "(", "-"})


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.toks = _tokenize(src)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def fail(self, message: str, expected, tok: _Tok | None = None, cls=ExprSyntaxError):
        tok = tok or self.tok
        raise cls(message, _byte_offset(self.src, tok.pos), expected)

    def take(self, kind: str) -> _Tok:
        tok = self.tok
        if tok.kind != kind:
            found = "end of input" if tok.kind == "end" else repr(tok.text)
            self.fail(f"unexpected {found}", {kind})
        self.i += 1
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        if self.tok.kind != "end":
            self.fail(f"unexpected {self.tok.text!r}", {"+", "-", "*", "/", "^", "end"})
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.tok.kind in ("+", "-"):
            op = self.take(self.tok.kind).kind
            e = Bin(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.tok.kind in ("*", "/"):
            op = self.take(self.tok.kind).kind
            e = Bin(op, e, self.unary())
        return e

    def unary(self) -> Expr:
        if self.tok.kind == "-":
            self.take("-")
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.primary()
        if self.tok.kind == "^":
            self.take("^")
            return Bin("^", base, self.unary())
        return base

    def primary(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "(":
            self.take("(")
            e = self.expr()
            self.take(")")
            return e
        if tok.kind == "name":
            self.i += 1
            if self.tok.kind != "(":
                return Name(tok.text)
            if tok.text not in FUNCTIONS:
                self.fail(f"unknown function {tok.text!r}", set(FUNCTIONS), tok, UnknownFunction)
            self.take("(")
            args = [self.expr()]
            while self.tok.kind == ",":
                self.take(",")
                args.append(self.expr())
            self.take(")")
            want = FUNCTIONS[tok.text]
            if len(args) != want:
                self.fail(
                    f"{tok.text} takes {want} argument(s), got {len(args)}",
                    {f"{want} argument(s)"},
                    tok,
                    ArityMismatch,
                )
            return Call(tok.text, tuple(args))
        found = "end of input" if tok.kind == "end" else repr(tok.text)
        self.fail(f"unexpected {found}", _OPERAND_START)
        raise AssertionError("unreachable")


def parse(src: str) -> Expr:
    """Parse ``src`` into an immutable AST."""
    if not isinstance(src, str):
        raise TypeError("expression source must be a string")
    return _Parser(src).parse()


def as_expr(e: "Expr | str | float | int") -> Expr:
    if isinstance(e, (Num, Name, Neg, Bin, Call)):
        return e
    if isinstance(e, str):
        return parse(e)
    if isinstance(e, (int, float)):
        return Num(float(e))
    raise TypeError(f"cannot interpret {e!r} as an expression")


# -- printing -----------------------------------------------------------------

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}


def _prec(e: Expr) -> int:
    if isinstance(e, Bin):
        return _PREC[e.op]
    if isinstance(e, Neg) or (isinstance(e, Num) and (e.value < 0 or math.copysign(1, e.value) < 0)):
        return 3
    return 5


def _num_text(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v)) if v != 0 or math.copysign(1, v) > 0 else "-0"
    return repr(v)


def to_source(e: Expr) -> str:
    """Render with the fewest parentheses that still re-parse to the same tree."""
    if isinstance(e, Num):
        return _num_text(e.value)
    if isinstance(e, Name):
        return e.id
    if isinstance(e, Call):
        return f"{e.fn}({', '.join(to_source(a) for a in e.args)})"
    if isinstance(e, Neg):
        inner = to_source(e.arg)
        return f"-({inner})" if _prec(e.arg) < 3 else f"-{inner}"
    p = _PREC[e.op]
    left, right = to_source(e.left), to_source(e.right)
    if _prec(e.left) < p or (e.op == "^" and _prec(e.left) <= p):
        left = f"({left})"
    if (e.op == "^" and _prec(e.right) < p) or (e.op != "^" and _prec(e.right) <= p):
        right = f"({right})"
    return f"{left}{e.op}{right}" if e.op == "^" else f"{left} {e.op} {right}"


# -- evaluation ---------------------------------------------------------------


def free_names(e: Expr) -> set[str]:
    if isinstance(e, Num):
        return set()
    if isinstance(e, Name):
        return {e.id}
    if isinstance(e, Neg):
        return free_names(e.arg)
    if isinstance(e, Bin):
        return free_names(e.left) | free_names(e.right)
    return set().union(*(free_names(a) for a in e.args))


def depends_on_param(e: Expr, constants: Mapping[str, float] | None = None) -> bool:
    return PARAM in free_names(e)


def _check(value: np.ndarray, t: np.ndarray, what: str) -> np.ndarray:
    bad = ~np.isfinite(value)
    if np.any(bad):
        idx = np.flatnonzero(np.broadcast_to(bad, np.broadcast(value, t).shape))[0]
        tb = np.broadcast_to(t, np.broadcast(value, t).shape).ravel()
        raise NonFiniteValue(float(tb[idx]), what)
    return value


def _eval(e: Expr, t: np.ndarray, env: Mapping[str, float]) -> np.ndarray:
    if isinstance(e, Num):
        return np.float64(e.value)
    if isinstance(e, Name):
        if e.id == PARAM:
            return t
        if e.id in env:
            return np.float64(env[e.id])
        raise UnboundName(e.id)
    if isinstance(e, Neg):
        return -_eval(e.arg, t, env)
    if isinstance(e, Bin):
        a = _eval(e.left, t, env)
        b = _eval(e.right, t, env)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return _check(a * b, t, "product")
        if e.op == "/":
            return _check(np.true_divide(a, b), t, "division")
        return _check(np.power(a, b), t, "power")
    args = [_eval(a, t, env) for a in e.args]
    x = args[0]
    fn = e.fn
    if fn == "sin":
        out = np.sin(x)
    elif fn == "cos":
        out = np.cos(x)
    elif fn == "tan":
        c = np.cos(x)
        pole = np.abs(c) <= 8 * np.finfo(float).eps * np.maximum(1.0, np.abs(x))
        out = np.where(pole, np.nan, np.tan(x))
    elif fn == "exp":
        out = np.exp(x)
    elif fn == "ln":
        out = np.log(x)
    elif fn == "sqrt":
        out = np.sqrt(x)
    elif fn == "abs":
        out = np.abs(x)
    elif fn == "sgn":
        out = np.sign(x)
    elif fn == "atan2":
        out = np.arctan2(x, args[1])
    else:  # pragma: no cover - the parser rejects unknown names
        raise UnknownFunction(f"unknown function {fn!r}", 0)
    return _check(out, t, fn)


def evaluate(e: "Expr | str", t, constants: Mapping[str, float] | None = None):
    """Evaluate at a scalar or array parameter.

    Any inf/nan produced at any node raises NonFiniteValue carrying the first
    offending parameter value.
    """
    e = as_expr(e)
    env = dict(BUILTIN_CONSTANTS)
    if constants:
        env.update({k: float(v) for k, v in constants.items()})
    t_arr = np.asarray(t, dtype=float)
    with np.errstate(all="ignore"):
        out = _check(np.asarray(_eval(e, t_arr, env), dtype=float), t_arr, "result")
    out = np.broadcast_to(out, t_arr.shape).copy() if out.shape != t_arr.shape else out
    return float(out) if out.ndim == 0 else out


# -- differentiation ----------------------------------------------------------

ZERO, ONE, TWO = Num(0.0), Num(1.0), Num(2.0)


def _is(e: Expr, v: float) -> bool:
    return isinstance(e, Num) and e.value == v


def _add(a: Expr, b: Expr) -> Expr:
    if _is(a, 0):
        return b
    if _is(b, 0):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value + b.value)
    return Bin("+", a, b)


def _sub(a: Expr, b: Expr) -> Expr:
    if _is(b, 0):
        return a
    if _is(a, 0):
        return _neg(b)
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value - b.value)
    return Bin("-", a, b)


def _neg(a: Expr) -> Expr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def _mul(a: Expr, b: Expr) -> Expr:
    if _is(a, 0) or _is(b, 0):
        return ZERO
    if _is(a, 1):
        return b
    if _is(b, 1):
        return a
    if isinstance(a, Num) and isinstance(b, Num):
        return Num(a.value * b.value)
    return Bin("*", a, b)


def _div(a: Expr, b: Expr) -> Expr:
    if _is(a, 0):
        return ZERO
    if _is(b, 1):
        return a
    return Bin("/", a, b)


def _pow(a: Expr, b: Expr) -> Expr:
    if _is(b, 1):
        return a
    if _is(b, 0):
        return ONE
    return Bin("^", a, b)


def _d(e: Expr) -> Expr:
    if isinstance(e, Num):
        return ZERO
    if isinstance(e, Name):
        return ONE if e.id == PARAM else ZERO
    if isinstance(e, Neg):
        return _neg(_d(e.arg))
    if isinstance(e, Bin):
        u, v = e.left, e.right
        du, dv = _d(u), _d(v)
        if e.op == "+":
            return _add(du, dv)
        if e.op == "-":
            return _sub(du, dv)
        if e.op == "*":
            return _add(_mul(du, v), _mul(u, dv))
        if e.op == "/":
            return _div(_sub(_mul(du, v), _mul(u, dv)), _pow(v, TWO))
        if _is(dv, 0):
            # constant exponent: d(u^c) = c u^(c-1) u'
            return _mul(_mul(v, _pow(u, _sub(v, ONE))), du)
        # general power: u^v (v' ln u + v u'/u)
        return _mul(e, _add(_mul(dv, Call("ln", (u,))), _div(_mul(v, du), u)))
    fn, args = e.fn, e.args
    u = args[0]
    du = _d(u)
    if fn in ("abs", "sgn"):
        if _is(du, 0):
            return ZERO
        raise NotDifferentiable(f"{fn} is not differentiable")
    if fn == "atan2":
        y, x = args
        dy, dx = du, _d(args[1])
        if _is(dy, 0) and _is(dx, 0):
            return ZERO
        num = _sub(_mul(x, dy), _mul(y, dx))
        return _div(num, _add(_pow(x, TWO), _pow(y, TWO)))
    if _is(du, 0):
        return ZERO
    if fn == "sin":
        outer = Call("cos", (u,))
    elif fn == "cos":
        outer = _neg(Call("sin", (u,)))
    elif fn == "tan":
        outer = _add(ONE, _pow(Call("tan", (u,)), TWO))
    elif fn == "exp":
        outer = e
    elif fn == "ln":
        return _div(du, u)
    elif fn == "sqrt":
        return _div(du, _mul(TWO, e))
    else:  # pragma: no cover
        raise NotDifferentiable(fn)
    return _mul(outer, du)


@lru_cache(maxsize=1024)
def _derivative_cached(e: Expr, order: int) -> Expr:
    for _ in range(order):
        e = _d(e)
    return e


def derivative(e: "Expr | str", order: int = 1) -> Expr:
    """Symbolic derivative with respect to ``t``; ``order`` in 1..3."""
    if order not in (1, 2, 3):
        raise ValueError("derivative order must be 1, 2 or 3")
    return _derivative_cached(as_expr(e), order)


# -- curve specifications -----------------------------------------------------


@dataclass(frozen=True, eq=False)
class CurveSpec:
    """A parametric space curve t -> (x(t), y(t), z(t)) on [t0, t1]."""

    x: Expr
    y: Expr
    z: Expr
    t0: float
    t1: float
    constants: Mapping[str, float] = None  # type: ignore[assignment]

    def __post_init__(self):
        for name in ("x", "y", "z"):
            object.__setattr__(self, name, as_expr(getattr(self, name)))
        object.__setattr__(self, "constants", dict(self.constants or {}))
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "t1", float(self.t1))
        if not self.t1 > self.t0:
            raise ValueError(f"degenerate interval [{self.t0}, {self.t1}]")

    @property
    def components(self) -> tuple[Expr, Expr, Expr]:
        return (self.x, self.y, self.z)

    def derivative_exprs(self, order: int) -> tuple[Expr, Expr, Expr]:
        if order == 0:
            return self.components
        return tuple(derivative(c, order) for c in self.components)  # type: ignore[return-value]

    def evaluate(self, t, order: int = 0) -> np.ndarray:
        """Position (order 0) or its ``order``-th derivative, shape (..., 3)."""
        t = np.asarray(t, dtype=float)
        cols = [np.broadcast_to(evaluate(c, t, self.constants), t.shape) for c in self.derivative_exprs(order)]
        return np.stack(cols, axis=-1)
