import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bertrand_lab.errors import (
    ArityMismatch,
    ExprError,
    ExprSyntaxError,
    NonFiniteValue,
    NotDifferentiable,
    UnboundName,
    UnknownFunction,
)
from bertrand_lab.expr import CurveSpec, Bin, Neg, Num, derivative, evaluate, parse, to_source


@pytest.mark.parametrize(
    "src, consts, t, expected",
    [
        ("sin(t)+2*t", {}, 0.0, 0.0),
        ("p*cos(t)", {"p": 3.0}, 0.0, 3.0),
        ("2^3^2", {}, 0.0, 512.0),
        ("-2^2", {}, 0.0, -4.0),
        ("2^-1", {}, 0.0, 0.5),
        ("sqrt(1+p^2)", {"p": 1.0}, 0.0, math.sqrt(2)),
        ("atan2(m, n)", {"m": 1.0, "n": 0.0}, 0.0, math.pi / 2),
        ("10 - 4 - 3", {}, 0.0, 3.0),
        ("12 / 3 / 2", {}, 0.0, 2.0),
        ("1.5e1 + .5", {}, 0.0, 15.5),
        ("pi", {}, 0.0, math.pi),
        ("e", {"e": 2.0}, 0.0, 2.0),
        ("ln(exp(t))", {}, 0.7, 0.7),
        ("abs(-t) * sgn(t)", {}, -2.0, -2.0),
    ],
)
def test_evaluate_examples(src, consts, t, expected):
    assert evaluate(src, t, consts) == pytest.approx(expected, abs=1e-12)


def test_scalar_in_scalar_out_and_vectorised():
    assert isinstance(evaluate("t^2", 3.0), float)
    out = evaluate("t^2", np.array([1.0, 2.0]))
    assert out.tolist() == [1.0, 4.0]


def test_tan_pole_is_nonfinite():
    with pytest.raises(NonFiniteValue) as info:
        evaluate("tan(t)", math.pi / 2)
    assert info.value.param == pytest.approx(math.pi / 2)


@pytest.mark.parametrize("src", ["ln(t)", "sqrt(t)", "1/t", "(-2)^0.5"])
def test_domain_errors_report_parameter(src):
    with pytest.raises(NonFiniteValue):
        evaluate(src, np.array([1.0, 0.0, -1.0]) if "^" not in src else 0.0)


def test_unbound_name():
    with pytest.raises(UnboundName):
        evaluate("a*t", 1.0)


@pytest.mark.parametrize(
    "src, offset, cls",
    [
        ("cos(t", 5, ExprSyntaxError),
        ("1 + ", 4, ExprSyntaxError),
        ("2 ** 3", 3, ExprSyntaxError),
        ("foo(t)", 0, UnknownFunction),
        ("atan2(t)", 0, ArityMismatch),
        ("3 $ 4", 2, ExprSyntaxError),
        ("(t))", 3, ExprSyntaxError),
        ("é + t", 0, ExprSyntaxError),
        ("t + é", 4, ExprSyntaxError),
    ],
)
def test_syntax_errors_carry_byte_offsets(src, offset, cls):
    with pytest.raises(cls) as info:
        parse(src)
    assert info.value.offset == offset
    assert f"byte {offset}" in str(info.value)


def test_ast_shape_follows_precedence():
    assert parse("-2^2") == Neg(Bin("^", Num(2.0), Num(2.0)))
    assert parse("2^3^2") == Bin("^", Num(2.0), Bin("^", Num(3.0), Num(2.0)))


@pytest.mark.parametrize(
    "src, order, t, expected",
    [("t^2", 1, 3.0, 6.0), ("sin(t)", 1, 0.0, 1.0), ("cos(t)", 3, 0.0, 0.0), ("t^3", 2, 2.0, 12.0),
     ("atan2(t, 1)", 1, 0.0, 1.0), ("ln(t)", 2, 2.0, -0.25), ("exp(2*t)", 3, 0.0, 8.0), ("tan(t)", 1, 0.0, 1.0)],
)
def test_symbolic_derivatives(src, order, t, expected):
    assert evaluate(derivative(src, order), t) == pytest.approx(expected, abs=1e-12)


def test_derivative_of_t_dependent_abs_is_refused():
    with pytest.raises(NotDifferentiable):
        derivative("abs(t)")
    assert evaluate(derivative("abs(p)*t"), 1.0, {"p": -2.0}) == 2.0


def test_derivative_order_range():
    with pytest.raises(ValueError):
        derivative("t", 4)


def test_curve_spec_evaluates_derivatives():
    c = CurveSpec("cos(t)", "sin(t)", "t", 0, 1)
    d2 = c.evaluate(np.array([0.0]), 2)
    assert np.allclose(d2, [[-1.0, 0.0, 0.0]])
    with pytest.raises(ValueError):
        CurveSpec("t", "t", "t", 1, 1)


# -- property tests ------------------------------------------------------------

ATOMS = st.sampled_from(["t", "2", "0.5", "p", "pi"])


def _combine(children):
    binary = st.tuples(children, st.sampled_from(["+", "-", "*"]), children).map(lambda x: f"({x[0]}) {x[1]} ({x[2]})")
    unary = st.tuples(st.sampled_from(["sin", "cos", "exp", "-"]), children).map(lambda x: f"{x[0]}({x[1]})")
    power = st.tuples(children, st.sampled_from(["2", "3"])).map(lambda x: f"({x[0]})^{x[1]}")
    return binary | unary | power


SMOOTH = st.recursive(ATOMS, _combine, max_leaves=8)


@settings(max_examples=150, deadline=None)
@given(SMOOTH)
def test_print_parse_round_trip(src):
    e = parse(src)
    assert parse(to_source(e)) == e


@settings(max_examples=100, deadline=None)
@given(SMOOTH, st.integers(1, 3))
def test_symbolic_matches_finite_differences(src, order):
    """Symbolic derivatives against a Richardson-extrapolated central difference."""
    consts = {"p": 0.7}
    t = np.linspace(-1, 1, 5)
    f = lambda x: evaluate(src, x, consts)  # noqa: E731
    y = np.broadcast_to(f(t), t.shape)
    if not np.all(np.isfinite(y)) or np.max(np.abs(y)) > 1e6:
        return
    coef = {1: [-0.5, 0, 0.5], 2: [1, -2, 1], 3: [-0.5, 1, 0, -1, 0.5]}[order]
    offs = np.arange(len(coef)) - len(coef) // 2

    def fd(h):
        return sum(c * np.broadcast_to(f(t + k * h), t.shape) for c, k in zip(coef, offs)) / h**order

    h = 1e-2
    approx = (4 * fd(h / 2) - fd(h)) / 3
    exact = np.broadcast_to(evaluate(derivative(src, order), t, consts), t.shape)
    scale = max(1.0, float(np.max(np.abs(exact))))
    assert np.max(np.abs(approx - exact)) <= 1e-3 * scale


@settings(max_examples=300, deadline=None)
@given(st.text(alphabet=st.sampled_from(list("t+-*/^()., 0123456789sincoxpaé$e")), max_size=20))
def test_parser_totality(src):
    """Every string parses or raises a syntax error with an in-range offset."""
    try:
        parse(src)
    except ExprSyntaxError as err:
        assert 0 <= err.offset <= len(src.encode("utf-8"))
    except ExprError:  # pragma: no cover - parse never raises other kinds
        raise
