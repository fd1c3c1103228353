import math

import numpy as np
import pytest

from scwfprep.exprparse import (
    BinOp,
    Call,
    EvalError,
    Neg,
    Num,
    ParseError,
    Var,
    eval_on_grid,
    parse,
    to_source,
)
from scwfprep.grid import Grid


def test_parse_simple_call():
    assert parse("sin(x)") == Call("sin", Var("x"))


def test_parse_case2_target_left_nested():
    tree = parse("sin(x)+cos(2*x)+sin(3*x)")
    assert tree == BinOp(
        "+",
        BinOp("+", Call("sin", Var("x")), Call("cos", BinOp("*", Num(2.0), Var("x")))),
        Call("sin", BinOp("*", Num(3.0), Var("x"))),
    )


def test_parse_pi_and_whitespace():
    assert parse(" pi ") == Num(math.pi)
    assert parse("1 + 2") == BinOp("+", Num(1.0), Num(2.0))


@pytest.mark.parametrize(
    "text,value",
    [
        ("2^3^2", 512.0),  # right-associative
        ("(2^3)^2", 64.0),
        ("2^-1", 0.5),
        ("-2^2", -4.0),  # ^ binds tighter than unary minus
        ("1+2*3", 7.0),
        ("(1+2)*3", 9.0),
        ("2-3-4", -5.0),  # left-associative
        ("12/4/3", 1.0),
        ("2*-3", -6.0),
        ("cos(pi)", -1.0),
        ("exp(0)", 1.0),
        ("2.5", 2.5),
        ("1.5e2", 150.0),
        (".5*4", 2.0),
    ],
)
def test_scalar_evaluation(text, value):
    g = Grid(1, 8)
    out = eval_on_grid(parse(text), g)
    assert out.shape == (8,)
    assert np.allclose(out, value, atol=1e-15)


def test_eval_zero_expression():
    g = Grid(1, 16)
    assert np.all(eval_on_grid(parse("0"), g) == 0.0)


def test_eval_sin_matches_library_bitwise():
    g = Grid(1, 32)
    out = eval_on_grid(parse("sin(x)"), g)
    assert np.array_equal(out, np.sin(g.coordinates[:, 0]))


def test_eval_2d_against_hand_loop():
    g = Grid(2, 32)
    out = eval_on_grid(parse("cos(x)*sin(y)"), g)
    n = g.points_per_dim
    expected = np.empty(g.num_points)
    for i2 in range(n):
        for i1 in range(n):
            expected[i1 + n * i2] = math.cos(i1 * g.spacing) * math.sin(i2 * g.spacing)
    assert np.max(np.abs(out - expected)) < 1e-15


def test_eval_scalar_linearity():
    g = Grid(1, 32)
    thrice = eval_on_grid(parse("3*(sin(x)+x)"), g)
    once = eval_on_grid(parse("sin(x)+x"), g)
    assert np.max(np.abs(thrice - 3.0 * once)) < 1e-15


def test_y_rejected_on_1d_grid():
    with pytest.raises(EvalError, match="'y'"):
        eval_on_grid(parse("sin(y)"), Grid(1, 8))
    # fine on a 2-D grid
    eval_on_grid(parse("sin(y)"), Grid(2, 4))


def test_division_by_zero_reports_location():
    g = Grid(1, 32)
    with pytest.raises(EvalError, match="grid point 0"):
        eval_on_grid(parse("1/x"), g)
    # pi falls exactly on grid point 16 of a 32-point grid
    with pytest.raises(EvalError, match="grid point 16"):
        eval_on_grid(parse("1/(x-pi)"), g)
    with pytest.raises(EvalError):
        eval_on_grid(parse("1/0"), g)


@pytest.mark.parametrize(
    "text,offset",
    [
        ("foo(x)", 0),
        ("1+", 2),
        ("sin(", 4),
        ("(1", 2),
        ("1 @ 2", 2),
        ("sin x", 4),
    ],
)
def test_parse_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as err:
        parse(text)
    assert err.value.position == offset
    assert f"offset {offset}" in str(err.value)


def test_trailing_input_rejected():
    with pytest.raises(ParseError, match="end of input"):
        parse("1)")
    with pytest.raises(ParseError, match="end of input"):
        parse("x y")


FIXPOINT_CORPUS = [
    "sin(x)",
    "sin(x)+cos(2*x)+sin(3*x)",
    "cos(x)*sin(y)",
    "-(x+1)",
    "-x^2",
    "2^3^2",
    "(2^3)^2",
    "2^-1",
    "x*(y+1)",
    "x+-y",
    "--x",
    "sin(cos(exp(x)))",
    "1.5e-3*x",
    "x/y/2",
    "x-(y-1)",
    "x^y^2",
    "(x+y)^(x-y)",
    "pi*x",
    "exp(-x^2/2)",
    "1/(2+cos(x))",
]


@pytest.mark.parametrize("text", FIXPOINT_CORPUS)
def test_print_parse_fixpoint(text):
    tree = parse(text)
    printed = to_source(tree)
    assert parse(printed) == tree
    # and printing again is stable
    assert to_source(parse(printed)) == printed
