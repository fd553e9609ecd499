import random

import pytest
from hypothesis import given, settings, strategies as st

from pivotc import ir
from pivotc.errors import UnprintableError
from pivotc.parser import SourceUnit, parse, parse_expression
from pivotc.printer import print_expression, print_pivot

from conftest import ALL_FIXTURES, parse_fixture
from helpers import gen_model


@pytest.mark.parametrize("model_name,data_name", ALL_FIXTURES)
def test_fixture_round_trip(model_name, data_name):
    m = parse_fixture(model_name, data_name)
    again = parse(SourceUnit(print_pivot(m)))
    assert ir.model_equals(again, m)


def test_empty_model_prints_header_only():
    assert print_pivot(ir.Model("M", ())) == "model M;\n"


def test_predicate_is_unprintable():
    m = ir.Model("M", (ir.Predicate("p", (), ()),))
    with pytest.raises(UnprintableError):
        print_pivot(m)


def test_record_is_unprintable():
    m = ir.Model("M", (ir.Record("r", (ir.Variable("x", "int"),)),))
    with pytest.raises(UnprintableError):
        print_pivot(m)


def test_interval_value_is_unprintable():
    with pytest.raises(UnprintableError):
        print_expression(ir.IntervalValue(1.0, 2.0))


def test_print_deterministic(golfers):
    assert print_pivot(golfers) == print_pivot(golfers)


def test_expression_texts():
    cases = {
        "1 + 2 * 3": ir.AlgBinaryOp("+", ir.IntValue(1),
                                    ir.AlgBinaryOp("*", ir.IntValue(2), ir.IntValue(3))),
        "(1 + 2) * 3": ir.AlgBinaryOp("*",
                                      ir.AlgBinaryOp("+", ir.IntValue(1), ir.IntValue(2)),
                                      ir.IntValue(3)),
        "x ^ y ^ z": ir.AlgBinaryOp("^", ir.VarOccurrence("x"),
                                    ir.AlgBinaryOp("^", ir.VarOccurrence("y"), ir.VarOccurrence("z"))),
        "(x ^ y) ^ z": ir.AlgBinaryOp("^",
                                      ir.AlgBinaryOp("^", ir.VarOccurrence("x"), ir.VarOccurrence("y")),
                                      ir.VarOccurrence("z")),
        "-x ^ 2": ir.AlgUnaryOp("neg", ir.AlgBinaryOp("^", ir.VarOccurrence("x"), ir.IntValue(2))),
        "(-x) ^ 2": ir.AlgBinaryOp("^", ir.AlgUnaryOp("neg", ir.VarOccurrence("x")), ir.IntValue(2)),
        "-(x * 2)": ir.AlgUnaryOp("neg", ir.AlgBinaryOp("*", ir.VarOccurrence("x"), ir.IntValue(2))),
    }
    for text, tree in cases.items():
        assert print_expression(tree) == text
        assert parse_expression(text) == tree


# ---- structural round trip over generated expressions ----

_names = st.sampled_from(["x", "y", "zz", "q1"])


def _exprs(depth):
    leaf = st.one_of(
        st.integers(-20, 20).map(ir.IntValue),
        st.booleans().map(ir.BoolValue),
        _names.map(ir.VarOccurrence),
    )
    if depth == 0:
        return leaf
    sub = _exprs(depth - 1)
    return st.one_of(
        leaf,
        st.tuples(st.sampled_from(["+", "-", "*", "/", "^"]), sub, sub).map(
            lambda t: ir.AlgBinaryOp(*t)
        ),
        st.tuples(st.sampled_from(list(ir.COMPARISON_OPS)), sub, sub).map(
            lambda t: ir.BoolBinaryOp(*t)
        ),
        st.tuples(st.sampled_from(["and", "or", "implies", "iff"]), sub, sub).map(
            lambda t: ir.BoolBinaryOp(*t)
        ),
        sub.map(lambda e: ir.BoolUnaryOp("not", e)),
        sub.filter(lambda e: not isinstance(e, (ir.IntValue, ir.RealValue))).map(
            lambda e: ir.AlgUnaryOp("neg", e)
        ),
        st.tuples(sub, sub).map(lambda t: ir.SetBinaryOp("intersect", *t)),
        sub.map(lambda e: ir.SetFunction("card", e)),
        st.lists(sub, min_size=0, max_size=3).map(lambda xs: ir.SetValue(tuple(xs))),
        st.tuples(_names, sub).map(lambda t: ir.VarOccurrence(t[0], (t[1],))),
    )


@given(_exprs(3))
@settings(max_examples=300, deadline=None)
def test_expression_print_parse_round_trip(e):
    assert parse_expression(print_expression(e)) == e


def test_random_model_round_trip_sample():
    rng = random.Random(7)
    for _ in range(50):
        m = gen_model(rng)
        again = parse(SourceUnit(print_pivot(m)))
        assert ir.model_equals(again, m)


def test_expr_domain_round_trip():
    m = parse(SourceUnit(
        "model D;\nint set base in 1..4;\nint set narrowed in base;\n"
    ))
    narrowed = m.elements[1]
    assert isinstance(narrowed.domain, ir.ExprDomain)
    assert ir.model_equals(parse(SourceUnit(print_pivot(m))), m)
