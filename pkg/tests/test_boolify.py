import pytest
from hypothesis import given

from tla2smt import ast as A
from tla2smt.boolify import AsBool, AsValue, boolify, check_marks, erase
from tla2smt.errors import BoolifyTypeError
from tla2smt.parser import parse_expr

from strategies import formulas

x = A.Var("x")


def b(v):
    return A.Boolified(v)


def test_untyped_equation_marks_only_the_negated_side():
    e = boolify(parse_expr("\\A x : (~~x) = x"))
    assert e == A.Forall("x", A.Eq(A.Not(A.Not(b(x))), x))


def test_equivalence_marks_both_sides():
    e = boolify(parse_expr("\\A x : (~~x) <=> x"))
    assert e == A.Forall("x", A.Iff(A.Not(A.Not(b(x))), b(x)))


def test_set_in_formula_position_is_a_type_error():
    with pytest.raises(BoolifyTypeError):
        boolify(parse_expr("\\A x : {} /\\ x"))


def test_marks_function_application_and_choose():
    e = boolify(parse_expr("f[a] /\\ (CHOOSE y : y)"))
    assert e == A.And(b(A.FcnApp(A.Var("f"), A.Var("a"))),
                      b(A.Choose("y", b(A.Var("y")))))


def test_value_positions_stay_unmarked():
    e = boolify(parse_expr("x \\in S"))
    assert e == A.In(x, A.Var("S"))
    assert boolify(x, AsValue) == x


def test_ite_in_formula_position():
    e = boolify(parse_expr("IF p THEN q ELSE FALSE"), AsBool)
    assert e == A.Ite(b(A.Var("p")), b(A.Var("q")), A.FalseE())


@given(formulas())
def test_idempotent(e):
    once = boolify(e)
    assert boolify(once) == once


@given(formulas())
def test_marks_wrap_permitted_terms(e):
    assert check_marks(boolify(e))


@given(formulas())
def test_erasure_is_preserved(e):
    assert erase(boolify(e)) == erase(e)


def test_check_marks_rejects_mark_on_set():
    assert not check_marks(A.Boolified(A.EmptySet()))
