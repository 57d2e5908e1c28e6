import pytest
from hypothesis import given

from tla2smt import ast as A
from tla2smt.errors import TlaSyntaxError, UnknownSymbol
from tla2smt.parser import parse_expr, parse_file, parse_obligation
from tla2smt.printer import pretty, pretty_obligation

from strategies import formulas, surface_formulas


def test_declared_constant():
    ob = parse_obligation("ASSUME NEW f PROVE f = f")
    assert ob.goal == A.Eq(A.Var("f"), A.Var("f"))
    assert ob.constants == (("f", 0),)
    assert ob.hypotheses == ()


def test_double_negation_goal():
    ob = parse_obligation("PROVE \\A x : (~ ~ x) <=> x")
    x = A.Var("x")
    assert ob.goal == A.Forall("x", A.Iff(A.Not(A.Not(x)), x))


def test_int_membership_goal():
    ob = parse_obligation("PROVE 3 \\in Int")
    assert ob.goal == A.In(A.IntLit(3), A.IntSet())


def test_operator_declaration_and_hypotheses():
    ob = parse_obligation("ASSUME NEW P(_), NEW S, NEW a \\in S, P(a) PROVE \\E x \\in S : P(x)")
    assert dict(ob.constants) == {"P": 1, "S": 0, "a": 0}
    assert ob.hypotheses == (A.In(A.Var("a"), A.Var("S")), A.OpApp("P", (A.Var("a"),)))


def test_undeclared_symbol_rejected():
    with pytest.raises(UnknownSymbol):
        parse_obligation("ASSUME NEW S PROVE x \\in S")


def test_syntax_error_has_position():
    with pytest.raises(TlaSyntaxError) as ex:
        parse_obligation("PROVE 1 +")
    assert (ex.value.line, ex.value.col) == (1, 10)


def test_trailing_garbage_rejected():
    with pytest.raises(TlaSyntaxError):
        parse_obligation("PROVE TRUE TRUE")


def test_precedence():
    e = parse_expr("a \\/ b /\\ c => d")
    a, b, c, d = (A.Var(n) for n in "abcd")
    assert e == A.Implies(A.Or(a, A.And(b, c)), d)
    assert parse_expr("1 + 2 * 3 < 4") == A.Lt(
        A.Plus(A.IntLit(1), A.Times(A.IntLit(2), A.IntLit(3))), A.IntLit(4))


def test_parse_file_names_each_obligation():
    obs = parse_file("ASSUME NEW a PROVE a = a\n\nPROVE TRUE", "two")
    assert [o.name for o in obs] == ["two#1", "two#2"]
    # declarations do not leak between obligations
    with pytest.raises(UnknownSymbol):
        parse_file("ASSUME NEW a PROVE a = a\nPROVE a = a", "leak")


def test_single_obligation_keeps_file_name():
    assert [o.name for o in parse_file("PROVE TRUE", "one")] == ["one"]


@given(formulas())
def test_round_trip(e):
    assert parse_expr(pretty(e)) == e


@given(surface_formulas())
def test_parse_print_parse_is_identity(e):
    once = parse_expr(pretty(A.desugar(e)))
    assert parse_expr(pretty(once)) == once


def test_obligation_round_trip():
    text = "ASSUME NEW S, NEW P(_), \\A x \\in S : P(x)\nPROVE  {x \\in S : P(x)} = S"
    ob = parse_obligation(text)
    assert parse_obligation(pretty_obligation(ob)) == ob
