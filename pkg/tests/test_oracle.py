import pytest

from tla2smt import ast as A
from tla2smt.errors import CarrierOverflow
from tla2smt.normalize import RULES_BY_ID, apply_at
from tla2smt.oracle import (EMPTY, FALSE, TRUE, Evaluator, Int, canon, elems,
                            evaluate, find_counterexample, make_fcn, member,
                            pure_sets, standard_carrier, valid)
from tla2smt.parser import parse_expr

from rule_instances import INSTANCES


def test_membership_in_enumeration():
    env = {"x": Int(1), "a": Int(1), "b": Int(2)}
    assert evaluate(parse_expr("x \\in {a, b}"), env) == TRUE
    assert evaluate(parse_expr("x \\in {b}"), env) == FALSE


def test_union_rule_agrees_on_all_valuations():
    lhs = parse_expr("x \\in UNION S")
    rhs = RULES_BY_ID["mem_union"].apply(lhs)
    assert find_counterexample(lhs, rhs) is None


def test_false_choice_is_unique():
    e = parse_expr("(CHOOSE x : FALSE) = (CHOOSE x : ~(x = x))")
    assert evaluate(e, {}) == TRUE


def test_equivalent_predicates_choose_the_same_value():
    e = parse_expr("(CHOOSE x : x \\in S /\\ x \\in T) = (CHOOSE y : y \\in T /\\ y \\in S)")
    assert valid(e) is True


def test_carrier_shape():
    carrier = standard_carrier()
    assert len(carrier) == len(set(carrier))
    assert len(pure_sets(2)) == 4
    assert {Int(i) for i in range(-2, 3)} <= set(carrier)
    assert TRUE in carrier and FALSE in carrier


def test_membership_is_extensional():
    # a set with exactly the elements of a function is that function
    f = make_fcn([(Int(1), TRUE)])
    assert canon(elems(f)) == f
    assert member(EMPTY, canon(frozenset([EMPTY])))
    assert not member(Int(1), EMPTY)


def test_powerset_overflow():
    big = canon(frozenset(Int(i) for i in range(13)))
    ev = Evaluator(standard_carrier(), {})
    with pytest.raises(CarrierOverflow):
        ev.eval(A.Subset(A.Var("s")), {"s": big})


def test_function_application_outside_domain_is_fixed():
    e = parse_expr("[x \\in {1} |-> x][2] = [y \\in {1} |-> y][2]")
    assert evaluate(e, {}) == TRUE


def test_oracle_catches_unsound_rules():
    wrong = [
        ("x \\in S \\cup T", "x \\in S /\\ x \\in T"),
        ("x \\in UNION S", "x \\in S"),
        ("x \\in SUBSET S", "\\A z : z \\in S => z \\in x"),
        ("[z \\in S |-> F(z)][a]", "F(a)"),
        ("(~~x) = x", "TRUE"),
        ("x \\in a .. b", "~(x < a) /\\ ~(b < x)"),
    ]
    for lhs, rhs in wrong:
        assert find_counterexample(parse_expr(lhs), parse_expr(rhs)) is not None, lhs


@pytest.mark.parametrize("rid,src", [(r, s) for r, ss in INSTANCES.items() for s in ss])
def test_rule_instance_sound(rid, src):
    e = parse_expr(src)
    new, fired = apply_at(e)
    assert fired == rid
    assert find_counterexample(e, new) is None
