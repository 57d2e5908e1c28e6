"""Mark sub-expressions used as propositions.

Under the liberal reading every use of a term ``e`` as a formula means
``e = TRUE``; such uses are wrapped in ``Boolified``.  Expressions that are
syntactically never Boolean (sets, functions, numbers) are rejected when
they occur in a formula position.
"""
from __future__ import annotations

import enum

from . import ast as A
from .errors import BoolifyTypeError


class ExpectedShape(enum.Enum):
    AsBool = "bool"
    AsValue = "value"


AsBool = ExpectedShape.AsBool
AsValue = ExpectedShape.AsValue

MARKABLE = (A.Var, A.OpApp, A.FcnApp, A.AlphaApp, A.OmegaApp, A.Choose)

NON_BOOLEAN = (A.EmptySet, A.SetEnum, A.Subset, A.Union, A.Cup, A.SetFilter,
               A.SetMap, A.Lambda, A.FcnSet, A.IntLit, A.IntSet, A.NatSet,
               A.Neg, A.Plus, A.Times, A.Range, A.Domain, A.StrLit,
               A.TupleLit, A.RecordLit)

_CONNECTIVES = (A.Not, A.And, A.Or, A.Implies, A.Iff)


def boolify(e: A.Expr, shape: ExpectedShape = AsBool) -> A.Expr:
    t = type(e)
    if t is A.Boolified:
        inner = boolify(e.a, AsValue)
        if not isinstance(inner, MARKABLE):
            raise BoolifyTypeError(f"mark on non-term {inner}")
        return A.Boolified(inner)
    if shape is AsBool:
        if isinstance(e, NON_BOOLEAN):
            raise BoolifyTypeError(f"non-Boolean expression in formula position: {e}")
        if isinstance(e, MARKABLE):
            return A.Boolified(boolify(e, AsValue))
    if t in _CONNECTIVES or t in (A.Forall, A.Exists):
        return A.map_children(e, lambda c: boolify(c, AsBool))
    if t is A.Eq:
        return _equality(e)
    if t is A.Ite:
        return A.Ite(boolify(e.c, AsBool), boolify(e.a, shape), boolify(e.b, shape))
    if t is A.SetFilter:
        return A.SetFilter(e.var, boolify(e.dom, AsValue), boolify(e.pred, AsBool))
    if t is A.Choose:
        return A.Choose(e.var, boolify(e.pred, AsBool))
    # remaining constructors take value operands
    return A.map_children(e, lambda c: boolify(c, AsValue))


def _boolean_shaped(e: A.Expr) -> bool:
    if isinstance(e, A.Ite):
        return _boolean_shaped(e.a) and _boolean_shaped(e.b)
    return A.is_formula(e)


def _equality(e: A.Eq) -> A.Expr:
    # A formula compared with a formula is an equivalence; a formula compared
    # with an arbitrary value stays an equation over values, so an unknown
    # side is left unmarked.
    if _boolean_shaped(e.a) and _boolean_shaped(e.b):
        return A.Eq(boolify(e.a, AsBool), boolify(e.b, AsBool))
    return A.Eq(boolify(e.a, AsValue), boolify(e.b, AsValue))


def boolify_obligation(ob: A.ProofObligation) -> A.ProofObligation:
    return ob.replace(
        hypotheses=[boolify(h, AsBool) for h in ob.hypotheses],
        goal=boolify(ob.goal, AsBool),
    )


def check_marks(e: A.Expr) -> bool:
    """True iff every ``Boolified`` node wraps a permitted term."""
    return all(isinstance(x.a, MARKABLE)
               for x in A.subterms(e) if isinstance(x, A.Boolified))


def erase(e: A.Expr) -> A.Expr:
    """Drop all Boolification marks."""
    if isinstance(e, A.Boolified):
        return erase(e.a)
    return A.map_children(e, erase)
