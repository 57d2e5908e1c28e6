"""ASCII surface syntax for expressions and obligations.

Output is fully parenthesised around every compound operand, so that
``parse_expr(pretty(e)) == e`` holds for any expression.
"""
from __future__ import annotations

from . import ast as A

_ATOMIC = (A.Var, A.OpApp, A.FalseE, A.TrueE, A.EmptySet, A.SetEnum,
           A.SetFilter, A.SetMap, A.Lambda, A.FcnSet, A.IntSet, A.NatSet,
           A.Boolified, A.AlphaApp, A.OmegaApp, A.IsAFcn, A.StrLit,
           A.TupleLit, A.RecordLit, A.FcnApp, A.RecordAccess)

_BINARY = {
    A.And: "/\\", A.Or: "\\/", A.Implies: "=>", A.Iff: "<=>", A.Eq: "=",
    A.In: "\\in", A.Cup: "\\cup", A.Plus: "+", A.Times: "*", A.Lt: "<",
    A.Range: "..",
}


def _operand(e: A.Expr) -> str:
    s = pretty(e)
    if isinstance(e, _ATOMIC) or (isinstance(e, A.IntLit) and e.value >= 0):
        return s
    return f"({s})"


def pretty(e: A.Expr) -> str:
    t = type(e)
    if t is A.Var:
        return e.name
    if t is A.OpApp:
        return f"{e.op}({', '.join(pretty(x) for x in e.args)})"
    if t is A.FalseE:
        return "FALSE"
    if t is A.TrueE:
        return "TRUE"
    if t in _BINARY:
        return f"{_operand(e.a)} {_BINARY[t]} {_operand(e.b)}"
    if t is A.Not:
        return f"~{_operand(e.a)}"
    if t is A.Forall:
        return f"\\A {e.var} : {pretty(e.body)}"
    if t is A.Exists:
        return f"\\E {e.var} : {pretty(e.body)}"
    if t is A.EmptySet:
        return "{}"
    if t is A.SetEnum:
        return "{" + ", ".join(pretty(x) for x in e.elems) + "}"
    if t is A.Subset:
        return f"SUBSET {_operand(e.a)}"
    if t is A.Union:
        return f"UNION {_operand(e.a)}"
    if t is A.SetFilter:
        return f"{{{e.var} \\in {_operand(e.dom)} : {pretty(e.pred)}}}"
    if t is A.SetMap:
        return f"{{{_operand(e.expr)} : {e.var} \\in {_operand(e.dom)}}}"
    if t is A.Choose:
        return f"CHOOSE {e.var} : {pretty(e.pred)}"
    if t is A.FcnApp:
        return f"{_operand(e.f)}[{pretty(e.a)}]"
    if t is A.Domain:
        return f"DOMAIN {_operand(e.a)}"
    if t is A.Lambda:
        return f"[{e.var} \\in {_operand(e.dom)} |-> {pretty(e.body)}]"
    if t is A.FcnSet:
        return f"[{_operand(e.a)} -> {_operand(e.b)}]"
    if t is A.IntLit:
        return str(e.value)
    if t is A.IntSet:
        return "Int"
    if t is A.NatSet:
        return "Nat"
    if t is A.Neg:
        return f"-({pretty(e.a)})"
    if t is A.Ite:
        return f"IF {pretty(e.c)} THEN {pretty(e.a)} ELSE {pretty(e.b)}"
    if t is A.Boolified:
        return f"$bool({pretty(e.a)})"
    if t is A.AlphaApp:
        return f"$alpha({pretty(e.f)}, {pretty(e.a)})"
    if t is A.OmegaApp:
        return f"$omega({pretty(e.f)}, {pretty(e.a)})"
    if t is A.IsAFcn:
        return f"IsAFcn({pretty(e.a)})"
    if t is A.StrLit:
        return '"' + e.value + '"'
    if t is A.TupleLit:
        return "<<" + ", ".join(pretty(x) for x in e.elems) + ">>"
    if t is A.RecordLit:
        return "[" + ", ".join(f"{h} |-> {pretty(v)}" for h, v in zip(e.labels, e.values)) + "]"
    if t is A.RecordAccess:
        return f"{_operand(e.a)}.{e.label}"
    raise TypeError(f"cannot print {t.__name__}")


def pretty_obligation(ob: A.ProofObligation) -> str:
    decls = []
    for name, arity in ob.constants:
        if arity:
            decls.append(f"NEW {name}({', '.join(['_'] * arity)})")
        else:
            decls.append(f"NEW {name}")
    items = decls + [pretty(h) for h in ob.hypotheses]
    lines = []
    if items:
        lines.append("ASSUME " + ",\n       ".join(items))
    lines.append("PROVE  " + pretty(ob.goal))
    return "\n".join(lines) + "\n"
