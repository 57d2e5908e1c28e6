"""Abstraction of expressions that rewriting cannot eliminate.

A maximal non-basic subterm is replaced by a fresh operator applied to the
variables it borrows from enclosing binders, and its meaning is recorded as a
hypothesis: ``\\A xs : k(xs) = psi`` for sets and functions, and the usual
choice axioms for ``CHOOSE``.  Alpha-equal subterms share one symbol.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from . import ast as A
from .normalize import is_nonbasic_node

SET_LIKE, FUNCTION_LIKE, CHOOSE = "set-like", "function-like", "choose"


@dataclass(frozen=True)
class Definition:
    op: str
    params: tuple
    body: A.Expr
    kind: str

    def app(self, args=None) -> A.OpApp:
        args = self.params if args is None else args
        return A.OpApp(self.op, tuple(A.Var(p) if isinstance(p, str) else p for p in args))

    def equation(self) -> A.Expr:
        return _forall_all(self.params, A.Eq(self.app(), self.body))


@dataclass
class NameSupply:
    """Deterministic source of fresh operator names.

    Carries the definitions made so far, so that a subterm abstracted in one
    round maps to the same symbol in every later round.
    """
    avoid: set = field(default_factory=set)
    counter: int = 0
    known: dict = field(default_factory=dict)  # canonical key -> Definition

    def fresh(self, prefix: str) -> str:
        while True:
            self.counter += 1
            name = f"{prefix}{self.counter}"
            if name not in self.avoid:
                self.avoid.add(name)
                return name


def _forall_all(names, body):
    for n in reversed(tuple(names)):
        body = A.Forall(n, body)
    return body


def _key(params, body) -> A.Expr:
    sub = {p: A.Var(f"%param{i}") for i, p in enumerate(params)}
    return A.canonical(A.substitute_many(body, sub))


def _kind(e: A.Expr) -> str:
    if isinstance(e, A.Choose):
        return CHOOSE
    if isinstance(e, A.Lambda):
        return FUNCTION_LIKE
    return SET_LIKE


def is_target(e: A.Expr) -> bool:
    # function application always rewrites away, so it is never abstracted
    return is_nonbasic_node(e) and not isinstance(e, A.FcnApp)


def abstract_non_basic(phi: A.Expr, supply: NameSupply):
    """Replace maximal non-basic subterms of ``phi``.

    Returns the new formula and the definitions created by this call (shared
    definitions from earlier calls are reused but not returned again).
    """
    new_defs: list[Definition] = []

    def walk(e, bound):
        if is_target(e):
            fv = A.free_vars(e)
            params = []
            for v in bound:
                if v in fv and v not in params:
                    params.append(v)
            params = tuple(params)
            key = _key(params, e)
            d = supply.known.get(key)
            if d is None:
                prefix = "c" if isinstance(e, A.Choose) else "k"
                d = Definition(supply.fresh(prefix), params, e, _kind(e))
                supply.known[key] = d
                new_defs.append(d)
            return d.app(params)
        if isinstance(e, (A.Forall, A.Exists)):
            inner = [v for v in bound if v != e.var] + [e.var]
            return A.map_children(e, lambda c: walk(c, inner))
        return A.map_children(e, lambda c: walk(c, bound))

    return walk(phi, []), new_defs


def _rename_apart(d: Definition, avoid: set) -> tuple[tuple, A.Expr]:
    """Parameters of ``d`` renamed away from ``avoid``, with its body."""
    names, sub = [], {}
    taken = set(avoid)
    for p in d.params:
        q = p if p not in taken else A.fresh_name(p, taken | A.all_names(d.body))
        taken.add(q)
        names.append(q)
        if q != p:
            sub[p] = A.Var(q)
    return tuple(names), A.substitute_many(d.body, sub)


def _pairs(new, old):
    """Unordered pairs with at least one member in ``new``, self-pairs included."""
    out = []
    for i, d in enumerate(new):
        for o in old:
            out.append((o, d))
        for e in new[: i + 1]:
            out.append((e, d))
    return out


def contraction_instances(new, old=()) -> list:
    """Extensionality instances between set-like definitions.

    ``\\A ys1, ys2 : (\\A z : z \\in k1(ys1) <=> z \\in k2(ys2)) => k1(ys1) = k2(ys2)``
    """
    new = [d for d in new if d.kind == SET_LIKE]
    old = [d for d in old if d.kind == SET_LIKE]
    out = []
    for d1, d2 in _pairs(new, old):
        if d1 is d2 and not d1.params:
            continue
        ps1 = d1.params
        ps2, _ = _rename_apart(d2, set(ps1))
        a1, a2 = d1.app(ps1), d2.app(ps2)
        z = A.fresh_name("z", set(ps1) | set(ps2))
        same = A.Forall(z, A.Iff(A.In(A.Var(z), a1), A.In(A.Var(z), a2)))
        out.append(_forall_all(ps1 + ps2, A.Implies(same, A.Eq(a1, a2))))
    return out


def choose_axioms(new, old=()) -> list:
    """Witness and determinism axioms for choice definitions."""
    new = [d for d in new if d.kind == CHOOSE]
    old = [d for d in old if d.kind == CHOOSE]
    out = []
    for d in new:
        ch = d.body
        witness = A.substitute(ch.pred, ch.var, d.app())
        out.append(_forall_all(d.params, A.Iff(A.Exists(ch.var, ch.pred), witness)))
    for d1, d2 in _pairs(new, old):
        if d1 is d2 and not d1.params:
            continue
        ps1 = d1.params
        ps2, body2 = _rename_apart(d2, set(ps1) | A.all_names(d1.body))
        c1, c2 = d1.body, body2
        x = A.fresh_name("x", A.all_names(c1) | A.all_names(c2) | set(ps1) | set(ps2))
        p = A.substitute(c1.pred, c1.var, A.Var(x))
        q = A.substitute(c2.pred, c2.var, A.Var(x))
        same = A.Forall(x, A.Iff(p, q))
        out.append(_forall_all(ps1 + ps2, A.Implies(same, A.Eq(d1.app(ps1), d2.app(ps2)))))
    return out


def definition_hypotheses(new) -> list:
    """Defining equations for set-like and function-like definitions."""
    return [d.equation() for d in new if d.kind != CHOOSE]
