"""Expression language for untyped set-theoretic proof obligations.

Every node is an immutable dataclass.  Binding constructs name their bound
variable explicitly; ``alpha_equal`` and ``canonical`` give the
equality-up-to-renaming that the rest of the pipeline relies on.
"""
from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Callable, Iterable, Iterator

__all__ = [
    "Expr", "Var", "OpApp", "FalseE", "TrueE", "Not", "And", "Or", "Implies",
    "Iff", "Forall", "Exists", "Eq", "In", "EmptySet", "SetEnum", "Subset",
    "Union", "Cup", "SetFilter", "SetMap", "Choose", "FcnApp", "Domain",
    "Lambda", "FcnSet", "IntLit", "IntSet", "NatSet", "Neg", "Plus", "Times",
    "Lt", "Range", "Ite", "Boolified", "AlphaApp", "OmegaApp", "IsAFcn",
    "StrLit", "TupleLit", "RecordLit", "RecordAccess", "ProofObligation",
    "free_vars", "substitute", "substitute_many", "replace_term",
    "alpha_equal", "canonical", "desugar", "fresh_name", "all_names",
    "subterms", "size", "conj", "disj", "is_formula", "bound_names",
]


class Expr:
    """Base class of all expression nodes.

    Subclasses list their sub-expression fields in ``_sub``.  Fields holding
    tuples of expressions are listed in ``_seq``.  A binder declares
    ``_var`` (the field holding the bound name) and ``_scope`` (the fields in
    which that name is bound).
    """

    _sub: tuple[str, ...] = ()
    _seq: tuple[str, ...] = ()
    _var: str | None = None
    _scope: tuple[str, ...] = ()

    def __str__(self) -> str:
        from .printer import pretty

        return pretty(self)


def _node(cls):
    cls = dataclass(frozen=True)(cls)
    plain_hash = cls.__hash__

    # nodes are used as memo keys all over the pipeline; hash once per node
    def __hash__(self):
        try:
            return self.__dict__["_h"]
        except KeyError:
            h = plain_hash(self)
            object.__setattr__(self, "_h", h)
            return h

    cls.__hash__ = __hash__
    return cls


@_node
class Var(Expr):
    name: str


@_node
class OpApp(Expr):
    op: str
    args: tuple
    _seq = ("args",)


@_node
class FalseE(Expr):
    pass


@_node
class TrueE(Expr):
    pass


@_node
class Not(Expr):
    a: Expr
    _sub = ("a",)


@_node
class And(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class Or(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class Implies(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class Iff(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class Forall(Expr):
    var: str
    body: Expr
    _sub = ("body",)
    _var = "var"
    _scope = ("body",)


@_node
class Exists(Expr):
    var: str
    body: Expr
    _sub = ("body",)
    _var = "var"
    _scope = ("body",)


@_node
class Eq(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class In(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class EmptySet(Expr):
    pass


@_node
class SetEnum(Expr):
    elems: tuple
    _seq = ("elems",)


@_node
class Subset(Expr):
    a: Expr
    _sub = ("a",)


@_node
class Union(Expr):
    a: Expr
    _sub = ("a",)


@_node
class Cup(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class SetFilter(Expr):
    var: str
    dom: Expr
    pred: Expr
    _sub = ("dom", "pred")
    _var = "var"
    _scope = ("pred",)


@_node
class SetMap(Expr):
    expr: Expr
    var: str
    dom: Expr
    _sub = ("expr", "dom")
    _var = "var"
    _scope = ("expr",)


@_node
class Choose(Expr):
    var: str
    pred: Expr
    _sub = ("pred",)
    _var = "var"
    _scope = ("pred",)


@_node
class FcnApp(Expr):
    f: Expr
    a: Expr
    _sub = ("f", "a")


@_node
class Domain(Expr):
    a: Expr
    _sub = ("a",)


@_node
class Lambda(Expr):
    var: str
    dom: Expr
    body: Expr
    _sub = ("dom", "body")
    _var = "var"
    _scope = ("body",)


@_node
class FcnSet(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class IntLit(Expr):
    value: int


@_node
class IntSet(Expr):
    pass


@_node
class NatSet(Expr):
    pass


@_node
class Neg(Expr):
    a: Expr
    _sub = ("a",)


@_node
class Plus(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class Times(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class Lt(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class Range(Expr):
    a: Expr
    b: Expr
    _sub = ("a", "b")


@_node
class Ite(Expr):
    c: Expr
    a: Expr
    b: Expr
    _sub = ("c", "a", "b")


@_node
class Boolified(Expr):
    a: Expr
    _sub = ("a",)


@_node
class AlphaApp(Expr):
    f: Expr
    a: Expr
    _sub = ("f", "a")


@_node
class OmegaApp(Expr):
    f: Expr
    a: Expr
    _sub = ("f", "a")


@_node
class IsAFcn(Expr):
    a: Expr
    _sub = ("a",)


@_node
class StrLit(Expr):
    value: str


@_node
class TupleLit(Expr):
    elems: tuple
    _seq = ("elems",)


@_node
class RecordLit(Expr):
    labels: tuple
    values: tuple
    _seq = ("values",)


@_node
class RecordAccess(Expr):
    a: Expr
    label: str
    _sub = ("a",)


FORMULA_TYPES = (FalseE, TrueE, Not, And, Or, Implies, Iff, Forall, Exists,
                 Eq, In, Lt, IsAFcn, Boolified)


def is_formula(e: Expr) -> bool:
    """True when ``e`` denotes a truth value by its top-level constructor."""
    if isinstance(e, FORMULA_TYPES):
        return True
    if isinstance(e, Ite):
        return is_formula(e.a) and is_formula(e.b)
    return False


@dataclass(frozen=True)
class ProofObligation:
    name: str
    hypotheses: tuple
    goal: Expr
    constants: tuple = ()  # (name, arity) pairs, in declaration order
    defined: frozenset = field(default_factory=frozenset)  # fresh ops from abstraction

    def arities(self) -> dict[str, int]:
        return dict(self.constants)

    def replace(self, **kw) -> "ProofObligation":
        data = {f.name: getattr(self, f.name) for f in fields(self)}
        data.update(kw)
        if "hypotheses" in kw:
            data["hypotheses"] = tuple(data["hypotheses"])
        return ProofObligation(**data)

    def formulas(self) -> tuple:
        return tuple(self.hypotheses) + (self.goal,)


# ---------------------------------------------------------------------------
# generic traversal


def children(e: Expr) -> Iterator[tuple[Expr, str | None]]:
    """Yield (child, bound-name-or-None) pairs in field order."""
    bound = getattr(e, e._var) if e._var else None
    for name in e._sub:
        yield getattr(e, name), (bound if name in e._scope else None)
    for name in e._seq:
        for c in getattr(e, name):
            yield c, None


def map_children(e: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    if not e._sub and not e._seq:
        return e
    kw = {}
    changed = False
    for name in e._sub:
        old = getattr(e, name)
        new = fn(old)
        changed |= new is not old
        kw[name] = new
    for name in e._seq:
        old = getattr(e, name)
        new = tuple(fn(c) for c in old)
        changed |= any(n is not o for n, o in zip(new, old))
        kw[name] = new
    if not changed:
        return e
    return _rebuild(e, kw)


def _rebuild(e: Expr, kw: dict) -> Expr:
    data = {f.name: getattr(e, f.name) for f in fields(e)}
    data.update(kw)
    return type(e)(**data)


def subterms(e: Expr) -> Iterator[Expr]:
    """Pre-order iteration over all sub-expressions, including ``e``."""
    stack = [e]
    while stack:
        x = stack.pop()
        yield x
        stack.extend(reversed([c for c, _ in children(x)]))


def size(e: Expr) -> int:
    return sum(1 for _ in subterms(e))


def free_vars(e: Expr) -> frozenset:
    if isinstance(e, Var):
        return frozenset((e.name,))
    out: set = set()
    for c, b in children(e):
        fv = free_vars(c)
        if b is not None:
            fv = fv - {b}
        out |= fv
    return frozenset(out)


def bound_names(e: Expr) -> set:
    return {getattr(x, x._var) for x in subterms(e) if x._var}


def all_names(e: Expr) -> set:
    """Every variable or operator name mentioned anywhere in ``e``."""
    out = set()
    for x in subterms(e):
        if isinstance(x, Var):
            out.add(x.name)
        elif isinstance(x, OpApp):
            out.add(x.op)
        elif x._var:
            out.add(getattr(x, x._var))
    return out


def fresh_name(base: str, avoid) -> str:
    base = base.rstrip("0123456789").rstrip("_") or "v"
    if base not in avoid:
        return base
    i = 1
    while f"{base}_{i}" in avoid:
        i += 1
    return f"{base}_{i}"


# ---------------------------------------------------------------------------
# substitution


def substitute(e: Expr, x: str, a: Expr) -> Expr:
    """Capture-avoiding ``e[x <- a]``."""
    return substitute_many(e, {x: a})


def substitute_many(e: Expr, sub: dict) -> Expr:
    if not sub:
        return e
    if isinstance(e, Var):
        return sub.get(e.name, e)
    if not e._var:
        return map_children(e, lambda c: substitute_many(c, sub))
    v = getattr(e, e._var)
    inner = {k: t for k, t in sub.items() if k != v}
    scoped_fv = set()
    for name in e._scope:
        scoped_fv |= free_vars(getattr(e, name))
    inner = {k: t for k, t in inner.items() if k in scoped_fv}
    kw = {}
    incoming = set()
    for t in inner.values():
        incoming |= free_vars(t)
    if v in incoming:
        avoid = incoming | scoped_fv | set(inner) | set(sub)
        nv = fresh_name(v, avoid)
        inner = dict(inner)
        inner[v] = Var(nv)
        kw[e._var] = nv
    for name in e._sub:
        c = getattr(e, name)
        kw[name] = substitute_many(c, inner if name in e._scope else sub)
    return _rebuild(e, kw)


def replace_term(e: Expr, t: Expr, r: Expr) -> Expr:
    """Replace occurrences of the (open) term ``t`` by ``r`` in ``e``.

    Occurrences under a binder that captures a free variable of ``t`` are
    not occurrences of ``t``; binders that would capture ``r`` are renamed.
    """
    tfv = free_vars(t)
    rfv = free_vars(r)

    def go(x: Expr) -> Expr:
        if alpha_equal(x, t):
            return r
        if not x._var:
            return map_children(x, go)
        v = getattr(x, x._var)
        kw = {}
        if v in rfv:
            avoid = rfv | tfv | free_vars(x) | all_names(x)
            nv = fresh_name(v, avoid)
            for name in x._scope:
                kw[name] = substitute(getattr(x, name), v, Var(nv))
            kw[x._var] = nv
            x = _rebuild(x, kw)
            v = nv
            kw = {}
        for name in x._sub:
            c = getattr(x, name)
            kw[name] = c if (name in x._scope and v in tfv) else go(c)
        return _rebuild(x, kw)

    return go(e)


# ---------------------------------------------------------------------------
# alpha equivalence


def canonical(e: Expr, _env: dict | None = None, _depth: int = 0) -> Expr:
    """Rename every bound variable to a depth-indexed name.

    ``%<n>`` cannot be written in surface syntax, so canonical names never
    collide with free variables.  Two expressions are alpha-equal iff their
    canonical forms are equal.
    """
    env = _env or {}
    if isinstance(e, Var):
        return Var(env[e.name]) if e.name in env else e
    if not e._var:
        return map_children(e, lambda c: canonical(c, env, _depth))
    v = getattr(e, e._var)
    nv = f"%{_depth}"
    inner = dict(env)
    inner[v] = nv
    kw = {e._var: nv}
    for name in e._sub:
        c = getattr(e, name)
        if name in e._scope:
            kw[name] = canonical(c, inner, _depth + 1)
        else:
            kw[name] = canonical(c, env, _depth)
    return _rebuild(e, kw)


def alpha_equal(e1: Expr, e2: Expr) -> bool:
    if e1 is e2 or e1 == e2:
        return True
    return canonical(e1) == canonical(e2)


# ---------------------------------------------------------------------------
# helpers


def conj(items: Iterable[Expr]) -> Expr:
    items = list(items)
    if not items:
        return TrueE()
    out = items[-1]
    for x in reversed(items[:-1]):
        out = And(x, out)
    return out


def disj(items: Iterable[Expr]) -> Expr:
    items = list(items)
    if not items:
        return FalseE()
    out = items[-1]
    for x in reversed(items[:-1]):
        out = Or(x, out)
    return out


def desugar(e: Expr) -> Expr:
    """Rewrite tuples, records and record access into plain functions.

    ``<<a, b>>`` becomes ``[i \\in 1..2 |-> IF i = 1 THEN a ELSE b]`` and a
    record ``[h |-> v]`` becomes a function over the set of its labels.
    """
    e = map_children(e, desugar)
    if isinstance(e, TupleLit):
        n = len(e.elems)
        avoid = set().union(*(free_vars(x) for x in e.elems)) if n else set()
        i = fresh_name("i", avoid)
        keys = [IntLit(k + 1) for k in range(n)]
        return Lambda(i, Range(IntLit(1), IntLit(n)), _select(Var(i), keys, list(e.elems)))
    if isinstance(e, RecordLit):
        avoid = set().union(*(free_vars(x) for x in e.values)) if e.values else set()
        s = fresh_name("s", avoid)
        keys = [StrLit(h) for h in e.labels]
        dom = SetEnum(tuple(keys)) if keys else EmptySet()
        return Lambda(s, dom, _select(Var(s), keys, list(e.values)))
    if isinstance(e, RecordAccess):
        return FcnApp(e.a, StrLit(e.label))
    if isinstance(e, SetEnum) and not e.elems:
        return EmptySet()
    return e


def _select(v: Expr, keys: list, vals: list) -> Expr:
    if not vals:
        return EmptySet()
    out = vals[-1]
    for k, x in zip(reversed(keys[:-1]), reversed(vals[:-1])):
        out = Ite(Eq(v, k), x, out)
    return out
