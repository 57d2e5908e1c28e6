"""Brute-force evaluator over small finite universes.

Values are hereditarily finite sets (``frozenset``) plus atoms: integers,
the two Booleans, strings, finite functions and opaque placeholders for
unspecified results.  In untyped set theory every value is a set, so atoms
need elements too: atom ``a`` has the single element ``Ghost(a)``, and the
ghost has elements ``{Ghost(a), {}}``.  Set values whose elements coincide
with an atom's are canonicalised back to the atom, which keeps membership
extensional on everything the evaluator can build.

Quantifiers range over a finite domain: the carrier, the values bound in
the valuation, and the values of every quantifier-free-closed subterm,
closed under taking elements.  This is bounded relativisation, so the
oracle can refute but never prove validity over infinite domains.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable

from . import ast as A
from .errors import CarrierOverflow


@dataclass(frozen=True)
class Int:
    v: int


@dataclass(frozen=True)
class Bool:
    v: bool


@dataclass(frozen=True)
class Str:
    v: str


@dataclass(frozen=True)
class Fcn:
    graph: tuple  # sorted (arg, value) pairs

    def lookup(self, a):
        for k, v in self.graph:
            if k == a:
                return True, v
        return False, None

    def domain(self):
        return frozenset(k for k, _ in self.graph)


@dataclass(frozen=True)
class Opaque:
    tag: str


@dataclass(frozen=True)
class Ghost:
    of: object


@dataclass(frozen=True)
class Infinite:
    """Membership-only set; only Int and Nat and ranges built from them."""
    name: str
    test: Callable = None

    def __eq__(self, other):
        return isinstance(other, Infinite) and self.name == other.name

    def __hash__(self):
        return hash(("inf", self.name))


TRUE, FALSE = Bool(True), Bool(False)
EMPTY = frozenset()
ATOMS = (Int, Bool, Str, Fcn, Opaque)

INT_SET = Infinite("Int", lambda v: isinstance(v, Int))
NAT_SET = Infinite("Nat", lambda v: isinstance(v, Int) and v.v >= 0)

CHOOSE_NONE = Opaque("choose")
OMEGA = Opaque("omega")
ALPHA_OUT = Opaque("alpha")
ARITH = Opaque("arith")


def elems(v):
    """Element set of a value (a frozenset or an Infinite)."""
    if isinstance(v, (frozenset, Infinite)):
        return v
    if isinstance(v, Ghost):
        return frozenset((v, EMPTY))
    return frozenset((Ghost(v),))


def canon(s):
    """Canonical value for a set with elements ``s``."""
    if isinstance(s, Infinite):
        return s
    if len(s) == 1:
        (g,) = s
        if isinstance(g, Ghost):
            return g.of
    elif len(s) == 2 and EMPTY in s:
        for g in s:
            if isinstance(g, Ghost):
                return g
    return frozenset(s)


def member(x, s) -> bool:
    if isinstance(s, Infinite):
        return s.test(x)
    return x in elems(s)


@lru_cache(maxsize=None)
def order_key(v):
    """Total order on values, used for deterministic CHOOSE."""
    if isinstance(v, Int):
        return (0, v.v)
    if isinstance(v, Bool):
        return (1, v.v)
    if isinstance(v, Str):
        return (2, v.v)
    if isinstance(v, frozenset):
        return (3, len(v), tuple(sorted(order_key(x) for x in v)))
    if isinstance(v, Fcn):
        return (4, tuple((order_key(a), order_key(b)) for a, b in v.graph))
    if isinstance(v, Opaque):
        return (5, v.tag)
    if isinstance(v, Ghost):
        return (6, order_key(v.of))
    return (7, v.name)


def make_fcn(pairs: Iterable) -> Fcn:
    return Fcn(tuple(sorted(pairs, key=lambda p: order_key(p[0]))))


def close_under_elems(values, limit: int) -> frozenset:
    out = set()
    todo = list(values)
    while todo:
        v = todo.pop()
        if v in out or isinstance(v, Infinite):
            continue
        out.add(v)
        if len(out) > limit:
            raise CarrierOverflow(f"quantifier domain exceeds {limit} values")
        todo.extend(elems(v))
    return frozenset(out)


# ---------------------------------------------------------------------------
# the standard carrier


def pure_sets(rank: int) -> list:
    level = [EMPTY]
    for _ in range(rank):
        level = [frozenset(c) for n in range(len(level) + 1)
                 for c in itertools.combinations(level, n)]
    return level


def standard_carrier(rank: int = 2, int_range=(-2, 2), functions: bool = True) -> list:
    """Rank-bounded pure sets, a small integer interval, TRUE and FALSE.

    With ``rank=2`` the pure sets are the four subsets of ``{{}, {{}}}``.
    A few finite functions are added so that function rules see both
    functions and non-functions.
    """
    vals = list(pure_sets(rank))
    vals += [Int(i) for i in range(int_range[0], int_range[1] + 1)]
    vals += [TRUE, FALSE]
    if functions:
        one = frozenset((EMPTY,))
        vals += [make_fcn([]), make_fcn([(EMPTY, Int(0))]),
                 make_fcn([(EMPTY, EMPTY), (one, Int(1))])]
    return vals


# ---------------------------------------------------------------------------
# evaluation


class Evaluator:
    def __init__(self, domain, ops: dict | None = None, max_set: int = 4096,
                 presorted=None):
        self.domain = presorted or sorted(domain, key=order_key)
        self.ops = ops or {}
        self.max_set = max_set

    def truth(self, e, env) -> bool:
        return self.eval(e, env) == TRUE

    def eval(self, e: A.Expr, env: dict):
        t = type(e)
        m = getattr(self, "_" + t.__name__, None)
        if m is None:
            raise TypeError(f"oracle cannot evaluate {t.__name__}")
        return m(e, env)

    # -- logic
    def _Var(self, e, env):
        try:
            return env[e.name]
        except KeyError:
            raise KeyError(f"unbound variable {e.name}") from None

    def _OpApp(self, e, env):
        if e.op in env and not e.args:
            return env[e.op]
        fn = self.ops[e.op]
        return fn(*[self.eval(a, env) for a in e.args])

    def _TrueE(self, e, env):
        return TRUE

    def _FalseE(self, e, env):
        return FALSE

    def _Not(self, e, env):
        return Bool(not self.truth(e.a, env))

    def _And(self, e, env):
        return Bool(self.truth(e.a, env) and self.truth(e.b, env))

    def _Or(self, e, env):
        return Bool(self.truth(e.a, env) or self.truth(e.b, env))

    def _Implies(self, e, env):
        return Bool(not self.truth(e.a, env) or self.truth(e.b, env))

    def _Iff(self, e, env):
        return Bool(self.truth(e.a, env) == self.truth(e.b, env))

    def _Forall(self, e, env):
        return Bool(all(self.truth(e.body, {**env, e.var: d}) for d in self.domain))

    def _Exists(self, e, env):
        return Bool(any(self.truth(e.body, {**env, e.var: d}) for d in self.domain))

    def _Eq(self, e, env):
        return Bool(self.eval(e.a, env) == self.eval(e.b, env))

    def _In(self, e, env):
        return Bool(member(self.eval(e.a, env), self.eval(e.b, env)))

    def _Ite(self, e, env):
        return self.eval(e.a, env) if self.truth(e.c, env) else self.eval(e.b, env)

    def _Boolified(self, e, env):
        return Bool(self.eval(e.a, env) == TRUE)

    def _Choose(self, e, env):
        for d in self.domain:
            if self.truth(e.pred, {**env, e.var: d}):
                return d
        return CHOOSE_NONE

    # -- sets
    def _finite(self, v):
        s = elems(v)
        if isinstance(s, Infinite):
            raise CarrierOverflow(f"cannot enumerate the infinite set {s.name}")
        return s

    def _check(self, s):
        if len(s) > self.max_set:
            raise CarrierOverflow(f"set of {len(s)} elements exceeds the bound")
        return canon(s)

    def _EmptySet(self, e, env):
        return EMPTY

    def _SetEnum(self, e, env):
        return canon(frozenset(self.eval(x, env) for x in e.elems))

    def _Subset(self, e, env):
        s = sorted(self._finite(self.eval(e.a, env)), key=order_key)
        if len(s) > 12:
            raise CarrierOverflow("SUBSET of a set with more than 12 elements")
        subs = [canon(frozenset(c)) for n in range(len(s) + 1)
                for c in itertools.combinations(s, n)]
        return self._check(frozenset(subs))

    def _Union(self, e, env):
        out = set()
        for x in self._finite(self.eval(e.a, env)):
            out |= self._finite(x)
        return self._check(frozenset(out))

    def _Cup(self, e, env):
        a, b = elems(self.eval(e.a, env)), elems(self.eval(e.b, env))
        if isinstance(a, Infinite) or isinstance(b, Infinite):
            if a == b:
                return a
            raise CarrierOverflow("union with an infinite set")
        return self._check(a | b)

    def _SetFilter(self, e, env):
        s = self._finite(self.eval(e.dom, env))
        return canon(frozenset(x for x in s if self.truth(e.pred, {**env, e.var: x})))

    def _SetMap(self, e, env):
        s = self._finite(self.eval(e.dom, env))
        return self._check(frozenset(self.eval(e.expr, {**env, e.var: x}) for x in s))

    def _IntSet(self, e, env):
        return INT_SET

    def _NatSet(self, e, env):
        return NAT_SET

    def _Range(self, e, env):
        a, b = self.eval(e.a, env), self.eval(e.b, env)
        if isinstance(a, Int) and isinstance(b, Int):
            return canon(frozenset(Int(i) for i in range(a.v, b.v + 1)))
        # a bound that is not a number never excludes anything (see _Lt)
        lo = a.v if isinstance(a, Int) else None
        hi = b.v if isinstance(b, Int) else None
        return Infinite(f"range({lo},{hi})", lambda v: isinstance(v, Int)
                        and (lo is None or v.v >= lo) and (hi is None or v.v <= hi))

    # -- functions
    def _Lambda(self, e, env):
        s = self._finite(self.eval(e.dom, env))
        return make_fcn((x, self.eval(e.body, {**env, e.var: x})) for x in s)

    def _FcnSet(self, e, env):
        s = sorted(self._finite(self.eval(e.a, env)), key=order_key)
        t = sorted(self._finite(self.eval(e.b, env)), key=order_key)
        if len(t) ** len(s) > self.max_set:
            raise CarrierOverflow("function space too large")
        return canon(frozenset(make_fcn(zip(s, img))
                               for img in itertools.product(t, repeat=len(s))))

    def _apply(self, f, a, missing):
        if isinstance(f, Fcn):
            ok, v = f.lookup(a)
            if ok:
                return v
        return missing

    def _FcnApp(self, e, env):
        return self._apply(self.eval(e.f, env), self.eval(e.a, env), OMEGA)

    def _AlphaApp(self, e, env):
        return self._apply(self.eval(e.f, env), self.eval(e.a, env), ALPHA_OUT)

    def _OmegaApp(self, e, env):
        return OMEGA

    def _Domain(self, e, env):
        f = self.eval(e.a, env)
        # the domain of a non-function is unspecified; the empty set is one choice
        return canon(f.domain()) if isinstance(f, Fcn) else EMPTY

    def _IsAFcn(self, e, env):
        return Bool(isinstance(self.eval(e.a, env), Fcn))

    # -- arithmetic and literals
    def _IntLit(self, e, env):
        return Int(e.value)

    def _StrLit(self, e, env):
        return Str(e.value)

    def _arith(self, e, env, fn):
        vals = [self.eval(c, env) for c, _ in A.children(e)]
        if all(isinstance(v, Int) for v in vals):
            return Int(fn(*[v.v for v in vals]))
        return ARITH

    def _Plus(self, e, env):
        return self._arith(e, env, lambda a, b: a + b)

    def _Times(self, e, env):
        return self._arith(e, env, lambda a, b: a * b)

    def _Neg(self, e, env):
        return self._arith(e, env, lambda a: -a)

    def _Lt(self, e, env):
        a, b = self.eval(e.a, env), self.eval(e.b, env)
        return Bool(isinstance(a, Int) and isinstance(b, Int) and a.v < b.v)

    def _TupleLit(self, e, env):
        return self.eval(A.desugar(e), env)

    _RecordLit = _TupleLit
    _RecordAccess = _TupleLit


# ---------------------------------------------------------------------------
# domain construction and checking


def _closed_subterms(exprs, names) -> list:
    """Value subterms whose free variables are all bound by the valuation."""
    out = []
    for e in exprs:
        for x in A.subterms(e):
            if x is not e and not A.is_formula(x) and A.free_vars(x) <= names:
                out.append(x)
    return out


@lru_cache(maxsize=8)
def _carrier_closure(carrier: tuple, limit: int) -> tuple:
    return tuple(sorted(close_under_elems(carrier, limit), key=order_key))


class DomainBuilder:
    """Quantifier domains for a fixed pair of expressions.

    Starts from the carrier and the valuation's values, then adds the values
    of all valuation-closed subterms until nothing new appears.
    """

    def __init__(self, exprs, names, carrier=None, limit: int = 400):
        self.carrier = tuple(carrier if carrier is not None else standard_carrier())
        self.limit = limit
        self.base = _carrier_closure(self.carrier, limit)
        self.base_set = frozenset(self.base)
        self.terms = _closed_subterms(exprs, frozenset(names))

    def domain(self, env: dict, ops: dict | None = None) -> list:
        extra = [v for v in env.values() if not callable(v) and v not in self.base_set]
        dom = self.base_set
        if extra:
            dom = close_under_elems(set(dom) | set(extra), self.limit)
        for _ in range(8):
            ev = Evaluator(dom, ops, presorted=self.base if dom is self.base_set else None)
            new = set()
            for t in self.terms:
                try:
                    v = ev.eval(t, env)
                except CarrierOverflow:
                    continue
                if not isinstance(v, Infinite) and v not in dom:
                    new.add(v)
            if not new:
                return ev
            dom = close_under_elems(set(dom) | new, self.limit)
        raise CarrierOverflow("quantifier domain did not stabilise")


def evaluate(e: A.Expr, env: dict, ops: dict | None = None, carrier=None):
    """Evaluate ``e`` with a domain built for it."""
    ev = DomainBuilder([e], env, carrier).domain(env, ops)
    return ev.eval(e, env)


def equivalent_under(lhs: A.Expr, rhs: A.Expr, env: dict, ops: dict | None = None,
                     carrier=None, builder: DomainBuilder | None = None) -> bool:
    """LHS and RHS have the same value (truth value for formulas)."""
    builder = builder or DomainBuilder([lhs, rhs], env, carrier)
    ev = builder.domain(env, ops)
    return ev.eval(lhs, env) == ev.eval(rhs, env)


# ---------------------------------------------------------------------------
# schematic operator interpretations


def _succ(v):
    return Int(v.v + 1) if isinstance(v, Int) else ARITH


UNARY_PREDICATES = {
    "true": lambda v: TRUE,
    "false": lambda v: FALSE,
    "is_empty": lambda v: Bool(v == EMPTY),
    "is_int": lambda v: Bool(isinstance(v, Int)),
    "is_true": lambda v: Bool(v == TRUE),
    "has_empty": lambda v: Bool(member(EMPTY, v)),
    "positive": lambda v: Bool(isinstance(v, Int) and v.v > 0),
}

UNARY_FUNCTIONS = {
    "id": lambda v: v,
    "const_empty": lambda v: EMPTY,
    "singleton": lambda v: canon(frozenset((v,))),
    "succ": _succ,
    "elements": lambda v: v if isinstance(v, Infinite) else canon(elems(v)),
}

BINARY_FUNCTIONS = {
    "left": lambda a, b: a,
    "pair": lambda a, b: canon(frozenset((a, b))),
    "eq": lambda a, b: Bool(a == b),
}


def interpretations(arity: int, kind: str = "value") -> dict:
    if arity == 0:
        return {}
    if arity == 1:
        if kind == "bool":
            return UNARY_PREDICATES
        return {**UNARY_FUNCTIONS, **UNARY_PREDICATES}
    if arity == 2:
        return BINARY_FUNCTIONS
    return {"first": lambda *xs: xs[0]}


def valuations(var_names, op_arities: dict, pool=None):
    """Every assignment of pool values to variables and library
    interpretations to operators."""
    pool = list(pool if pool is not None else standard_carrier())
    var_names = sorted(var_names)
    op_names = sorted(op_arities)
    op_choices = [list(interpretations(op_arities[o]).items()) for o in op_names]
    for ops in itertools.product(*op_choices):
        opmap = {o: fn for o, (_, fn) in zip(op_names, ops)}
        for vals in itertools.product(pool, repeat=len(var_names)):
            yield dict(zip(var_names, vals)), opmap


def op_arities(*exprs) -> dict:
    out = {}
    for e in exprs:
        for x in A.subterms(e):
            if isinstance(x, A.OpApp) and x.args:
                out[x.op] = len(x.args)
    return out


def find_counterexample(lhs: A.Expr, rhs: A.Expr, pool=None):
    """First valuation on which ``lhs`` and ``rhs`` disagree, or None."""
    names = A.free_vars(lhs) | A.free_vars(rhs)
    for op in [x.op for e in (lhs, rhs) for x in A.subterms(e)
               if isinstance(x, A.OpApp) and not x.args]:
        names |= {op}
    arities = op_arities(lhs, rhs)
    builder = DomainBuilder([lhs, rhs], names)
    for env, ops in valuations(names, arities, pool):
        if not equivalent_under(lhs, rhs, env, ops, builder=builder):
            return env, ops
    return None


def valid(e: A.Expr, pool=None):
    """True when the formula holds on every valuation; else a counterexample."""
    names = A.free_vars(e) | {x.op for x in A.subterms(e)
                              if isinstance(x, A.OpApp) and not x.args}
    builder = DomainBuilder([e], names)
    for env, ops in valuations(names, op_arities(e), pool):
        if builder.domain(env, ops).eval(e, env) != TRUE:
            return env
    return True
