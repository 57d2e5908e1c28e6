"""Term rewriting towards basic normal form.

The catalog expands non-basic set, function and arithmetic constructs into
formulas over ``=``, ``\\in``, ``$alpha``/``$omega`` and ``IsAFcn``.  Rules
fire only at the node that matches their left-hand side; the engine picks
the redex position by strategy (outermost-leftmost by default) and, at a
given position, the applicable rule with the highest priority.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional

from . import ast as A
from .boolify import MARKABLE
from .errors import StepBudgetExceeded

# Set enumerations up to this arity are expanded by rewriting; larger ones
# are emitted as uninterpreted constructors with a membership axiom.
ENUM_EXPAND_LIMIT = 4

SET_CONSTRUCTORS = (A.EmptySet, A.Subset, A.Union, A.Cup, A.SetFilter,
                    A.SetMap, A.FcnSet, A.Range)

NON_BASIC = SET_CONSTRUCTORS + (A.Choose, A.FcnApp, A.Lambda, A.TupleLit,
                                A.RecordLit, A.RecordAccess)


def is_small_enum(e: A.Expr) -> bool:
    return isinstance(e, A.SetEnum) and len(e.elems) <= ENUM_EXPAND_LIMIT


def is_set_constructor(e: A.Expr) -> bool:
    return isinstance(e, SET_CONSTRUCTORS) or is_small_enum(e)


def is_constructor(e: A.Expr) -> bool:
    """Set or function constructor that equality expansion can act on."""
    return is_set_constructor(e) or isinstance(e, A.Lambda)


def is_nonbasic_node(e: A.Expr) -> bool:
    return isinstance(e, NON_BASIC) or is_small_enum(e)


def is_basic(e: A.Expr) -> bool:
    """True iff ``e`` has a direct counterpart in the SMT encoding."""
    for x in A.subterms(e):
        if is_nonbasic_node(x):
            return False
        if isinstance(x, A.Boolified) and not isinstance(x.a, MARKABLE):
            return False
    return True


# ---------------------------------------------------------------------------
# rule catalog


@dataclass(frozen=True)
class RewriteRule:
    id: str
    priority: int
    head: type
    lhs: str   # schematic left-hand side in surface syntax
    rhs: str   # schematic right-hand side
    apply: Callable[[A.Expr], Optional[A.Expr]]
    condition: str = ""

    def __call__(self, e: A.Expr) -> Optional[A.Expr]:
        if type(e) is not self.head:
            return None
        return self.apply(e)


CATALOG: list[RewriteRule] = []


def rule(id, head, lhs, rhs, priority=50, condition=""):
    def deco(fn):
        CATALOG.append(RewriteRule(id, priority, head, lhs, rhs, fn, condition))
        return fn
    return deco


def _fresh(base: str, *exprs: A.Expr) -> str:
    # only free names can be captured by a binder wrapped around ``exprs``
    avoid = set()
    for e in exprs:
        avoid |= A.free_vars(e)
    return A.fresh_name(base, avoid)


def _open_binder(var: str, body: A.Expr, *outside: A.Expr):
    """Rename ``var`` if it would capture a free variable of ``outside``."""
    clash = set()
    for e in outside:
        clash |= A.free_vars(e)
    if var not in clash:
        return var, body
    nv = _fresh(var, body, *outside)
    return nv, A.substitute(body, var, A.Var(nv))


# -- membership ------------------------------------------------------------

@rule("mem_empty", A.In, "x \\in {}", "FALSE")
def _mem_empty(e):
    if isinstance(e.b, A.EmptySet):
        return A.FalseE()


@rule("mem_enum", A.In, "x \\in {e1, ..., en}", "x = e1 \\/ ... \\/ x = en",
      condition=f"n <= {ENUM_EXPAND_LIMIT}")
def _mem_enum(e):
    if is_small_enum(e.b):
        return A.disj(A.Eq(e.a, t) for t in e.b.elems)


@rule("mem_subset", A.In, "x \\in SUBSET S", "\\A z : z \\in x => z \\in S")
def _mem_subset(e):
    if isinstance(e.b, A.Subset):
        z = _fresh("z", e)
        return A.Forall(z, A.Implies(A.In(A.Var(z), e.a), A.In(A.Var(z), e.b.a)))


@rule("mem_union", A.In, "x \\in UNION S", "\\E T : T \\in S /\\ x \\in T")
def _mem_union(e):
    if isinstance(e.b, A.Union):
        t = _fresh("T", e)
        return A.Exists(t, A.And(A.In(A.Var(t), e.b.a), A.In(e.a, A.Var(t))))


@rule("mem_cup", A.In, "x \\in S \\cup T", "x \\in S \\/ x \\in T")
def _mem_cup(e):
    if isinstance(e.b, A.Cup):
        return A.Or(A.In(e.a, e.b.a), A.In(e.a, e.b.b))


@rule("mem_filter", A.In, "x \\in {z \\in S : P(z)}", "x \\in S /\\ P(x)")
def _mem_filter(e):
    s = e.b
    if isinstance(s, A.SetFilter):
        return A.And(A.In(e.a, s.dom), A.substitute(s.pred, s.var, e.a))


@rule("mem_setmap", A.In, "x \\in {f(z) : z \\in S}", "\\E z : z \\in S /\\ x = f(z)")
def _mem_setmap(e):
    s = e.b
    if isinstance(s, A.SetMap):
        z, body = _open_binder(s.var, s.expr, e.a, s.dom)
        return A.Exists(z, A.And(A.In(A.Var(z), s.dom), A.Eq(e.a, body)))


@rule("mem_fcnset", A.In, "x \\in [S -> T]",
      "IsAFcn(x) /\\ DOMAIN x = S /\\ \\A z : z \\in S => $alpha(x, z) \\in T")
def _mem_fcnset(e):
    if isinstance(e.b, A.FcnSet):
        x, s, t = e.a, e.b.a, e.b.b
        z = A.Var(_fresh("z", e))
        return A.conj([
            A.IsAFcn(x),
            A.Eq(A.Domain(x), s),
            A.Forall(z.name, A.Implies(A.In(z, s), A.In(A.AlphaApp(x, z), t))),
        ])


@rule("mem_range", A.In, "x \\in a .. b", "x \\in Int /\\ ~(x < a) /\\ ~(b < x)")
def _mem_range(e):
    if isinstance(e.b, A.Range):
        x, a, b = e.a, e.b.a, e.b.b
        return A.conj([A.In(x, A.IntSet()), A.Not(A.Lt(x, a)), A.Not(A.Lt(b, x))])


@rule("mem_nat", A.In, "x \\in Nat", "x \\in Int /\\ ~(x < 0)")
def _mem_nat(e):
    if isinstance(e.b, A.NatSet):
        return A.And(A.In(e.a, A.IntSet()), A.Not(A.Lt(e.a, A.IntLit(0))))



# -- extensionality ----------------------------------------------------------

@rule("contract_ext", A.Forall, "\\A z : z \\in x <=> z \\in y", "x = y",
      priority=100,
      condition="x, y not constructors; neither membership expands; z not free in x, y")
def _contract(e):
    body = e.body
    if not isinstance(body, A.Iff):
        return None
    l, r = body.a, body.b
    if not (isinstance(l, A.In) and isinstance(r, A.In)):
        return None
    z = A.Var(e.var)
    if l.a != z or r.a != z:
        return None
    x, y = l.b, r.b
    if is_constructor(x) or is_constructor(y):
        return None
    # a membership that expands itself (x \in Nat) must not race the contraction
    if apply_at(l) is not None or apply_at(r) is not None:
        return None
    if e.var in A.free_vars(x) or e.var in A.free_vars(y):
        return None
    return A.Eq(x, y)


def _expand_eq(x: A.Expr, t: A.Expr, t_right: bool) -> A.Expr:
    """Extensionality instance for ``x = t`` with ``t`` a constructor."""
    if isinstance(t, A.Lambda):
        z, body = _open_binder(t.var, t.body, x, t.dom)
        zv = A.Var(z)
        return A.conj([
            A.IsAFcn(x),
            A.Eq(A.Domain(x), t.dom),
            A.Forall(z, A.Implies(A.In(zv, t.dom), A.Eq(A.AlphaApp(x, zv), body))),
        ])
    z = A.Var(_fresh("z", x, t))
    lx, lt = A.In(z, x), A.In(z, t)
    return A.Forall(z.name, A.Iff(lx, lt) if t_right else A.Iff(lt, lx))


@rule("eq_expand", A.Eq, "x = T  (T a set or function constructor)",
      "\\A z : z \\in x <=> z \\in T   |   IsAFcn(x) /\\ DOMAIN x = S /\\ \\A z \\in S : $alpha(x, z) = e",
      priority=40, condition="other side in normal form; right side preferred")
def _eq_expand(e):
    a, b = e.a, e.b
    if is_constructor(b) and is_normal(a):
        return _expand_eq(a, b, True)
    if is_constructor(a) and not is_constructor(b) and is_normal(b):
        return _expand_eq(b, a, False)
    return None


@rule("eq_lit", A.Eq, "k = m", "TRUE or FALSE", priority=60,
      condition="k, m literals of the same kind")
def _eq_lit(e):
    a, b = e.a, e.b
    if isinstance(a, A.IntLit) and isinstance(b, A.IntLit):
        return A.TrueE() if a.value == b.value else A.FalseE()
    if isinstance(a, A.StrLit) and isinstance(b, A.StrLit):
        return A.TrueE() if a.value == b.value else A.FalseE()


# -- functions ----------------------------------------------------------------

@rule("app_lambda", A.FcnApp, "[z \\in S |-> e(z)][a]",
      "IF a \\in S THEN e(a) ELSE $omega([z \\in S |-> e(z)], a)")
def _app_lambda(e):
    f = e.f
    if isinstance(f, A.Lambda):
        return A.Ite(A.In(e.a, f.dom), A.substitute(f.body, f.var, e.a), A.OmegaApp(f, e.a))


@rule("app_split", A.FcnApp, "f[a]",
      "IF a \\in DOMAIN f THEN $alpha(f, a) ELSE $omega(f, a)",
      condition="f is not a function constructor and is in normal form")
def _app_split(e):
    if not isinstance(e.f, A.Lambda) and is_normal(e.f):
        return A.Ite(A.In(e.a, A.Domain(e.f)), A.AlphaApp(e.f, e.a), A.OmegaApp(e.f, e.a))


@rule("dom_lambda", A.Domain, "DOMAIN [z \\in S |-> e]", "S")
def _dom_lambda(e):
    if isinstance(e.a, A.Lambda):
        return e.a.dom


@rule("isafcn_lambda", A.IsAFcn, "IsAFcn([z \\in S |-> e])", "TRUE")
def _isafcn_lambda(e):
    if isinstance(e.a, A.Lambda):
        return A.TrueE()


# -- Boolification marks ----------------------------------------------------------

@rule("bool_ite", A.Boolified, "$bool(IF c THEN a ELSE b)",
      "IF c THEN $bool(a) ELSE $bool(b)")
def _bool_ite(e):
    if isinstance(e.a, A.Ite):
        return A.Ite(e.a.c, A.Boolified(e.a.a), A.Boolified(e.a.b))


@rule("bool_formula", A.Boolified, "$bool(F)", "F", condition="F a formula")
def _bool_formula(e):
    if A.is_formula(e.a):
        return e.a


@rule("bool_value", A.Boolified, "$bool(v)", "v = TRUE",
      condition="v in normal form, neither a term nor a formula")
def _bool_value(e):
    a = e.a
    if (not isinstance(a, MARKABLE) and not isinstance(a, A.Ite)
            and not A.is_formula(a) and is_normal(a)):
        return A.Eq(a, A.TrueE())


# -- propositional simplification ----------------------------------------------

@rule("ite_true", A.Ite, "IF TRUE THEN a ELSE b", "a")
def _ite_true(e):
    if isinstance(e.c, A.TrueE):
        return e.a


@rule("ite_false", A.Ite, "IF FALSE THEN a ELSE b", "b")
def _ite_false(e):
    if isinstance(e.c, A.FalseE):
        return e.b


@rule("not_not", A.Not, "~~F", "F")
def _not_not(e):
    if isinstance(e.a, A.Not):
        return e.a.a


@rule("not_const", A.Not, "~TRUE | ~FALSE", "FALSE | TRUE")
def _not_const(e):
    if isinstance(e.a, A.TrueE):
        return A.FalseE()
    if isinstance(e.a, A.FalseE):
        return A.TrueE()


@rule("and_const", A.And, "TRUE /\\ F | FALSE /\\ F (either side)", "F | FALSE")
def _and_const(e):
    a, b = e.a, e.b
    if isinstance(a, A.FalseE) or isinstance(b, A.FalseE):
        return A.FalseE()
    if isinstance(a, A.TrueE):
        return b
    if isinstance(b, A.TrueE):
        return a


@rule("or_const", A.Or, "TRUE \\/ F | FALSE \\/ F (either side)", "TRUE | F")
def _or_const(e):
    a, b = e.a, e.b
    if isinstance(a, A.TrueE) or isinstance(b, A.TrueE):
        return A.TrueE()
    if isinstance(a, A.FalseE):
        return b
    if isinstance(b, A.FalseE):
        return a


@rule("implies_const", A.Implies, "FALSE => F | TRUE => F | F => TRUE", "TRUE | F | TRUE")
def _implies_const(e):
    a, b = e.a, e.b
    if isinstance(a, A.FalseE) or isinstance(b, A.TrueE):
        return A.TrueE()
    if isinstance(a, A.TrueE):
        return b


@rule("iff_const", A.Iff, "TRUE <=> F | FALSE <=> F (either side)", "F | ~F")
def _iff_const(e):
    a, b = e.a, e.b
    if isinstance(a, A.TrueE):
        return b
    if isinstance(b, A.TrueE):
        return a
    if isinstance(a, A.FalseE):
        return A.Not(b)
    if isinstance(b, A.FalseE):
        return A.Not(a)


@rule("forall_const", A.Forall, "\\A z : TRUE | \\A z : FALSE", "TRUE | FALSE")
def _forall_const(e):
    if isinstance(e.body, (A.TrueE, A.FalseE)):
        return e.body


@rule("exists_const", A.Exists, "\\E z : TRUE | \\E z : FALSE", "TRUE | FALSE")
def _exists_const(e):
    if isinstance(e.body, (A.TrueE, A.FalseE)):
        return e.body


# -- arithmetic on literals --------------------------------------------------------

@rule("plus_lit", A.Plus, "k + m", "the literal k+m")
def _plus_lit(e):
    if isinstance(e.a, A.IntLit) and isinstance(e.b, A.IntLit):
        return A.IntLit(e.a.value + e.b.value)


@rule("times_lit", A.Times, "k * m", "the literal k*m")
def _times_lit(e):
    if isinstance(e.a, A.IntLit) and isinstance(e.b, A.IntLit):
        return A.IntLit(e.a.value * e.b.value)


@rule("neg_lit", A.Neg, "-(k)", "the literal -k")
def _neg_lit(e):
    if isinstance(e.a, A.IntLit):
        return A.IntLit(-e.a.value)


@rule("lt_lit", A.Lt, "k < m", "TRUE or FALSE")
def _lt_lit(e):
    if isinstance(e.a, A.IntLit) and isinstance(e.b, A.IntLit):
        return A.TrueE() if e.a.value < e.b.value else A.FalseE()


RULES_BY_ID = {r.id: r for r in CATALOG}
_BY_HEAD: dict[type, list[RewriteRule]] = {}
for _r in sorted(CATALOG, key=lambda r: -r.priority):
    _BY_HEAD.setdefault(_r.head, []).append(_r)


def apply_at(e: A.Expr):
    """Highest-priority rule applicable at the root of ``e``, if any."""
    for r in _BY_HEAD.get(type(e), ()):
        out = r.apply(e)
        if out is not None:
            return out, r.id
    return None


# ---------------------------------------------------------------------------
# engine


@lru_cache(maxsize=200_000)
def is_normal(e: A.Expr) -> bool:
    if apply_at(e) is not None:
        return False
    return all(is_normal(c) for c, _ in A.children(e))


def _step_outermost(e: A.Expr, path: tuple):
    hit = apply_at(e)
    if hit is not None:
        return hit[0], hit[1], path
    for i, (c, _) in enumerate(A.children(e)):
        if is_normal(c):
            continue
        sub = _step_outermost(c, path + (i,))
        if sub is not None:
            new, rid, pos = sub
            return _replace_child(e, i, new), rid, pos
    return None


def _step_innermost(e: A.Expr, path: tuple):
    kids = list(A.children(e))
    for i in reversed(range(len(kids))):
        c = kids[i][0]
        if is_normal(c):
            continue
        sub = _step_innermost(c, path + (i,))
        if sub is not None:
            new, rid, pos = sub
            return _replace_child(e, i, new), rid, pos
    hit = apply_at(e)
    if hit is not None:
        return hit[0], hit[1], path
    return None


def _replace_child(e: A.Expr, index: int, new: A.Expr) -> A.Expr:
    counter = iter(range(10**9))

    def swap(c):
        return new if next(counter) == index else c

    return A.map_children(e, swap)


STRATEGIES = {"outermost": _step_outermost, "innermost": _step_innermost}


def rewrite_step(e: A.Expr, strategy: str = "outermost"):
    """One rewrite step: ``(new_expr, rule_id)`` or ``None`` at normal form."""
    out = STRATEGIES[strategy](e, ())
    if out is None:
        return None
    return out[0], out[1]


@dataclass
class TraceStep:
    rule: str
    position: tuple
    before: A.Expr
    after: A.Expr

    def __str__(self) -> str:
        pos = ".".join(map(str, self.position)) or "root"
        return f"{self.rule} @ {pos}: {self.before} --> {self.after}"


STEP_SLACK = 64


def normalize(e: A.Expr, strategy: str = "outermost", trace: list | None = None,
              budget: int | None = None) -> A.Expr:
    """Rewrite ``e`` to its normal form.

    The step budget defaults to ``measure(e) + STEP_SLACK``; exceeding it
    signals an engine bug rather than a property of the input.
    """
    if budget is None:
        budget = measure(e) + STEP_SLACK
    step = STRATEGIES[strategy]
    steps = 0
    while True:
        out = step(e, ())
        if out is None:
            return e
        new, rid, pos = out
        steps += 1
        if steps > budget:
            raise StepBudgetExceeded(f"more than {budget} rewrite steps on {e}")
        if trace is not None:
            trace.append(TraceStep(rid, pos, _at(e, pos), _at(new, pos)))
        e = new


def _at(e: A.Expr, pos: tuple) -> A.Expr:
    for i in pos:
        e = list(A.children(e))[i][0]
    return e


# ---------------------------------------------------------------------------
# termination measure


def measure(e: A.Expr) -> int:
    """Polynomial interpretation of ``e`` into the naturals (values >= 2).

    Membership and equality multiply their operands, so that duplicating the
    element of a membership test is paid for by the constructor it removes;
    constructors carry enough weight to dominate the formulas they expand
    to.  Binder bodies are interpreted with the bound variable at 2.
    """
    return _mu(e)


@lru_cache(maxsize=200_000)
def _mu(e: A.Expr) -> int:
    t = type(e)
    if t in (A.Var, A.IntLit, A.StrLit, A.TrueE, A.FalseE, A.IntSet, A.EmptySet):
        return 2
    if t is A.NatSet:
        return 6
    if t is A.OpApp:
        return 1 + sum(_mu(a) for a in e.args) if e.args else 2
    if t is A.In:
        return _mu(e.a) * _mu(e.b)
    if t is A.Eq:
        return 3 * _mu(e.a) * _mu(e.b)
    if t is A.SetEnum:
        return 3 * sum(_mu(x) for x in e.elems) + len(e.elems)
    if t in (A.Subset, A.Union):
        return 2 * _mu(e.a) + 2
    if t is A.Range:
        return _mu(e.a) + _mu(e.b) + 8
    if t is A.FcnSet:
        return 8 * _mu(e.a) + 4 * _mu(e.b) + 8
    if t is A.SetFilter:
        return _mu(e.dom) + _mu(e.pred) + 2
    if t is A.SetMap:
        return _mu(e.dom) + 3 * _mu(e.expr) + 2
    if t is A.Lambda:
        return 4 * (_mu(e.dom) + _mu(e.body)) + 8
    if t is A.FcnApp:
        return 4 * _mu(e.f) * _mu(e.a) + 4
    if t is A.Boolified:
        return 7 * _mu(e.a) + 1
    if t is A.Not:
        return _mu(e.a) + 1
    if t is A.Choose:
        return _mu(e.pred) + 2
    # remaining nodes are additive
    return 1 + sum(_mu(c) for c, _ in A.children(e))
