"""SMT-LIB 2 emission for obligations in basic normal form.

Everything lives in one uninterpreted sort ``U``.  Membership, function
application and arithmetic are uninterpreted functions over ``U``; integers
are embedded through ``i2u`` and the arithmetic functions are tied to
solver arithmetic by homomorphism axioms.  Only the axioms whose symbols
occur in the obligation are emitted.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import ast as A
from .errors import NonBasicInput
from .normalize import is_basic

BOOL, VAL = "Bool", "U"

# vocabulary: name -> declaration
VOCAB = {
    "in": "(declare-fun in (U U) Bool)",
    "boolify": "(declare-fun boolify (U) Bool)",
    "tla_true": "(declare-fun tla_true () U)",
    "tla_false": "(declare-fun tla_false () U)",
    "alpha": "(declare-fun alpha (U U) U)",
    "omega": "(declare-fun omega (U U) U)",
    "isafcn": "(declare-fun isafcn (U) Bool)",
    "domain": "(declare-fun domain (U) U)",
    "i2u": "(declare-fun i2u (Int) U)",
    "u2i": "(declare-fun u2i (U) Int)",
    "plus": "(declare-fun plus (U U) U)",
    "times": "(declare-fun times (U U) U)",
    "neg": "(declare-fun neg (U) U)",
    "lt": "(declare-fun lt (U U) Bool)",
    "tla_Int": "(declare-fun tla_Int () U)",
    "tla_Nat": "(declare-fun tla_Nat () U)",
}


def _enum_vars(n):
    return [f"e{i}" for i in range(1, n + 1)]


# axiom name -> (symbols it mentions, body).  The integer homomorphisms carry
# explicit triggers: with inferred ones, z3 matches on ``i2u (+ m n)`` and
# instantiates without end.
AXIOMS = {
    "ax_u2i": ({"i2u", "u2i"},
               "(forall ((n Int)) (! (= (u2i (i2u n)) n) :pattern ((i2u n))))"),
    "ax_plus": ({"plus", "i2u"},
                "(forall ((m Int) (n Int)) (! (= (plus (i2u m) (i2u n)) (i2u (+ m n)))"
                " :pattern ((plus (i2u m) (i2u n)))))"),
    "ax_times": ({"times", "i2u"},
                 "(forall ((m Int) (n Int)) (! (= (times (i2u m) (i2u n)) (i2u (* m n)))"
                 " :pattern ((times (i2u m) (i2u n)))))"),
    "ax_neg": ({"neg", "i2u"},
               "(forall ((n Int)) (! (= (neg (i2u n)) (i2u (- n))) :pattern ((neg (i2u n)))))"),
    "ax_lt": ({"lt", "i2u"},
              "(forall ((m Int) (n Int)) (! (= (lt (i2u m) (i2u n)) (< m n))"
              " :pattern ((lt (i2u m) (i2u n)))))"),
    "ax_int": ({"in", "tla_Int", "i2u"},
               "(forall ((x U)) (= (in x tla_Int) (exists ((n Int)) (= x (i2u n)))))"),
    "ax_nat": ({"in", "tla_Nat", "i2u"},
               "(forall ((x U)) (= (in x tla_Nat) (exists ((n Int)) (and (<= 0 n) (= x (i2u n))))))"),
    "ax_fcn_ext": ({"isafcn", "domain", "alpha", "in"},
                   "(forall ((f U) (g U)) (=> (and (isafcn f) (isafcn g) (= (domain f) (domain g))"
                   " (forall ((x U)) (=> (in x (domain f)) (= (alpha f x) (alpha g x))))) (= f g)))"),
    "ax_dom_ext": ({"domain", "in"},
                   "(forall ((f U) (g U)) (=> (forall ((z U)) (= (in z (domain f)) (in z (domain g))))"
                   " (= (domain f) (domain g))))"),
    "ax_bool": ({"boolify", "tla_true", "tla_false"},
                "(and (not (= tla_true tla_false)) (forall ((x U)) (= (boolify x) (= x tla_true))))"),
}

# which axioms a symbol (or marker) pulls in
TRIGGERS = {
    "i2u": ["ax_u2i"],
    "plus": ["ax_plus"],
    "times": ["ax_times"],
    "neg": ["ax_neg"],
    "lt": ["ax_lt"],
    "tla_Int": ["ax_int"],
    "tla_Nat": ["ax_nat"],
    "isafcn": ["ax_fcn_ext", "ax_dom_ext"],
    "domain_eq": ["ax_dom_ext"],
    "tla_true": ["ax_bool"],
    "tla_false": ["ax_bool"],
}



def _enum_axiom(n: int):
    es = _enum_vars(n)
    binders = " ".join(f"({v} U)" for v in ["z"] + es)
    disj = " ".join(f"(= z {v})" for v in es)
    body = f"(forall ({binders}) (= (in z (set_enum_{n} {' '.join(es)})) (or {disj})))"
    return {"in", f"set_enum_{n}"}, body


def axiom_closure(used) -> list:
    """Named axioms needed for the symbols in ``used``, dependencies included.

    Returns ``[(name, body)]`` in a fixed order.
    """
    used = set(used)
    chosen: set = set()
    changed = True
    while changed:
        changed = False
        for sym in sorted(used):
            names = list(TRIGGERS.get(sym, ()))
            m = re.fullmatch(r"set_enum_(\d+)", sym)
            if m:
                names.append(f"ax_enum_{m.group(1)}")
            for name in names:
                if name in chosen:
                    continue
                chosen.add(name)
                syms, _ = _axiom(name)
                used |= syms
                changed = True
    order = [n for n in AXIOMS if n in chosen]
    order += sorted((n for n in chosen if n.startswith("ax_enum_")),
                    key=lambda n: int(n.rsplit("_", 1)[1]))
    return [(n, _axiom(n)[1]) for n in order]


def _axiom(name):
    if name.startswith("ax_enum_"):
        return _enum_axiom(int(name.rsplit("_", 1)[1]))
    return AXIOMS[name]


# ---------------------------------------------------------------------------
# names

SMT_RESERVED = {
    "and", "or", "not", "ite", "forall", "exists", "let", "distinct", "true",
    "false", "par", "as", "match", "Int", "Bool", "Real", "assert", "check-sat",
    "declare-fun", "declare-sort", "define-fun", "push", "pop", "U", "NUMERAL",
    "DECIMAL", "STRING", "_", "!", "abs", "div", "mod",
}
_RESERVED_PREFIX = re.compile(r"^(u_|ax_|str_|set_enum_|i_|tla_|h\d+$|goal_neg$)")


def smt_name(name: str) -> str:
    """Injective mapping from user identifiers to SMT symbols."""
    if name in SMT_RESERVED or name in VOCAB or _RESERVED_PREFIX.match(name):
        return "u_" + name
    if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_]*", name):
        return "|" + name.replace("|", "_").replace("\\", "_") + "|"
    return name


def str_name(value: str) -> str:
    safe = re.sub(r"[^A-Za-z0-9]", lambda m: f"_{ord(m.group()):x}_", value)
    return f"str_{safe}"


# ---------------------------------------------------------------------------
# script


@dataclass
class SmtScript:
    name: str
    declarations: list
    axioms: list            # (name, body)
    assertions: list        # (name, body)
    goal: str               # negated goal body
    logic: str | None = None
    comments: list = field(default_factory=list)

    def text(self) -> str:
        out = [f"; obligation {self.name}"]
        out += [f"; {c}" for c in self.comments]
        if self.logic:
            out.append(f"(set-logic {self.logic})")
        out.append("(declare-sort U 0)")
        out += self.declarations
        for name, body in self.axioms:
            out.append(f"(assert (! {body} :named {name}))")
        for name, body in self.assertions:
            out.append(f"(assert (! {body} :named {name}))")
        out.append(f"(assert (! (not {self.goal}) :named goal_neg))")
        out.append("(check-sat)")
        return "\n".join(out) + "\n"

    __str__ = text


class _Emitter:
    def __init__(self, inline_int: bool = False):
        self.inline_int = inline_int
        self.used: set = set()
        self.user: dict = {}     # smt name -> arity, in first-use order
        self.strings: dict = {}  # smt name -> literal

    def sym(self, name: str) -> str:
        self.used.add(name)
        return name

    def user_sym(self, name: str, arity: int) -> str:
        s = smt_name(name)
        self.user.setdefault(s, arity)
        return s

    def emit(self, e: A.Expr, sort: str, bound: frozenset = frozenset()) -> str:
        natural = BOOL if A.is_formula(e) else VAL
        if isinstance(e, A.Ite):
            c = self.emit(e.c, BOOL, bound)
            return f"(ite {c} {self.emit(e.a, sort, bound)} {self.emit(e.b, sort, bound)})"
        if natural == sort:
            return self._emit(e, bound)
        if natural == BOOL and sort == VAL:
            if isinstance(e, A.TrueE):
                return self.sym("tla_true")
            if isinstance(e, A.FalseE):
                return self.sym("tla_false")
            self.sym("tla_true"), self.sym("tla_false")
            return f"(ite {self._emit(e, bound)} tla_true tla_false)"
        raise NonBasicInput(f"value {e} in a formula position without a mark")

    def _app(self, f, *args):
        return f"({f} {' '.join(args)})"

    def _emit(self, e, bound):
        t = type(e)
        E = self.emit
        if t is A.Var:
            if e.name in bound:
                return smt_name(e.name)
            return self.user_sym(e.name, 0)
        if t is A.OpApp:
            s = self.user_sym(e.op, len(e.args))
            if not e.args:
                return s
            return self._app(s, *[E(a, VAL, bound) for a in e.args])
        if t is A.TrueE:
            return "true"
        if t is A.FalseE:
            return "false"
        if t is A.Not:
            return self._app("not", E(e.a, BOOL, bound))
        if t in (A.And, A.Or, A.Implies, A.Iff):
            op = {A.And: "and", A.Or: "or", A.Implies: "=>", A.Iff: "="}[t]
            return self._app(op, E(e.a, BOOL, bound), E(e.b, BOOL, bound))
        if t in (A.Forall, A.Exists):
            q = "forall" if t is A.Forall else "exists"
            body = E(e.body, BOOL, bound | {e.var})
            return f"({q} (({smt_name(e.var)} U)) {body})"
        if t is A.Eq:
            if A.is_formula(e.a) and A.is_formula(e.b):
                return self._app("=", E(e.a, BOOL, bound), E(e.b, BOOL, bound))
            if isinstance(e.a, A.Domain) or isinstance(e.b, A.Domain):
                self.used.add("domain_eq")
            return self._app("=", E(e.a, VAL, bound), E(e.b, VAL, bound))
        if t is A.In:
            if self.inline_int and isinstance(e.b, A.IntSet):
                self.sym("i2u")
                return f"(exists ((i_n Int)) (= {E(e.a, VAL, bound)} (i2u i_n)))"
            return self._app(self.sym("in"), E(e.a, VAL, bound), E(e.b, VAL, bound))
        if t is A.Boolified:
            return self._app(self.sym("boolify"), E(e.a, VAL, bound))
        if t is A.IsAFcn:
            return self._app(self.sym("isafcn"), E(e.a, VAL, bound))
        if t is A.Lt:
            return self._app(self.sym("lt"), E(e.a, VAL, bound), E(e.b, VAL, bound))
        if t is A.IntLit:
            n = str(e.value) if e.value >= 0 else f"(- {-e.value})"
            return self._app(self.sym("i2u"), n)
        if t is A.Plus:
            return self._app(self.sym("plus"), E(e.a, VAL, bound), E(e.b, VAL, bound))
        if t is A.Times:
            return self._app(self.sym("times"), E(e.a, VAL, bound), E(e.b, VAL, bound))
        if t is A.Neg:
            return self._app(self.sym("neg"), E(e.a, VAL, bound))
        if t is A.IntSet:
            return self.sym("tla_Int")
        if t is A.NatSet:
            return self.sym("tla_Nat")
        if t is A.StrLit:
            s = str_name(e.value)
            self.strings.setdefault(s, e.value)
            return s
        if t is A.SetEnum:
            n = len(e.elems)
            return self._app(self.sym(f"set_enum_{n}"), *[E(x, VAL, bound) for x in e.elems])
        if t is A.AlphaApp:
            return self._app(self.sym("alpha"), E(e.f, VAL, bound), E(e.a, VAL, bound))
        if t is A.OmegaApp:
            return self._app(self.sym("omega"), E(e.f, VAL, bound), E(e.a, VAL, bound))
        if t is A.Domain:
            return self._app(self.sym("domain"), E(e.a, VAL, bound))
        raise NonBasicInput(f"cannot emit {t.__name__}: {e}")


def emit(ob: A.ProofObligation, logic: str | None = None,
         inline_int: bool = False) -> SmtScript:
    """SMT-LIB script asserting the hypotheses and the negated goal."""
    for f in ob.formulas():
        if not is_basic(f):
            raise NonBasicInput(f"not in basic normal form: {f}")
    em = _Emitter(inline_int)
    hyps = [(f"h{i}", em.emit(h, BOOL)) for i, h in enumerate(ob.hypotheses, 1)]
    goal = em.emit(ob.goal, BOOL)

    axioms = axiom_closure(em.used)
    used = set(em.used)
    for name, _ in axioms:
        used |= _axiom(name)[0]
    decls = []
    for s in VOCAB:
        if s in used:
            decls.append(VOCAB[s])
    for n in sorted(int(s.rsplit("_", 1)[1]) for s in used if s.startswith("set_enum_")):
        decls.append(f"(declare-fun set_enum_{n} ({' '.join(['U'] * n)}) U)")
    for s in sorted(em.strings):
        decls.append(f"(declare-fun {s} () U)")
    for s, arity in em.user.items():
        decls.append(f"(declare-fun {s} ({' '.join(['U'] * arity)}) U)")
    if len(em.strings) > 1:
        axioms.append(("ax_str", f"(distinct {' '.join(sorted(em.strings))})"))
    return SmtScript(ob.name, decls, axioms, hyps, goal, logic)
