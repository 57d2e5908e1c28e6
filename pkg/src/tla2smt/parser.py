"""Recursive-descent parser for the ASCII obligation syntax.

A file holds one obligation::

    ASSUME NEW S, NEW P(_), NEW x \\in S,
           \\A y \\in S : P(y)
    PROVE  P(x)

Derived forms (bounded quantifiers, ``#``, ``\\notin``, ``-``, ``>``,
``\\subseteq``, tuples, records) are expanded while parsing.
"""
from __future__ import annotations

import re

from . import ast as A
from .errors import TlaSyntaxError, UnknownSymbol

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<lcomment>\\\*[^\n]*)
  | (?P<bcomment>\(\*)
  | (?P<num>\d+)
  | (?P<str>"[^"\n]*")
  | (?P<kw>\\[A-Za-z]+)
  | (?P<internal>\$[A-Za-z]+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op><=>|=>|=<|<<|>>|\|->|->|\.\.|/\\|\\/|>=|/=|[~=<>+\-*()\[\]{},:.#])
""", re.VERBOSE)

_KEYWORDS = {"ASSUME", "PROVE", "NEW", "CONSTANT", "CONSTANTS", "TRUE",
             "FALSE", "SUBSET", "UNION", "DOMAIN", "CHOOSE", "IF", "THEN",
             "ELSE", "Int", "Nat", "IsAFcn"}

_ALIASES = {"\\union": "\\cup", "\\lnot": "~", "\\neg": "~", "\\land": "/\\",
            "\\lor": "\\/", "\\equiv": "<=>", "\\leq": "=<", "\\geq": ">=",
            "\\forall": "\\A", "\\exists": "\\E"}

_BACKSLASH_OPS = {"\\A", "\\E", "\\in", "\\notin", "\\cup", "\\subseteq",
                  "\\/"} | set(_ALIASES)


class _Tok:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind, self.text, self.line, self.col = kind, text, line, col

    def __repr__(self):
        return f"{self.kind}:{self.text}@{self.line}:{self.col}"


def tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, col = 0, 1, 1
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if not m:
            raise TlaSyntaxError(line, col, f"unexpected character {text[pos]!r}")
        kind = m.lastgroup
        s = m.group()
        if kind == "bcomment":
            end = text.find("*)", pos + 2)
            if end < 0:
                raise TlaSyntaxError(line, col, "unterminated comment")
            s = text[pos:end + 2]
        elif kind == "kw":
            s = _ALIASES.get(s, s)
            if s not in _BACKSLASH_OPS and s not in ("~", "/\\", "<=>", "=<", ">="):
                raise TlaSyntaxError(line, col, f"unknown operator {m.group()}")
            kind = "op"
        elif kind == "ident" and s in _KEYWORDS:
            kind = "key"
        if kind not in ("ws", "lcomment", "bcomment"):
            toks.append(_Tok(kind, s, line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            col = len(s) - s.rfind("\n")
        else:
            col += len(s)
        pos += len(s)
    toks.append(_Tok("eof", "", line, col))
    return toks


class _Parser:
    def __init__(self, text: str, declared: dict | None):
        self.toks = tokenize(text)
        self.i = 0
        self.declared = declared  # None: accept any free identifier
        self.scope: list[str] = []
        self.implicit: dict[str, int] = {}

    # -- token helpers --------------------------------------------------
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def peek(self, k: int = 1) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.text == text and t.kind in ("op", "key")

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.i += 1
            return True
        return False

    def expect(self, text: str) -> _Tok:
        if not self.at(text):
            self.error(f"expected {text!r}, found {self.tok.text or 'end of input'!r}")
        t = self.tok
        self.i += 1
        return t

    def placeholder(self):
        if self.tok.text != "_":
            self.error("expected '_' in operator declaration")
        self.i += 1

    def ident(self) -> str:
        t = self.tok
        if t.kind != "ident":
            self.error(f"expected identifier, found {t.text or 'end of input'!r}")
        self.i += 1
        return t.text

    def error(self, msg: str, tok: _Tok | None = None):
        t = tok or self.tok
        raise TlaSyntaxError(t.line, t.col, msg)

    # -- obligations ----------------------------------------------------
    def obligation(self, name: str) -> A.ProofObligation:
        constants: list[tuple[str, int]] = []
        hyps: list[A.Expr] = []
        if self.accept("ASSUME"):
            while True:
                if self.accept("NEW"):
                    self.accept("CONSTANT")
                    tok = self.tok
                    c = self.ident()
                    if c in self.declared:
                        self.error(f"symbol {c!r} declared twice", tok)
                    arity = 0
                    if self.accept("("):
                        arity = 1
                        self.placeholder()
                        while self.accept(","):
                            self.placeholder()
                            arity += 1
                        self.expect(")")
                    constants.append((c, arity))
                    self.declared[c] = arity
                    if self.accept("\\in"):
                        hyps.append(A.In(A.Var(c), self.expr()))
                else:
                    hyps.append(self.expr())
                if not self.accept(","):
                    break
        self.expect("PROVE")
        goal = self.expr()
        return A.ProofObligation(
            name=name,
            hypotheses=tuple(A.desugar(h) for h in hyps),
            goal=A.desugar(goal),
            constants=tuple(constants),
        )

    # -- expressions ----------------------------------------------------
    def expr(self) -> A.Expr:
        e = self.implies()
        while self.at("<=>"):
            self.i += 1
            e = A.Iff(e, self.implies())
        return e

    def implies(self) -> A.Expr:
        e = self.disj()
        if self.accept("=>"):
            return A.Implies(e, self.implies())
        return e

    def disj(self) -> A.Expr:
        e = self.conj()
        while self.accept("\\/"):
            e = A.Or(e, self.conj())
        return e

    def conj(self) -> A.Expr:
        e = self.negation()
        while self.accept("/\\"):
            e = A.And(e, self.negation())
        return e

    def negation(self) -> A.Expr:
        if self.accept("~"):
            return A.Not(self.negation())
        return self.relation()

    def relation(self) -> A.Expr:
        a = self.range_()
        t = self.tok.text if self.tok.kind == "op" else None
        if t == "=":
            self.i += 1
            return A.Eq(a, self.range_())
        if t in ("#", "/="):
            self.i += 1
            return A.Not(A.Eq(a, self.range_()))
        if t == "\\in":
            self.i += 1
            return A.In(a, self.range_())
        if t == "\\notin":
            self.i += 1
            return A.Not(A.In(a, self.range_()))
        if t == "<":
            self.i += 1
            return A.Lt(a, self.range_())
        if t == ">":
            self.i += 1
            return A.Lt(self.range_(), a)
        if t == "=<":
            self.i += 1
            return A.Not(A.Lt(self.range_(), a))
        if t == ">=":
            self.i += 1
            return A.Not(A.Lt(a, self.range_()))
        if t == "\\subseteq":
            self.i += 1
            b = self.range_()
            z = A.fresh_name("z", A.free_vars(a) | A.free_vars(b) | set(self.scope))
            return A.Forall(z, A.Implies(A.In(A.Var(z), a), A.In(A.Var(z), b)))
        return a

    def range_(self) -> A.Expr:
        a = self.cup()
        if self.accept(".."):
            return A.Range(a, self.cup())
        return a

    def cup(self) -> A.Expr:
        e = self.additive()
        while self.accept("\\cup"):
            e = A.Cup(e, self.additive())
        return e

    def additive(self) -> A.Expr:
        e = self.multiplicative()
        while True:
            if self.accept("+"):
                e = A.Plus(e, self.multiplicative())
            elif self.accept("-"):
                e = A.Plus(e, A.Neg(self.multiplicative()))
            else:
                return e

    def multiplicative(self) -> A.Expr:
        e = self.unary()
        while self.accept("*"):
            e = A.Times(e, self.unary())
        return e

    def unary(self) -> A.Expr:
        if self.at("-"):
            self.i += 1
            if self.tok.kind == "num":
                n = int(self.tok.text)
                self.i += 1
                return self.postfix(A.IntLit(-n))
            return A.Neg(self.unary())
        if self.accept("SUBSET"):
            return A.Subset(self.unary())
        if self.accept("UNION"):
            return A.Union(self.unary())
        if self.accept("DOMAIN"):
            return A.Domain(self.unary())
        if self.at("\\A") or self.at("\\E"):
            return self.quantifier()
        if self.accept("CHOOSE"):
            x = self.ident()
            dom = self.expr() if self.accept("\\in") else None
            self.expect(":")
            with self.bind(x):
                body = self.expr()
            if dom is not None:
                x, body = self._avoid_capture(x, body, dom)
                body = A.And(A.In(A.Var(x), dom), body)
            return A.Choose(x, body)
        if self.accept("IF"):
            c = self.expr()
            self.expect("THEN")
            a = self.expr()
            self.expect("ELSE")
            return A.Ite(c, a, self.expr())
        return self.postfix(self.primary())

    def quantifier(self) -> A.Expr:
        universal = self.tok.text == "\\A"
        self.i += 1
        binders: list[tuple[str, A.Expr | None]] = []
        pending: list[str] = []
        depth = len(self.scope)
        while True:
            pending.append(self.ident())
            if self.accept("\\in"):
                dom = self.expr()
                binders.extend((x, dom) for x in pending)
                self.scope.extend(pending)
                pending = []
            if not self.accept(","):
                break
        binders.extend((x, None) for x in pending)
        self.scope.extend(pending)
        self.expect(":")
        try:
            body = self.expr()
        finally:
            del self.scope[depth:]
        for x, dom in reversed(binders):
            if dom is None:
                body = A.Forall(x, body) if universal else A.Exists(x, body)
                continue
            x, body = self._avoid_capture(x, body, dom)
            guard = A.In(A.Var(x), dom)
            if universal:
                body = A.Forall(x, A.Implies(guard, body))
            else:
                body = A.Exists(x, A.And(guard, body))
        return body

    def _avoid_capture(self, x: str, body: A.Expr, dom: A.Expr):
        if x not in A.free_vars(dom):
            return x, body
        nx = A.fresh_name(x, A.all_names(body) | A.all_names(dom))
        return nx, A.substitute(body, x, A.Var(nx))

    def postfix(self, e: A.Expr) -> A.Expr:
        while True:
            if self.at("["):
                self.i += 1
                args = [self.expr()]
                while self.accept(","):
                    args.append(self.expr())
                self.expect("]")
                arg = args[0] if len(args) == 1 else A.TupleLit(tuple(args))
                e = A.FcnApp(e, arg)
            elif self.at(".") and self.peek().kind == "ident":
                self.i += 1
                e = A.RecordAccess(e, self.ident())
            else:
                return e

    def primary(self) -> A.Expr:
        t = self.tok
        if t.kind == "num":
            self.i += 1
            return A.IntLit(int(t.text))
        if t.kind == "str":
            self.i += 1
            return A.StrLit(t.text[1:-1])
        if t.kind == "internal":
            self.i += 1
            self.expect("(")
            args = [self.expr()]
            while self.accept(","):
                args.append(self.expr())
            self.expect(")")
            ctor = {"$bool": (A.Boolified, 1), "$alpha": (A.AlphaApp, 2),
                    "$omega": (A.OmegaApp, 2)}.get(t.text)
            if ctor is None or len(args) != ctor[1]:
                self.error(f"bad internal form {t.text}", t)
            return ctor[0](*args)
        if t.kind == "ident":
            self.i += 1
            return self.reference(t)
        if self.accept("TRUE"):
            return A.TrueE()
        if self.accept("FALSE"):
            return A.FalseE()
        if self.accept("Int"):
            return A.IntSet()
        if self.accept("Nat"):
            return A.NatSet()
        if self.accept("IsAFcn"):
            self.expect("(")
            e = self.expr()
            self.expect(")")
            return A.IsAFcn(e)
        if self.accept("("):
            e = self.expr()
            self.expect(")")
            return e
        if self.accept("{"):
            return self.braces()
        if self.accept("["):
            return self.brackets()
        if self.accept("<<"):
            items = []
            if not self.at(">>"):
                items.append(self.expr())
                while self.accept(","):
                    items.append(self.expr())
            self.expect(">>")
            return A.TupleLit(tuple(items))
        self.error(f"unexpected {t.text or 'end of input'!r}")

    def reference(self, t: _Tok) -> A.Expr:
        name = t.text
        if self.at("("):
            self.i += 1
            args = []
            if not self.at(")"):
                args.append(self.expr())
                while self.accept(","):
                    args.append(self.expr())
            self.expect(")")
            self.check_symbol(name, len(args), t)
            return A.OpApp(name, tuple(args))
        if name not in self.scope:
            self.check_symbol(name, 0, t)
        return A.Var(name)

    def check_symbol(self, name: str, arity: int, t: _Tok):
        if self.declared is None:
            known = self.implicit.setdefault(name, arity)
            if known != arity:
                self.error(f"{name} used with arities {known} and {arity}", t)
            return
        if name not in self.declared:
            raise UnknownSymbol(name, t.line, t.col)
        if self.declared[name] != arity:
            self.error(f"{name} expects {self.declared[name]} argument(s), got {arity}", t)

    def braces(self) -> A.Expr:
        if self.accept("}"):
            return A.EmptySet()
        # {x \in S : P}
        if self.tok.kind == "ident" and self.peek().text == "\\in":
            save = self.i
            x = self.ident()
            self.i += 1
            dom = self.expr()
            if self.accept(":"):
                with self.bind(x):
                    pred = self.expr()
                self.expect("}")
                x, pred = self._avoid_capture(x, pred, dom)
                return A.SetFilter(x, dom, pred)
            self.i = save
        # {e : x \in S} needs the binder before parsing e, so scan ahead
        colon = self._find_top_level(":", "}")
        if colon is not None:
            save = self.i
            self.i = colon + 1
            x = self.ident()
            self.expect("\\in")
            dom = self.expr()
            self.expect("}")
            end = self.i
            self.i = save
            with self.bind(x):
                body = self.expr()
            self.expect(":")
            self.i = end
            x, body = self._avoid_capture(x, body, dom)
            return A.SetMap(body, x, dom)
        items = [self.expr()]
        while self.accept(","):
            items.append(self.expr())
        self.expect("}")
        return A.SetEnum(tuple(items))

    def _find_top_level(self, target: str, closer: str):
        """Index of a ``target`` token at bracket depth zero before ``closer``.

        Colons that belong to quantifiers or CHOOSE inside the element are
        skipped by counting their binders.
        """
        depth = 0
        binders = 0
        j = self.i
        opens = {"(": ")", "[": "]", "{": "}", "<<": ">>"}
        closes = set(opens.values())
        while j < len(self.toks):
            tk = self.toks[j]
            if tk.kind == "eof":
                return None
            s = tk.text
            if tk.kind in ("op", "key"):
                if s in opens:
                    depth += 1
                elif s in closes:
                    if depth == 0:
                        return None
                    depth -= 1
                elif depth == 0 and s in ("\\A", "\\E", "CHOOSE"):
                    binders += 1
                elif depth == 0 and s == ":":
                    if binders:
                        binders -= 1
                    else:
                        return j
            j += 1
        return None

    def brackets(self) -> A.Expr:
        # record [h |-> e, ...]
        if self.tok.kind == "ident" and self.peek().text == "|->":
            labels, values = [], []
            while True:
                labels.append(self.ident())
                self.expect("|->")
                values.append(self.expr())
                if not self.accept(","):
                    break
            self.expect("]")
            return A.RecordLit(tuple(labels), tuple(values))
        # [x \in S |-> e]
        if self.tok.kind == "ident" and self.peek().text == "\\in":
            save = self.i
            x = self.ident()
            self.i += 1
            dom = self.expr()
            if self.accept("|->"):
                with self.bind(x):
                    body = self.expr()
                self.expect("]")
                x, body = self._avoid_capture(x, body, dom)
                return A.Lambda(x, dom, body)
            self.i = save
        a = self.expr()
        self.expect("->")
        b = self.expr()
        self.expect("]")
        return A.FcnSet(a, b)

    # -- scoping --------------------------------------------------------
    def bind(self, *names):
        parser = self

        class _Scope:
            def __enter__(self):
                parser.scope.extend(names)

            def __exit__(self, *exc):
                del parser.scope[len(parser.scope) - len(names):]

        return _Scope()


def parse_obligation(text: str, name: str = "obligation") -> A.ProofObligation:
    """Parse one ``ASSUME ... PROVE ...`` obligation.

    Every identifier must be declared with ``NEW``, be bound, or be a
    built-in; otherwise ``UnknownSymbol`` is raised.
    """
    p = _Parser(text, {})
    ob = p.obligation(name)
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r} after goal")
    return ob


def parse_file(text: str, name: str = "obligation") -> list[A.ProofObligation]:
    """Parse a sequence of obligations.

    Each obligation has its own declarations.  With more than one obligation
    the names are ``name#1``, ``name#2``, and so on.
    """
    p = _Parser(text, {})
    obs = []
    while p.tok.kind != "eof":
        if not (p.at("ASSUME") or p.at("PROVE")):
            p.error(f"expected ASSUME or PROVE, found {p.tok.text!r}")
        p.declared, p.scope, p.implicit = {}, [], {}
        obs.append(p.obligation(name))
    if not obs:
        p.error("no obligation found")
    if len(obs) > 1:
        obs = [ob.replace(name=f"{name}#{i}") for i, ob in enumerate(obs, 1)]
    return obs


def parse_expr(text: str, declared: dict | None = None) -> A.Expr:
    """Parse a single expression (desugared).

    With ``declared=None`` free identifiers are accepted as constants.
    """
    p = _Parser(text, declared)
    e = p.expr()
    if p.tok.kind != "eof":
        p.error(f"unexpected {p.tok.text!r}")
    return A.desugar(e)
