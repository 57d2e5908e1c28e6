"""Use equational hypotheses as substitutions.

A top-level hypothesis ``x = psi`` whose left side is a variable, an
operator application or ``DOMAIN t``, and which does not occur in ``psi``,
is applied as the rewrite ``x --> psi`` to the rest of the obligation.
Variable definitions are then dropped; applied-term definitions are kept,
since the substitution alone loses the fact that the term equals ``psi``.
"""
from __future__ import annotations

from . import ast as A

SIZE_GUARD = 16


def _eligible_side(x: A.Expr, exempt) -> bool:
    if isinstance(x, A.Var):
        return True
    if isinstance(x, A.OpApp):
        return x.op not in exempt
    if isinstance(x, A.Domain):
        return isinstance(x.a, (A.Var, A.OpApp))
    return False


def _occurs(x: A.Expr, psi: A.Expr) -> bool:
    if isinstance(x, A.Var):
        return x.name in A.free_vars(psi)
    return any(A.alpha_equal(x, t) for t in A.subterms(psi))


def orient(h: A.Expr, exempt=frozenset()):
    """``(x, psi)`` if ``h`` is a usable definition, else None.

    When both sides qualify, an applied term is rewritten rather than a
    variable, then the smaller side, then the one printing first.
    """
    if not isinstance(h, A.Eq):
        return None
    options = []
    for x, psi in ((h.a, h.b), (h.b, h.a)):
        if _eligible_side(x, exempt) and not _occurs(x, psi):
            options.append((isinstance(x, A.Var), A.size(x), str(x), x, psi))
    if not options:
        return None
    best = min(options, key=lambda o: o[:3])
    return best[3], best[4]


def _apply(e: A.Expr, x: A.Expr, psi: A.Expr) -> A.Expr:
    if isinstance(x, A.Var):
        return A.substitute(e, x.name, psi)
    return A.replace_term(e, x, psi)


def _mentions(e: A.Expr, x: A.Expr) -> bool:
    return _occurs(x, e)


def eliminate_definitions(ob: A.ProofObligation) -> A.ProofObligation:
    exempt = ob.defined
    hyps = list(ob.hypotheses)
    goal = ob.goal
    limit = SIZE_GUARD * sum(A.size(f) for f in ob.formulas())
    done = set()
    i = 0
    while i < len(hyps):
        h = hyps[i]
        o = None if h in done else orient(h, exempt)
        if o is None:
            i += 1
            continue
        x, psi = o
        others = [j for j in range(len(hyps)) if j != i]
        if not any(_mentions(hyps[j], x) for j in others) and not _mentions(goal, x):
            if isinstance(x, A.Var):
                del hyps[i]
            else:
                done.add(h)
                i += 1
            continue
        new_hyps = [hyps[j] if j == i else _apply(hyps[j], x, psi) for j in range(len(hyps))]
        new_goal = _apply(goal, x, psi)
        if sum(A.size(f) for f in new_hyps) + A.size(new_goal) > limit:
            done.add(h)
            i += 1
            continue
        hyps, goal = new_hyps, new_goal
        if isinstance(x, A.Var):
            del hyps[i]
        else:
            done.add(h)
        # substitution may have created new definitions earlier in the list
        i = 0
    return ob.replace(hypotheses=hyps, goal=goal)
