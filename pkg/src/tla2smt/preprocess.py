"""Pipeline from a parsed obligation to basic normal form.

    intro ; boolify ; Fix(Reduce)
    Reduce = Fix(Rewrite . Eliminate) ; Fix(Abstract . Rewrite)

Elimination runs before rewriting in each iteration, so that a definition
such as ``f = [x \in S |-> e]`` is used as a substitution before the
extensionality rules expand it.

Contraction instances between abstraction definitions are already basic and
would be destroyed by the contraction rule itself, so they bypass rewriting
and are appended to the final hypotheses.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from . import ast as A
from .abstract import (NameSupply, abstract_non_basic, choose_axioms,
                       contraction_instances, definition_hypotheses)
from .boolify import boolify_obligation
from .eliminate import eliminate_definitions
from .errors import FixpointBudgetExceeded
from .normalize import normalize

MAX_ROUNDS = 64

Dump = Optional[Callable[[str, A.ProofObligation], None]]


@dataclass
class PipelineState:
    supply: NameSupply
    definitions: list = field(default_factory=list)
    frozen: list = field(default_factory=list)   # hypotheses exempt from rewriting
    trace: Optional[list] = None                  # rewrite steps, if requested
    rounds: list = field(default_factory=list)    # per-round summary


def obligation_equal(a: A.ProofObligation, b: A.ProofObligation) -> bool:
    if len(a.hypotheses) != len(b.hypotheses):
        return False
    return all(A.alpha_equal(x, y) for x, y in zip(a.formulas(), b.formulas()))


def intro(ob: A.ProofObligation) -> A.ProofObligation:
    """Move goal antecedents into the hypotheses and split conjunctions."""
    hyps = list(ob.hypotheses)
    goal = ob.goal
    while isinstance(goal, A.Implies):
        hyps.append(goal.a)
        goal = goal.b
    return ob.replace(hypotheses=split_conjunctions(hyps), goal=goal)


def split_conjunctions(hyps) -> list:
    out = []
    todo = list(reversed(hyps))
    while todo:
        h = todo.pop()
        if isinstance(h, A.And):
            todo.append(h.b)
            todo.append(h.a)
        elif not isinstance(h, A.TrueE):
            out.append(h)
    return out


def rewrite(ob: A.ProofObligation, state: PipelineState | None = None) -> A.ProofObligation:
    trace = state.trace if state is not None else None
    hyps = [normalize(h, trace=trace) for h in ob.hypotheses]
    goal = normalize(ob.goal, trace=trace)
    return ob.replace(hypotheses=split_conjunctions(hyps), goal=goal)


def _fix(fn, ob, what):
    for _ in range(MAX_ROUNDS):
        new = fn(ob)
        if obligation_equal(new, ob):
            return new
        ob = new
    raise FixpointBudgetExceeded(f"{what} did not converge in {MAX_ROUNDS} rounds")


def abstract_step(ob: A.ProofObligation, state: PipelineState) -> A.ProofObligation:
    new_defs = []
    hyps = []
    for h in ob.hypotheses:
        h2, ds = abstract_non_basic(h, state.supply)
        hyps.append(h2)
        new_defs += ds
    goal, ds = abstract_non_basic(ob.goal, state.supply)
    new_defs += ds
    if not new_defs:
        return ob
    old = state.definitions
    hyps += definition_hypotheses(new_defs)
    hyps += choose_axioms(new_defs, old)
    state.frozen += contraction_instances(new_defs, old)
    state.definitions = old + new_defs
    state.rounds[-1]["defined"] += [d.op for d in new_defs]
    constants = ob.constants + tuple((d.op, len(d.params)) for d in new_defs)
    defined = ob.defined | {d.op for d in new_defs}
    return ob.replace(hypotheses=hyps, goal=goal, constants=constants, defined=defined)


def _eliminate_logged(ob, state):
    before = {str(h) for h in ob.hypotheses}
    out = eliminate_definitions(ob)
    after = {str(h) for h in out.hypotheses}
    state.rounds[-1]["eliminated"] += sorted(before - after)
    return out


def reduce(ob: A.ProofObligation, state: PipelineState) -> A.ProofObligation:
    state.rounds.append({"eliminated": [], "defined": []})
    ob = _fix(lambda o: rewrite(_eliminate_logged(o, state), state), ob, "Eliminate")
    ob = _fix(lambda o: abstract_step(rewrite(o, state), state), ob, "Abstract")
    return ob


def preprocess(ob: A.ProofObligation, dump: Dump = None,
               state: PipelineState | None = None) -> A.ProofObligation:
    """Translate ``ob`` into an equivalid obligation in basic normal form."""
    if state is None:
        state = PipelineState(NameSupply())
    taken = set()
    for f in ob.formulas():
        taken |= A.all_names(f)
        taken |= {x.op for x in A.subterms(f) if isinstance(x, A.OpApp)}
    state.supply.avoid |= taken | {c for c, _ in ob.constants}

    ob = boolify_obligation(intro(ob))
    if dump:
        dump("boolify", ob)
    for n in range(1, MAX_ROUNDS + 1):
        new = reduce(ob, state)
        if dump:
            dump(f"reduce{n}", new)
        if obligation_equal(new, ob):
            break
        ob = new
    else:
        raise FixpointBudgetExceeded(f"Reduce did not converge in {MAX_ROUNDS} rounds")
    ob = ob.replace(hypotheses=list(ob.hypotheses) + state.frozen)
    if dump:
        dump("final", ob)
    return ob
