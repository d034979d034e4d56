"""Semi-deciders for scrutability and solvability, and witness contexts.

Both properties coincide with termination of a reduction (open for
scrutability, solving for solvability).  These reductions are diamond, so a
repeated term proves divergence and gives a definite negative answer.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

from .classify import is_inert
from .rewriting import Closure, Status, Strategy, Trace, reduce
from .syntax import (
    Abs, App, Context, ContextKind, Hole, Var, alpha_eq, fresh, parse, plug,
)

__all__ = [
    "Answer", "Verdict", "Target", "IDENTITY", "scrutable", "solvable",
    "derive_witnesses", "verify_witness", "decide", "head_context",
]

IDENTITY = parse(r"\z.z")


class Answer(enum.Enum):
    YES = "Yes"
    NO = "No"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    answer: Answer
    trace: Trace

    @property
    def definite(self) -> bool:
        return self.answer is not Answer.UNKNOWN

    def __bool__(self):
        return self.answer is Answer.YES

    def to_json(self) -> dict:
        return {"answer": self.answer.value, "trace": self.trace.to_json()}


def decide(t, strat: Strategy, fuel: int) -> Verdict:
    trace = reduce(t, strat, fuel, detect_cycles=True)
    answer = {Status.NORMAL_FORM: Answer.YES, Status.CYCLE: Answer.NO,
              Status.FUEL_EXHAUSTED: Answer.UNKNOWN}[trace.status]
    return Verdict(answer, trace)


def scrutable(t, fuel: int = 10000) -> Verdict:
    return decide(t, Strategy(Closure.OPEN, True), fuel)


def solvable(t, fuel: int = 10000) -> Verdict:
    return decide(t, Strategy(Closure.SOLVING, True), fuel)


def derive_witnesses(h: Context, u) -> tuple:
    """``((H \\x.u) I, H x')`` for a head context ``H`` and fresh ``x``, ``x'``."""
    if not isinstance(h, Context):
        raise TypeError("expected a Context")
    Context(h.tree, ContextKind.HEAD)      # raises unless the tree is a head context
    avoid = u.fv | h.tree.fv
    x = fresh("x", avoid)
    fe = Context(App(App(h.tree, Abs(x, u)), IDENTITY), ContextKind.HEAD)
    inert = Context(App(h.tree, Var(fresh("x", avoid | {x}))), ContextKind.HEAD)
    return fe, inert


class Target(enum.Enum):
    IDENTITY = "identity"
    INERT = "inert"
    VALUE = "value"
    GIVEN = "given"


def verify_witness(h: Context, t, target: Target = Target.IDENTITY, fuel: int = 10000,
                   given=None) -> Verdict:
    """Reduce ``H<t>`` with the full reduction and test the normal form against ``target``.

    Head contexts serve every target; testing contexts serve the value target.
    A normal form missing the target gives ``No`` with a normal-form trace.
    """
    allowed = (ContextKind.HEAD, ContextKind.TESTING) if target is Target.VALUE \
        else (ContextKind.HEAD,)
    if h.kind not in allowed:
        raise ValueError(f"a {h.kind.name.lower()} context cannot witness {target.value}")
    if target is Target.GIVEN and given is None:
        raise ValueError("target 'given' needs a term")
    v = decide(plug(h, t), Strategy(Closure.FULL, True), fuel)
    if v.answer is not Answer.YES:
        return v
    nf = v.trace.final
    ok = {
        Target.IDENTITY: lambda: alpha_eq(nf, IDENTITY),
        Target.INERT: lambda: is_inert(nf),
        Target.VALUE: lambda: isinstance(nf, (Var, Abs)),
        Target.GIVEN: lambda: alpha_eq(nf, given),
    }[target]()
    return v if ok else Verdict(Answer.NO, v.trace)


def head_context(text, kind: ContextKind = ContextKind.HEAD) -> Context:
    """A context from text (or a term) using the free name ``HOLE`` for the hole."""
    from .syntax import meta_subst
    t = parse(text) if isinstance(text, str) else text
    if "HOLE" not in t.fv:
        raise ValueError("context text must mention HOLE")
    return Context(meta_subst(t, "HOLE", Hole()), kind)
