"""Rules at a distance, their contextual closures, and fueled reduction.

Positions are root paths: ``0`` is the body of an abstraction, the function of
an application or the body of an explicit substitution; ``1`` is the argument
or the definition.
"""

from __future__ import annotations

import enum
from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, Optional

from .syntax import (
    ES, Abs, App, Term, Var, alpha_canon, alpha_eq, fresh, freshen, has_es,
    is_value, meta_subst, occurrences, pretty, rename_free, replace, subterm,
)

__all__ = [
    "Closure", "Strategy", "StepKind", "Axiom", "Step", "Status", "Trace",
    "NotARedex", "STRATEGIES",
    "peel", "wrap", "root_kind", "fire", "redexes", "step", "step_at", "reduce",
    "betav_redexes", "betav_reduce", "simulate_betav_step", "glue_step",
    "apply_axiom", "equiv_steps", "struct_equiv", "equiv_class",
    "sigma_embed_check", "position_mode",
]


class Closure(enum.Enum):
    OPEN = "open"
    SOLVING = "solving"
    FULL = "full"


@dataclass(frozen=True)
class Strategy:
    closure: Closure
    substitute_variables: bool = True
    enable_glue: bool = False


STRATEGIES = {
    "o": Strategy(Closure.OPEN, True),
    "olam": Strategy(Closure.OPEN, False),
    "s": Strategy(Closure.SOLVING, True),
    "slam": Strategy(Closure.SOLVING, False),
    "vsc": Strategy(Closure.FULL, True),
    "vsclam": Strategy(Closure.FULL, False),
}


class StepKind(enum.Enum):
    M = "m"
    E_LAMBDA = "e_lambda"
    E_VAR = "e_var"
    GLUE = "glue"
    BETA_V = "beta_v"


class Axiom(enum.Enum):
    """Oriented structural equivalence axioms.  ``COM`` is its own inverse."""

    APP_LEFT = "@l"
    APP_LEFT_INV = "@l-1"
    APP_RIGHT = "@r"
    APP_RIGHT_INV = "@r-1"
    SUB = "[.]"
    SUB_INV = "[.]-1"
    COM = "com"

    @property
    def inverse(self) -> "Axiom":
        return _INVERSE[self]


_INVERSE = {
    Axiom.APP_LEFT: Axiom.APP_LEFT_INV, Axiom.APP_LEFT_INV: Axiom.APP_LEFT,
    Axiom.APP_RIGHT: Axiom.APP_RIGHT_INV, Axiom.APP_RIGHT_INV: Axiom.APP_RIGHT,
    Axiom.SUB: Axiom.SUB_INV, Axiom.SUB_INV: Axiom.SUB, Axiom.COM: Axiom.COM,
}


@dataclass(frozen=True)
class Step:
    path: tuple
    kind: object          # StepKind or Axiom
    term: Term            # the result of the step


class Status(enum.Enum):
    NORMAL_FORM = "NormalForm"
    CYCLE = "Cycle"
    FUEL_EXHAUSTED = "FuelExhausted"


@dataclass
class Trace:
    start: Term
    steps: list = field(default_factory=list)
    status: Status = Status.NORMAL_FORM
    cycle_start: Optional[int] = None   # index of the first occurrence of the repeated term

    @property
    def final(self) -> Term:
        return self.steps[-1].term if self.steps else self.start

    def terms(self) -> list:
        return [self.start] + [s.term for s in self.steps]

    def count(self, kind: StepKind) -> int:
        return sum(1 for s in self.steps if s.kind is kind)

    @property
    def counts(self) -> dict:
        return {k.value: self.count(k) for k in StepKind}

    def to_json(self) -> dict:
        out = {
            "start": pretty(self.start),
            "steps": [{"path": list(s.path), "kind": s.kind.value, "term": pretty(s.term)}
                      for s in self.steps],
            "status": self.status.value,
            "counts": self.counts,
        }
        if self.cycle_start is not None:
            out["cycle_start"] = self.cycle_start
        return out


class NotARedex(ValueError):
    pass


# ----------------------------------------------------------- root rules

def peel(t) -> tuple:
    """Split ``L<c>`` into ``c`` and the layers of ``L``, outermost first."""
    layers = []
    while isinstance(t, ES):
        layers.append((t.binder, t.defn))
        t = t.body
    return t, layers


def wrap(core, layers) -> Term:
    for x, d in reversed(layers):
        core = ES(core, x, d)
    return core


def _freshen_layers(t, avoid: frozenset) -> Term:
    """Rename the binders of the substitution context around ``t`` away from ``avoid``."""
    if not isinstance(t, ES):
        return t
    y, body = t.binder, t.body
    if y in avoid:
        y = fresh(y, avoid | body.fv)
        body = rename_free(body, t.binder, y)
    return ES(_freshen_layers(body, avoid), y, t.defn)


def _glue_path(t: ES) -> Optional[tuple]:
    """Path of the single open occurrence of the bound variable, if the glue rule applies."""
    if not isinstance(t.defn, App):
        return None
    occ = occurrences(t.body, t.binder)
    if len(occ) != 1:
        return None
    node = t.body
    for i in occ[0]:
        if isinstance(node, Abs):
            return None
        node = subterm(node, (i,))
    return occ[0]


def root_kind(t, evar: bool = True, glue: bool = False) -> Optional[StepKind]:
    if isinstance(t, App):
        core, _ = peel(t.fun)
        return StepKind.M if isinstance(core, Abs) else None
    if isinstance(t, ES):
        core, _ = peel(t.defn)
        if isinstance(core, Abs):
            return StepKind.E_LAMBDA
        if isinstance(core, Var):
            return StepKind.E_VAR if evar else None
        if glue and _glue_path(t) is not None:
            return StepKind.GLUE
    return None


def fire(t, kind) -> tuple:
    """Fire a root redex.  Returns ``(renamed redex, reduct)``.

    The renamed redex is alpha-equivalent to ``t``; its binders are chosen so
    that the reduct is obtained by plain grafting, without capture.
    """
    if isinstance(kind, Axiom):
        out = apply_axiom(t, kind)
        if out is None:
            raise NotARedex(f"{kind.value} does not apply to {pretty(t)}")
        return t, out
    if kind is StepKind.BETA_V:
        if not (isinstance(t, App) and isinstance(t.fun, Abs) and is_value(t.arg)):
            raise NotARedex(f"no beta_v redex at {pretty(t)}")
        return t, meta_subst(t.fun.body, t.fun.binder, t.arg)
    actual = root_kind(t, True, True)
    if actual is not kind:
        raise NotARedex(f"no {kind.value} redex at {pretty(t)}")
    if kind is StepKind.M:
        fun = _freshen_layers(t.fun, t.arg.fv)
        core, layers = peel(fun)
        return App(fun, t.arg), wrap(ES(core.body, core.binder, t.arg), layers)
    if kind is StepKind.GLUE:
        body = freshen(t.body, t.defn.fv)
        redex = ES(body, t.binder, t.defn)
        return redex, replace(body, _glue_path(redex), t.defn)
    defn = _freshen_layers(t.defn, t.body.fv)
    v, layers = peel(defn)
    return ES(t.body, t.binder, defn), wrap(meta_subst(t.body, t.binder, v), layers)


# ----------------------------------------------------------- closures

def position_mode(t, path) -> str:
    """The most restrictive closure admitting ``path``: ``'O'``, ``'S'`` or ``'F'``."""
    mode, under_abs = "S", False
    for i in path:
        if isinstance(t, Abs):
            under_abs = True
            if mode == "O":
                mode = "F"
        elif mode == "S" and i == 1:
            mode = "O"
        t = subterm(t, (i,))
    if not under_abs:
        return "O"
    return "F" if mode == "F" else "S"


def _walk(t, mode: str, path: tuple) -> Iterator[tuple]:
    yield path, t
    if isinstance(t, Abs):
        if mode != "O":
            yield from _walk(t.body, mode, path + (0,))
    elif isinstance(t, App):
        yield from _walk(t.fun, mode, path + (0,))
        yield from _walk(t.arg, "O" if mode == "S" else mode, path + (1,))
    elif isinstance(t, ES):
        yield from _walk(t.body, mode, path + (0,))
        yield from _walk(t.defn, "O" if mode == "S" else mode, path + (1,))


_MODE = {Closure.OPEN: "O", Closure.SOLVING: "S", Closure.FULL: "F"}


def redexes(t, strat: Strategy) -> Iterator[tuple]:
    """``(path, kind)`` of every redex admitted by ``strat``, leftmost-outermost first."""
    for path, s in _walk(t, _MODE[strat.closure], ()):
        k = root_kind(s, strat.substitute_variables, strat.enable_glue)
        if k is not None:
            yield path, k


def step_at(t, path, kind) -> Term:
    _, reduct = fire(subterm(t, path), kind)
    return replace(t, path, reduct)


def step(t, strat: Strategy) -> Optional[Step]:
    """Fire the leftmost-outermost redex.  ``None`` iff ``t`` is normal."""
    for path, kind in redexes(t, strat):
        return Step(path, kind, step_at(t, path, kind))
    return None


def _run(t, next_step, fuel: int, detect_cycles: bool) -> Trace:
    trace = Trace(t)
    seen = {alpha_canon(t): 0}
    cur = t
    for _ in range(fuel):
        nxt = next_step(cur)
        if nxt is None:
            trace.status = Status.NORMAL_FORM
            return trace
        path, kind, cur = nxt
        trace.steps.append(Step(tuple(path), kind, cur))
        if detect_cycles:
            key = alpha_canon(cur)
            if key in seen:
                trace.status = Status.CYCLE
                trace.cycle_start = seen[key]
                return trace
            seen[key] = len(trace.steps)
    trace.status = Status.NORMAL_FORM if next_step(cur) is None else Status.FUEL_EXHAUSTED
    return trace


def reduce(t, strat: Strategy, fuel: int = 10000, detect_cycles: bool = True) -> Trace:
    if fuel < 0:
        raise ValueError("fuel must be non-negative")

    def nxt(cur):
        for path, kind in redexes(cur, strat):
            return path, kind, step_at(cur, path, kind)
        return None

    return _run(t, nxt, fuel, detect_cycles)


# ----------------------------------------------------------- Plotkin

def betav_redexes(t, closure: Closure = Closure.OPEN) -> Iterator[tuple]:
    mode = "O" if closure is Closure.OPEN else "F"
    for path, s in _walk(t, mode, ()):
        if isinstance(s, App) and isinstance(s.fun, Abs) and is_value(s.arg):
            yield path


def betav_reduce(t, closure: Closure = Closure.OPEN, fuel: int = 10000,
                 detect_cycles: bool = True) -> Trace:
    if has_es(t):
        raise ValueError("beta_v reduction is defined on terms without explicit substitutions")
    if closure is Closure.SOLVING:
        raise ValueError("beta_v reduction is closed under open or full contexts only")

    def nxt(cur):
        for path in betav_redexes(cur, closure):
            return path, StepKind.BETA_V, step_at(cur, path, StepKind.BETA_V)
        return None

    return _run(t, nxt, fuel, detect_cycles)


def simulate_betav_step(t, t2) -> Term:
    """The middle term of ``t ->om mid ->oe t2`` for an open beta_v step ``t -> t2``."""
    if has_es(t):
        raise ValueError("source has explicit substitutions")
    for path in betav_redexes(t, Closure.OPEN):
        if not alpha_eq(step_at(t, path, StepKind.BETA_V), t2):
            continue
        mid = step_at(t, path, StepKind.M)
        kind = root_kind(subterm(mid, path))
        if kind in (StepKind.E_LAMBDA, StepKind.E_VAR) and alpha_eq(step_at(mid, path, kind), t2):
            return mid
    raise NotARedex(f"{pretty(t)} does not beta_v-step to {pretty(t2)}")


# ----------------------------------------------------------- glue

def glue_step(t) -> Optional[Term]:
    """Fire the leftmost glue redex, under any context."""
    for path, s in _walk(t, "F", ()):
        if isinstance(s, ES) and _glue_path(s) is not None:
            return step_at(t, path, StepKind.GLUE)
    return None


# ----------------------------------------------------------- structural equivalence

def apply_axiom(s, ax: Axiom) -> Optional[Term]:
    """Rewrite the root of ``s`` by one oriented axiom, or ``None`` if it does not apply."""
    if ax is Axiom.APP_LEFT:
        if isinstance(s, App) and isinstance(s.fun, ES) and s.fun.binder not in s.arg.fv:
            e = s.fun
            return ES(App(e.body, s.arg), e.binder, e.defn)
    elif ax is Axiom.APP_LEFT_INV:
        if isinstance(s, ES) and isinstance(s.body, App) and s.binder not in s.body.arg.fv:
            a = s.body
            return App(ES(a.fun, s.binder, s.defn), a.arg)
    elif ax is Axiom.APP_RIGHT:
        if isinstance(s, App) and isinstance(s.arg, ES) and s.arg.binder not in s.fun.fv:
            e = s.arg
            return ES(App(s.fun, e.body), e.binder, e.defn)
    elif ax is Axiom.APP_RIGHT_INV:
        if isinstance(s, ES) and isinstance(s.body, App) and s.binder not in s.body.fun.fv:
            a = s.body
            return App(a.fun, ES(a.arg, s.binder, s.defn))
    elif ax is Axiom.SUB:
        if isinstance(s, ES) and isinstance(s.body, ES):
            inner, y = s.body, s.binder
            if y != inner.binder and y not in inner.body.fv:
                return ES(inner.body, inner.binder, ES(inner.defn, y, s.defn))
    elif ax is Axiom.SUB_INV:
        if isinstance(s, ES) and isinstance(s.defn, ES):
            inner, x = s.defn, s.binder
            y = inner.binder
            if y != x and y not in s.body.fv:
                return ES(ES(s.body, x, inner.body), y, inner.defn)
    elif ax is Axiom.COM:
        if isinstance(s, ES) and isinstance(s.body, ES):
            inner = s.body
            x, y = s.binder, inner.binder
            if x != y and y not in s.defn.fv and x not in inner.defn.fv:
                return ES(ES(inner.body, x, s.defn), y, inner.defn)
    return None


def _distinct_binders(t) -> Term:
    """An alpha-variant whose binders are pairwise distinct and distinct from free names."""
    used = set(t.fv)

    def go(t):
        if isinstance(t, Var):
            return t
        if isinstance(t, App):
            return App(go(t.fun), go(t.arg))
        y, body = t.binder, t.body
        if y in used:
            y = fresh(y, used | body.fv)
            body = rename_free(body, t.binder, y)
        used.add(y)
        if isinstance(t, Abs):
            return Abs(y, go(body))
        return ES(go(body), y, go(t.defn))

    return go(t)


def equiv_steps(t) -> Iterator[Step]:
    """All single-axiom rewrites of ``t`` at every position."""
    from .syntax import positions
    for path in positions(t):
        s = subterm(t, path)
        if not isinstance(s, (App, ES)):
            continue
        for ax in Axiom:
            out = apply_axiom(s, ax)
            if out is not None:
                yield Step(path, ax, replace(t, path, out))


def equiv_class(t, limit: int = 100000) -> dict:
    """The structural equivalence class of ``t``, keyed by canonical form."""
    t = _distinct_binders(t)
    seen = {alpha_canon(t): t}
    todo = deque([t])
    while todo:
        cur = todo.popleft()
        for s in equiv_steps(cur):
            key = alpha_canon(s.term)
            if key not in seen:
                seen[key] = s.term
                todo.append(s.term)
                if len(seen) > limit:
                    raise RuntimeError("equivalence class exceeds search limit")
    return seen


def struct_equiv(t, u) -> bool:
    if alpha_eq(t, u):
        return True
    from .syntax import count_es, size
    if size(t) != size(u) or count_es(t) != count_es(u) or t.fv != u.fv:
        return False
    return alpha_canon(u) in equiv_class(t)


# ----------------------------------------------------------- sigma rules

def sigma_embed_check(t, rule: str) -> bool:
    """Check that a sigma step is simulated by one m step on each side up to structural equivalence."""
    rule = rule.replace("σ", "sigma").lower()
    if rule in ("sigma1", "s1", "1"):
        if not (isinstance(t, App) and isinstance(t.fun, App) and isinstance(t.fun.fun, Abs)):
            raise NotARedex(f"no sigma1 redex at {pretty(t)}")
        lam, u, s = t.fun.fun, t.fun.arg, t.arg
        x, body = lam.binder, lam.body
        if x in s.fv:
            x = fresh(x, s.fv | body.fv)
            body = rename_free(body, lam.binder, x)
        q2 = App(Abs(x, App(body, s)), u)
        left = step_at(t, (0,), StepKind.M)
    elif rule in ("sigma3", "s3", "3"):
        if not (isinstance(t, App) and is_value(t.fun) and isinstance(t.arg, App)
                and isinstance(t.arg.fun, Abs)):
            raise NotARedex(f"no sigma3 redex at {pretty(t)}")
        v, lam, u = t.fun, t.arg.fun, t.arg.arg
        x, body = lam.binder, lam.body
        if x in v.fv:
            x = fresh(x, v.fv | body.fv)
            body = rename_free(body, lam.binder, x)
        q2 = App(Abs(x, App(v, body)), u)
        left = step_at(t, (1,), StepKind.M)
    else:
        raise ValueError(f"unknown sigma rule {rule!r}")
    right = step_at(q2, (), StepKind.M)
    return struct_equiv(left, right)
