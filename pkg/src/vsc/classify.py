"""Recognizers for the normal-form grammars of the open, solving and full reductions."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .syntax import ES, Abs, App, Var

__all__ = [
    "NormalFormClass", "classify", "is_inert", "is_fireball", "is_full_value",
    "is_full_inert", "is_full_fireball", "is_solved_fireball",
]


def is_inert(t) -> bool:
    # i ::= x | i f | i[x<-i']
    if isinstance(t, Var):
        return True
    if isinstance(t, App):
        return is_inert(t.fun) and is_fireball(t.arg)
    if isinstance(t, ES):
        return is_inert(t.body) and is_inert(t.defn)
    return False


def is_fireball(t) -> bool:
    # f ::= v | i | f[x<-i]
    if isinstance(t, (Var, Abs)):
        return True
    if isinstance(t, ES):
        return is_fireball(t.body) and is_inert(t.defn)
    return is_inert(t)


def is_full_value(t) -> bool:
    if isinstance(t, Var):
        return True
    return isinstance(t, Abs) and is_full_fireball(t.body)


def is_full_inert(t) -> bool:
    if isinstance(t, Var):
        return True
    if isinstance(t, App):
        return is_full_inert(t.fun) and is_full_fireball(t.arg)
    if isinstance(t, ES):
        return is_full_inert(t.body) and is_full_inert(t.defn)
    return False


def is_full_fireball(t) -> bool:
    if isinstance(t, ES):
        return is_full_fireball(t.body) and is_full_inert(t.defn)
    return is_full_value(t) or is_full_inert(t)


def is_solved_fireball(t) -> bool:
    # fs ::= i | \x.fs | fs[x<-i]
    if isinstance(t, Abs):
        return is_solved_fireball(t.body)
    if isinstance(t, ES):
        return is_solved_fireball(t.body) and is_inert(t.defn)
    return is_inert(t)


@dataclass(frozen=True)
class NormalFormClass:
    value: bool
    inert: bool
    fireball: bool
    full_inert: bool
    full_fireball: bool
    solved_fireball: bool

    def as_dict(self) -> dict:
        return asdict(self)


def classify(t) -> NormalFormClass:
    """Membership flags; a variable is both a value and inert, so flags rather than one tag."""
    return NormalFormClass(
        value=isinstance(t, (Var, Abs)),
        inert=is_inert(t),
        fireball=is_fireball(t),
        full_inert=is_full_inert(t),
        full_fireball=is_full_fireball(t),
        solved_fireball=is_solved_fireball(t),
    )
