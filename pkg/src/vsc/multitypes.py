"""Call-by-value multi types, type contexts, and explicit typing derivations.

Linear types are the atom ``X`` and arrows ``M -o N`` between multi types.  A
multi type is a finite multiset of linear types, kept as a sorted tuple so that
equality of multisets is equality of tuples.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Union

from .syntax import ES, Abs, App, Var, is_value, parse, pretty

__all__ = [
    "Ground", "Arrow", "MultiType", "LinearType", "X", "EMPTY", "ground",
    "TypeContext", "Derivation", "TypeFlags",
    "DerivationError", "RuleShapeMismatch", "ContextSumMismatch", "ManyOnNonValue",
    "SubjectMismatch",
    "ax", "lam", "many", "app", "es", "check_derivation", "ctx_join",
    "type_flags", "derivation_flags", "is_ground", "is_inert_type", "is_solvable",
    "is_unitary_solvable", "is_inertly_solvable", "is_precisely_solvable",
    "type_to_json", "type_from_json", "derivation_to_json", "derivation_from_json",
    "format_type",
]


@dataclass(frozen=True, slots=True)
class Ground:
    key: tuple = field(default=(0,), init=False, repr=False, compare=False)

    def __repr__(self):
        return "X"


@dataclass(frozen=True, slots=True)
class Arrow:
    left: "MultiType"
    right: "MultiType"
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "key", (1, self.left.key, self.right.key))

    def __repr__(self):
        return f"({self.left!r} -o {self.right!r})"


LinearType = Union[Ground, Arrow]
X = Ground()


@dataclass(frozen=True, slots=True)
class MultiType:
    items: tuple = ()
    key: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        items = tuple(sorted(self.items, key=lambda a: a.key))
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "key", tuple(a.key for a in items))

    def __add__(self, other: "MultiType") -> "MultiType":
        if not other.items:
            return self
        if not self.items:
            return other
        return MultiType(self.items + other.items)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __bool__(self):
        return bool(self.items)

    def __repr__(self):
        return "[" + ", ".join(repr(a) for a in self.items) + "]"

    def minus(self, sub: "MultiType") -> Optional["MultiType"]:
        """Multiset difference, or ``None`` when ``sub`` is not included."""
        rest = list(self.items)
        for a in sub.items:
            try:
                rest.remove(a)
            except ValueError:
                return None
        return MultiType(tuple(rest))


EMPTY = MultiType(())


def ground(n: int) -> MultiType:
    return MultiType((X,) * n)


def format_type(t) -> str:
    return repr(t)


# ------------------------------------------------------------ contexts

class TypeContext:
    """Finite map from names to non-empty multi types; absent names map to ``0``."""

    __slots__ = ("_map",)

    def __init__(self, mapping: Optional[dict] = None):
        self._map = {k: v for k, v in (mapping or {}).items() if v}

    def __call__(self, x: str) -> MultiType:
        return self._map.get(x, EMPTY)

    get = __call__

    def __eq__(self, other):
        return isinstance(other, TypeContext) and self._map == other._map

    def __hash__(self):
        return hash(frozenset(self._map.items()))

    def __iter__(self):
        return iter(sorted(self._map))

    def __len__(self):
        return len(self._map)

    def items(self):
        return sorted(self._map.items())

    def domain(self) -> frozenset:
        return frozenset(self._map)

    def join(self, other: "TypeContext") -> "TypeContext":
        if not other._map:
            return self
        if not self._map:
            return other
        out = dict(self._map)
        for k, v in other._map.items():
            out[k] = out[k] + v if k in out else v
        return TypeContext(out)

    __add__ = join

    def remove(self, x: str) -> "TypeContext":
        if x not in self._map:
            return self
        out = dict(self._map)
        del out[x]
        return TypeContext(out)

    def __repr__(self):
        return "{" + ", ".join(f"{k}: {v!r}" for k, v in self.items()) + "}"


def ctx_join(g: TypeContext, d: TypeContext) -> TypeContext:
    return g.join(d)


# ------------------------------------------------------------ derivations

class DerivationError(ValueError):
    def __init__(self, msg: str, path: tuple = ()):
        super().__init__(f"{msg} (at node {list(path)})")
        self.path = tuple(path)
        self.msg = msg

    def at(self, prefix: tuple) -> "DerivationError":
        return type(self)(self.msg, tuple(prefix) + self.path)


class RuleShapeMismatch(DerivationError):
    pass


class ContextSumMismatch(DerivationError):
    pass


class ManyOnNonValue(DerivationError):
    pass


class SubjectMismatch(DerivationError):
    pass


RULES = ("ax", "lam", "app", "es", "many")
_RULE_ALIASES = {"λ": "lam", "lambda": "lam", "@": "app", "ax": "ax", "lam": "lam",
                 "app": "app", "es": "es", "many": "many"}


@dataclass(frozen=True)
class Derivation:
    rule: str
    premises: tuple
    ctx: TypeContext
    subject: object
    type: object          # LinearType for ax/lam, MultiType otherwise
    size: int = field(default=0, compare=False)
    msize: int = field(default=0, compare=False)

    @property
    def judgment(self) -> tuple:
        return self.ctx, self.subject, self.type

    @property
    def is_linear(self) -> bool:
        return self.rule in ("ax", "lam")

    def __repr__(self):
        return f"{self.ctx!r} |- {pretty(self.subject)} : {self.type!r}"


def _node(rule, premises, ctx, subject, typ) -> Derivation:
    s = (0 if rule == "many" else 1) + sum(p.size for p in premises)
    m = (1 if rule in ("lam", "app") else 0) + sum(p.msize for p in premises)
    return Derivation(rule, tuple(premises), ctx, subject, typ, s, m)


def ax(x: str, a: LinearType) -> Derivation:
    return _node("ax", (), TypeContext({x: MultiType((a,))}), Var(x), a)


def lam(x: str, premise: Derivation) -> Derivation:
    if premise.is_linear:
        raise RuleShapeMismatch("premise of lam must be a multi judgment")
    return _node("lam", (premise,), premise.ctx.remove(x), Abs(x, premise.subject),
                 Arrow(premise.ctx(x), premise.type))


def many(subject, premises: Iterable[Derivation]) -> Derivation:
    premises = tuple(premises)
    if not is_value(subject):
        raise ManyOnNonValue(f"many applied to non-value {pretty(subject)}")
    ctx = TypeContext()
    for p in premises:
        if not p.is_linear:
            raise RuleShapeMismatch("premises of many must be linear judgments")
        if p.subject != subject:
            raise SubjectMismatch(f"many premise types {pretty(p.subject)}, expected {pretty(subject)}")
        ctx = ctx.join(p.ctx)
    return _node("many", premises, ctx, subject, MultiType(tuple(p.type for p in premises)))


def app(fun: Derivation, arg: Derivation) -> Derivation:
    if fun.is_linear or arg.is_linear:
        raise RuleShapeMismatch("premises of app must be multi judgments")
    ft = fun.type
    if len(ft) != 1 or not isinstance(ft.items[0], Arrow):
        raise RuleShapeMismatch(f"function typed {ft!r}, expected a singleton arrow")
    arrow = ft.items[0]
    if arrow.left != arg.type:
        raise RuleShapeMismatch(f"argument typed {arg.type!r}, expected {arrow.left!r}")
    return _node("app", (fun, arg), fun.ctx.join(arg.ctx), App(fun.subject, arg.subject),
                 arrow.right)


def es(body: Derivation, x: str, defn: Derivation) -> Derivation:
    if body.is_linear or defn.is_linear:
        raise RuleShapeMismatch("premises of es must be multi judgments")
    if body.ctx(x) != defn.type:
        raise RuleShapeMismatch(f"{x} typed {body.ctx(x)!r} in body but definition typed {defn.type!r}")
    return _node("es", (body, defn), body.ctx.remove(x).join(defn.ctx),
                 ES(body.subject, x, defn.subject), body.type)


def _rebuild(d: Derivation, path: tuple) -> Derivation:
    """Recompute ``d`` bottom-up from its leaves and compare with the stored judgments."""
    rule = _RULE_ALIASES.get(d.rule)
    if rule is None:
        raise RuleShapeMismatch(f"unknown rule {d.rule!r}", path)
    arity = {"ax": 0, "lam": 1, "app": 2, "es": 2}.get(rule)
    if arity is not None and len(d.premises) != arity:
        raise RuleShapeMismatch(f"{rule} needs {arity} premises", path)
    subj = d.subject
    shape = {"ax": Var, "lam": Abs, "app": App, "es": ES}.get(rule)
    if shape is not None and not isinstance(subj, shape):
        raise SubjectMismatch(f"{rule} cannot conclude {pretty(subj)}", path)
    if rule == "many" and not is_value(subj):
        raise ManyOnNonValue(f"many applied to non-value {pretty(subj)}", path)
    prem = [_rebuild(p, path + (i,)) for i, p in enumerate(d.premises)]
    expected_subjects = {
        "lam": lambda: (subj.body,),
        "app": lambda: (subj.fun, subj.arg),
        "es": lambda: (subj.body, subj.defn),
        "many": lambda: (subj,) * len(prem),
        "ax": lambda: (),
    }[rule]()
    for i, (p, s) in enumerate(zip(prem, expected_subjects)):
        if p.subject != s:
            raise SubjectMismatch(f"premise types {pretty(p.subject)}, expected {pretty(s)}",
                                  path + (i,))
    try:
        if rule == "ax":
            if not isinstance(d.type, (Ground, Arrow)):
                raise RuleShapeMismatch("ax concludes a linear type")
            out = ax(subj.name, d.type)
        elif rule == "lam":
            out = lam(subj.binder, prem[0])
        elif rule == "many":
            out = many(subj, prem)
        elif rule == "app":
            out = app(prem[0], prem[1])
        else:
            out = es(prem[0], subj.binder, prem[1])
    except DerivationError as e:
        raise e.at(path) from None
    if out.type != d.type:
        raise RuleShapeMismatch(f"concluded type {d.type!r}, rule gives {out.type!r}", path)
    if out.ctx != d.ctx:
        raise ContextSumMismatch(f"context {d.ctx!r}, rule gives {out.ctx!r}", path)
    return out


def check_derivation(d: Derivation) -> tuple:
    """Recheck every node.  Returns ``((ctx, subject, type), |d|, |d|_m)``."""
    out = _rebuild(d, ())
    return out.judgment, out.size, out.msize


# ------------------------------------------------------------ type predicates

def _all(m: MultiType, pred) -> bool:
    return all(pred(a) for a in m.items)


def is_ground(m: MultiType) -> bool:
    return _all(m, lambda a: isinstance(a, Ground))


def is_inert_type(m: MultiType) -> bool:
    return _all(m, lambda a: isinstance(a, Ground)
                or (is_ground(a.left) and is_inert_type(a.right)))


def is_solvable(m: MultiType) -> bool:
    return len(m) > 0 and _all(m, lambda a: isinstance(a, Ground) or is_solvable(a.right))


def is_unitary_solvable(m: MultiType) -> bool:
    if len(m) != 1:
        return False
    a = m.items[0]
    return isinstance(a, Ground) or is_unitary_solvable(a.right)


def is_inertly_solvable(m: MultiType) -> bool:
    return len(m) > 0 and _all(m, lambda a: isinstance(a, Ground)
                               or (is_inert_type(a.left) and is_inertly_solvable(a.right)))


def is_precisely_solvable(m: MultiType) -> bool:
    return is_unitary_solvable(m) and is_inertly_solvable(m)


@dataclass(frozen=True)
class TypeFlags:
    ground: bool
    inert: bool
    solvable: bool
    unitary_solvable: bool
    inertly_solvable: bool
    precisely_solvable: bool


def type_flags(m) -> TypeFlags:
    if not isinstance(m, MultiType):
        m = MultiType((m,))
    return TypeFlags(
        ground=is_ground(m),
        inert=is_inert_type(m),
        solvable=is_solvable(m),
        unitary_solvable=is_unitary_solvable(m),
        inertly_solvable=is_inertly_solvable(m),
        precisely_solvable=is_precisely_solvable(m),
    )


def derivation_flags(d: Derivation) -> tuple:
    """``(inert, tight)`` for a derivation that checks."""
    (ctx, _, typ), _, _ = check_derivation(d)
    if not isinstance(typ, MultiType):
        typ = MultiType((typ,))
    inert = all(is_inert_type(m) for _, m in ctx.items())
    return inert, inert and is_ground(typ)


# ------------------------------------------------------------ JSON

def type_to_json(t):
    if isinstance(t, MultiType):
        return [type_to_json(a) for a in t.items]
    if isinstance(t, Ground):
        return {"atom": "X"}
    return {"arrow": {"left": type_to_json(t.left), "right": type_to_json(t.right)}}


def type_from_json(obj):
    if isinstance(obj, list):
        return MultiType(tuple(type_from_json(a) for a in obj))
    if isinstance(obj, dict) and obj.get("atom") == "X":
        return X
    if isinstance(obj, dict) and "arrow" in obj:
        a = obj["arrow"]
        left, right = type_from_json(a["left"]), type_from_json(a["right"])
        if not (isinstance(left, MultiType) and isinstance(right, MultiType)):
            raise ValueError("arrow sides must be multisets")
        return Arrow(left, right)
    raise ValueError(f"not a type: {obj!r}")


def derivation_to_json(d: Derivation) -> dict:
    return {
        "rule": d.rule,
        "judgment": {
            "ctx": {k: type_to_json(v) for k, v in d.ctx.items()},
            "term": pretty(d.subject),
            "type": type_to_json(d.type),
        },
        "premises": [derivation_to_json(p) for p in d.premises],
    }


def derivation_from_json(obj: dict) -> Derivation:
    """Read a derivation without checking it; see :func:`check_derivation`."""
    j = obj["judgment"]
    ctx = TypeContext({k: type_from_json(v) for k, v in j.get("ctx", {}).items()})
    premises = tuple(derivation_from_json(p) for p in obj.get("premises", ()))
    rule = _RULE_ALIASES.get(obj["rule"], obj["rule"])
    s = (0 if rule == "many" else 1) + sum(p.size for p in premises)
    m = (1 if rule in ("lam", "app") else 0) + sum(p.msize for p in premises)
    return Derivation(rule, premises, ctx, parse(j["term"]), type_from_json(j["type"]), s, m)
