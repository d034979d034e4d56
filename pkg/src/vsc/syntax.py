"""Terms with explicit substitutions, contexts, and the textual format.

Binders are named.  Comparison up to renaming of bound variables goes through
:func:`alpha_canon`, which replaces every bound occurrence by its distance to
the binder.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NewType, Union

__all__ = [
    "Var", "Abs", "App", "ES", "Hole", "Term", "CanonicalTerm",
    "ContextKind", "Context", "ParseError",
    "parse", "pretty", "free_vars", "is_value", "meta_subst", "alpha_canon",
    "alpha_eq", "fresh", "plug", "es_expand", "measure", "size",
    "subterm", "replace", "positions", "freshen", "rename_free",
    "has_es", "count_es", "occurrences",
]


@dataclass(frozen=True, slots=True)
class Var:
    name: str
    fv: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", frozenset((self.name,)))

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True, slots=True)
class Abs:
    binder: str
    body: "Term"
    fv: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", self.body.fv - {self.binder})

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True, slots=True)
class App:
    fun: "Term"
    arg: "Term"
    fv: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", self.fun.fv | self.arg.fv)

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True, slots=True)
class ES:
    """``body[binder <- defn]``: a delayed substitution binding ``binder`` in ``body``."""

    body: "Term"
    binder: str
    defn: "Term"
    fv: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", (self.body.fv - {self.binder}) | self.defn.fv)

    def __str__(self):
        return pretty(self)


@dataclass(frozen=True, slots=True)
class Hole:
    """The hole of a context.  Only ever appears inside :class:`Context`."""

    fv: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "fv", frozenset())

    def __str__(self):
        return "<.>"


Term = Union[Var, Abs, App, ES]
CanonicalTerm = NewType("CanonicalTerm", str)


def is_value(t) -> bool:
    return isinstance(t, (Var, Abs))


def free_vars(t) -> frozenset:
    return t.fv


# ---------------------------------------------------------------- parsing

class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f"{msg} at position {pos}")
        self.pos = pos


_TOKEN = re.compile(r"\s*(?:(?P<name>[a-zA-Z][a-zA-Z0-9']*)|(?P<arrow><-|←)|(?P<sym>[\\λ.()\[\]]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos >= n:
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        if m.group("name"):
            toks.append(("name", m.group("name"), start))
        elif m.group("arrow"):
            toks.append(("<-", "<-", start))
        else:
            sym = m.group("sym")
            toks.append(("\\" if sym == "λ" else sym, sym, start))
        pos = m.end()
    toks.append(("eof", "", n))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self) -> str:
        return self.toks[self.i][0]

    def take(self, kind: str) -> str:
        k, v, pos = self.toks[self.i]
        if k != kind:
            shown = v or "end of input"
            raise ParseError(f"expected {kind!r} but found {shown!r}", pos)
        self.i += 1
        return v

    def term(self):
        if self.peek() == "\\":
            return self.lam()
        t = self.postfix()
        while self.peek() in ("name", "(", "\\"):
            if self.peek() == "\\":
                return App(t, self.lam())
            t = App(t, self.postfix())
        return t

    def lam(self):
        self.take("\\")
        x = self.take("name")
        self.take(".")
        return Abs(x, self.term())

    def postfix(self):
        t = self.atom()
        while self.peek() == "[":
            self.take("[")
            x = self.take("name")
            self.take("<-")
            u = self.term()
            self.take("]")
            t = ES(t, x, u)
        return t

    def atom(self):
        if self.peek() == "name":
            return Var(self.take("name"))
        if self.peek() == "(":
            self.take("(")
            t = self.term()
            self.take(")")
            return t
        k, v, pos = self.toks[self.i]
        raise ParseError(f"unexpected {v or 'end of input'!r}", pos)


def parse(text: str) -> Term:
    """Parse the concrete syntax.  ``\\`` and ``λ`` both introduce abstractions."""
    p = _Parser(text)
    t = p.term()
    p.take("eof")
    return t


def pretty(t) -> str:
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Hole):
        return "<.>"
    if isinstance(t, Abs):
        return f"\\{t.binder}.{pretty(t.body)}"
    if isinstance(t, App):
        f = pretty(t.fun)
        if isinstance(t.fun, Abs):
            f = f"({f})"
        a = pretty(t.arg)
        if isinstance(t.arg, (App, Abs)):
            a = f"({a})"
        return f"{f} {a}"
    b = pretty(t.body)
    if isinstance(t.body, (App, Abs)):
        b = f"({b})"
    return f"{b}[{t.binder}<-{pretty(t.defn)}]"


# ------------------------------------------------------- names and binding

_TRAIL = re.compile(r"[0-9']+$")


def fresh(base: str, avoid: Iterable[str]) -> str:
    """First name ``base1, base2, ...`` outside ``avoid``.  Deterministic."""
    avoid = set(avoid)
    stem = _TRAIL.sub("", base) or "x"
    k = 1
    while f"{stem}{k}" in avoid:
        k += 1
    return f"{stem}{k}"


def meta_subst(t, x: str, u) -> Term:
    """Capture-avoiding ``t{x<-u}``; binders in ``t`` are renamed when needed."""
    if x not in t.fv:
        return t
    if isinstance(t, Var):
        return u
    if isinstance(t, App):
        return App(meta_subst(t.fun, x, u), meta_subst(t.arg, x, u))
    if isinstance(t, Abs):
        y, body = t.binder, t.body
        if y in u.fv:
            z = fresh(y, u.fv | body.fv | {x})
            body, y = meta_subst(body, y, Var(z)), z
        return Abs(y, meta_subst(body, x, u))
    y, body = t.binder, t.body
    if y != x and y in u.fv:
        z = fresh(y, u.fv | body.fv | {x})
        body, y = meta_subst(body, y, Var(z)), z
    if y == x:
        return ES(body, y, meta_subst(t.defn, x, u))
    return ES(meta_subst(body, x, u), y, meta_subst(t.defn, x, u))


def rename_free(t, x: str, y: str) -> Term:
    return meta_subst(t, x, Var(y))


def freshen(t, avoid: Iterable[str]) -> Term:
    """An alpha-variant of ``t`` none of whose binders is in ``avoid``."""
    avoid = frozenset(avoid)

    def go(t):
        if isinstance(t, Var):
            return t
        if isinstance(t, App):
            return App(go(t.fun), go(t.arg))
        if isinstance(t, Abs):
            y, body = t.binder, t.body
            if y in avoid:
                y = fresh(y, avoid | body.fv)
                body = rename_free(body, t.binder, y)
            return Abs(y, go(body))
        y, body = t.binder, t.body
        if y in avoid:
            y = fresh(y, avoid | body.fv)
            body = rename_free(body, t.binder, y)
        return ES(go(body), y, go(t.defn))

    return go(t)


def alpha_canon(t) -> CanonicalTerm:
    """A string equal for two terms exactly when they are alpha-equivalent."""
    out: list[str] = []

    def go(t, env: tuple):
        if isinstance(t, Var):
            for k in range(len(env) - 1, -1, -1):
                if env[k] == t.name:
                    out.append(f"#{len(env) - 1 - k}")
                    return
            out.append(t.name)
        elif isinstance(t, Abs):
            out.append("\\(")
            go(t.body, env + (t.binder,))
            out.append(")")
        elif isinstance(t, App):
            out.append("@(")
            go(t.fun, env)
            out.append(",")
            go(t.arg, env)
            out.append(")")
        elif isinstance(t, ES):
            out.append("[(")
            go(t.body, env + (t.binder,))
            out.append(",")
            go(t.defn, env)
            out.append(")")
        else:
            out.append("<.>")

    go(t, ())
    return CanonicalTerm("".join(out))


def alpha_eq(t, u) -> bool:
    return t == u or alpha_canon(t) == alpha_canon(u)


# ---------------------------------------------------------- paths

def subterm(t, path) -> Term:
    for i in path:
        if isinstance(t, Abs) and i == 0:
            t = t.body
        elif isinstance(t, App) and i in (0, 1):
            t = t.fun if i == 0 else t.arg
        elif isinstance(t, ES) and i in (0, 1):
            t = t.body if i == 0 else t.defn
        else:
            raise IndexError(f"bad path {list(path)}")
    return t


def replace(t, path, new) -> Term:
    """Graft ``new`` at ``path``.  No renaming: free variables of ``new`` may be captured."""
    if not path:
        return new
    i, rest = path[0], path[1:]
    if isinstance(t, Abs) and i == 0:
        return Abs(t.binder, replace(t.body, rest, new))
    if isinstance(t, App) and i == 0:
        return App(replace(t.fun, rest, new), t.arg)
    if isinstance(t, App) and i == 1:
        return App(t.fun, replace(t.arg, rest, new))
    if isinstance(t, ES) and i == 0:
        return ES(replace(t.body, rest, new), t.binder, t.defn)
    if isinstance(t, ES) and i == 1:
        return ES(t.body, t.binder, replace(t.defn, rest, new))
    raise IndexError(f"bad path {list(path)}")


def positions(t, prefix: tuple = ()) -> Iterator[tuple]:
    """All paths in pre-order (root, then children left to right)."""
    yield prefix
    if isinstance(t, Abs):
        yield from positions(t.body, prefix + (0,))
    elif isinstance(t, App):
        yield from positions(t.fun, prefix + (0,))
        yield from positions(t.arg, prefix + (1,))
    elif isinstance(t, ES):
        yield from positions(t.body, prefix + (0,))
        yield from positions(t.defn, prefix + (1,))


def occurrences(t, x: str, prefix: tuple = ()) -> list[tuple]:
    """Paths of the free occurrences of ``x`` in ``t``."""
    if x not in t.fv:
        return []
    if isinstance(t, Var):
        return [prefix]
    if isinstance(t, Abs):
        return occurrences(t.body, x, prefix + (0,))
    if isinstance(t, App):
        return occurrences(t.fun, x, prefix + (0,)) + occurrences(t.arg, x, prefix + (1,))
    out = [] if t.binder == x else occurrences(t.body, x, prefix + (0,))
    return out + occurrences(t.defn, x, prefix + (1,))


# ---------------------------------------------------------- contexts

class ContextKind(enum.Enum):
    SUB = "L"
    OPEN = "O"
    FULL = "F"
    SOLVING = "S"
    HEAD = "H"
    TESTING = "T"


def _hole_path(t, prefix=()):
    if isinstance(t, Hole):
        return [prefix]
    if isinstance(t, Var):
        return []
    if isinstance(t, Abs):
        return _hole_path(t.body, prefix + (0,))
    if isinstance(t, App):
        return _hole_path(t.fun, prefix + (0,)) + _hole_path(t.arg, prefix + (1,))
    return _hole_path(t.body, prefix + (0,)) + _hole_path(t.defn, prefix + (1,))


def _fits(tree, kind: ContextKind) -> bool:
    if isinstance(tree, Hole):
        return True
    if kind is ContextKind.SUB:
        return isinstance(tree, ES) and not _hole_path(tree.defn) and _fits(tree.body, kind)
    if kind is ContextKind.FULL:
        return True
    if kind is ContextKind.OPEN:
        return not isinstance(tree, Abs) and all(
            _fits(c, kind) for c in _children(tree) if _hole_path(c))
    if kind is ContextKind.SOLVING:
        if _fits(tree, ContextKind.OPEN):
            return True
        if isinstance(tree, Abs):
            return _fits(tree.body, kind)
        if isinstance(tree, App):
            return bool(_hole_path(tree.fun)) and _fits(tree.fun, kind)
        if isinstance(tree, ES):
            return bool(_hole_path(tree.body)) and _fits(tree.body, kind)
        return False
    if kind is ContextKind.HEAD:
        if isinstance(tree, Abs):
            return _fits(tree.body, kind)
        if isinstance(tree, App):
            return bool(_hole_path(tree.fun)) and _fits(tree.fun, kind)
        return False
    # testing
    if isinstance(tree, App):
        if _hole_path(tree.fun):
            if isinstance(tree.fun, Abs):
                return _fits(tree.fun.body, kind)
            return _fits(tree.fun, kind)
    return False


def _children(t):
    if isinstance(t, Abs):
        return (t.body,)
    if isinstance(t, (App,)):
        return (t.fun, t.arg)
    if isinstance(t, ES):
        return (t.body, t.defn)
    return ()


@dataclass(frozen=True)
class Context:
    """A term-shaped tree with exactly one :class:`Hole`, tagged by grammar."""

    tree: object
    kind: ContextKind = ContextKind.FULL

    def __post_init__(self):
        holes = _hole_path(self.tree)
        if len(holes) != 1:
            raise ValueError(f"context needs exactly one hole, found {len(holes)}")
        if not _fits(self.tree, self.kind):
            raise ValueError(f"{pretty(self.tree)} is not a {self.kind.name.lower()} context")

    @property
    def path(self) -> tuple:
        return _hole_path(self.tree)[0]

    def __str__(self):
        return pretty(self.tree)


def plug(c: Context, t) -> Term:
    """Literal grafting at the hole.  Capture is allowed."""
    tree = c.tree if isinstance(c, Context) else c
    return replace(tree, _hole_path(tree)[0], t)


# ---------------------------------------------------------- measures

def es_expand(t) -> Term:
    """Turn every ``u[x<-s]`` into ``(\\x.u) s``, recursively."""
    if isinstance(t, Var):
        return t
    if isinstance(t, Abs):
        return Abs(t.binder, es_expand(t.body))
    if isinstance(t, App):
        return App(es_expand(t.fun), es_expand(t.arg))
    return App(Abs(t.binder, es_expand(t.body)), es_expand(t.defn))


def _open_size(t) -> int:
    if isinstance(t, (Var, Abs)):
        return 0
    if isinstance(t, App):
        return _open_size(t.fun) + _open_size(t.arg) + 1
    return _open_size(t.body) + _open_size(t.defn)


def _solvable_size(t) -> int:
    if isinstance(t, Var):
        return 0
    if isinstance(t, Abs):
        return _solvable_size(t.body) + 1
    if isinstance(t, App):
        return _solvable_size(t.fun) + _open_size(t.arg) + 1
    return _solvable_size(t.body) + _open_size(t.defn)


def measure(t) -> tuple[int, int]:
    """``(open size, solvable size)``."""
    return _open_size(t), _solvable_size(t)


def size(t) -> int:
    """Number of constructor nodes."""
    if isinstance(t, Var):
        return 1
    return 1 + sum(size(c) for c in _children(t))


def has_es(t) -> bool:
    return count_es(t) > 0


def count_es(t) -> int:
    n = 1 if isinstance(t, ES) else 0
    return n + sum(count_es(c) for c in _children(t))
