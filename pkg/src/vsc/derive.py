"""Derivation transformers: splitting, merging, substitution, removal, subject
reduction and expansion, typing of normal forms, and inference by expansion.

Every function returns derivations built with the checked constructors of
:mod:`vsc.multitypes`, so a malformed intermediate step fails immediately.
Bound names are first moved out of the way with :func:`vsc.syntax.freshen`;
the result is then put back onto the caller's exact term by :func:`realign`.
"""

from __future__ import annotations

from typing import Optional

from .classify import is_fireball, is_inert, is_solved_fireball
from .multitypes import (
    EMPTY, X, Arrow, Derivation, MultiType, SubjectMismatch, app, ax, es, is_solvable,
    is_unitary_solvable, lam, many,
)
from .rewriting import (
    Axiom, Closure, NotARedex, Status, Step, StepKind, Strategy, fire, position_mode, reduce,
)
from .syntax import (
    ES, Abs, App, Var, alpha_eq, freshen, is_value, meta_subst, occurrences, pretty,
    replace, subterm,
)

__all__ = [
    "InvalidStep", "SizeLawViolation",
    "realign", "split_value", "split_many", "merge_value", "subst_lemma", "removal_lemma",
    "linear_subst", "subject_reduce", "subject_expand", "type_inert_any",
    "type_fireball_tight", "type_solved_fireball", "infer", "infer_with_trace",
]


class InvalidStep(ValueError):
    pass


class SizeLawViolation(AssertionError):
    pass


def realign(d: Derivation, target) -> Derivation:
    """Rename the bound variables of ``d`` so that it types ``target`` exactly."""
    if d.subject == target:
        return d
    if not alpha_eq(d.subject, target):
        raise SubjectMismatch(f"{pretty(d.subject)} is not alpha-equivalent to {pretty(target)}")
    return _realign(d, target)


def _realign(d, target):
    if d.subject == target:
        return d
    r = d.rule
    if r == "ax":
        return ax(target.name, d.type)
    if r == "lam":
        return lam(target.binder, _realign(d.premises[0], target.body))
    if r == "many":
        return many(target, [_realign(p, target) for p in d.premises])
    if r == "app":
        return app(_realign(d.premises[0], target.fun), _realign(d.premises[1], target.arg))
    return es(_realign(d.premises[0], target.body), target.binder,
              _realign(d.premises[1], target.defn))


def _plain_subst(t, x, v):
    """Replace free ``x`` by ``v`` with no renaming.  Callers freshen ``t`` first."""
    if x not in t.fv:
        return t
    if isinstance(t, Var):
        return v
    if isinstance(t, Abs):
        return Abs(t.binder, _plain_subst(t.body, x, v))
    if isinstance(t, App):
        return App(_plain_subst(t.fun, x, v), _plain_subst(t.arg, x, v))
    body = t.body if t.binder == x else _plain_subst(t.body, x, v)
    return ES(body, t.binder, _plain_subst(t.defn, x, v))


# ------------------------------------------------------------ split / merge

def split_value(d: Derivation, m1: MultiType, m2: MultiType) -> tuple:
    """Partition the premises of a ``many`` node according to ``m1 + m2``."""
    if not is_value(d.subject) or d.rule != "many":
        raise ValueError(f"cannot split a derivation of non-value {pretty(d.subject)}")
    if m1 + m2 != d.type:
        raise ValueError(f"{m1!r} + {m2!r} is not {d.type!r}")
    rest = list(d.premises)
    first = []
    for a in m1.items:
        for k, p in enumerate(rest):
            if p.type == a:
                first.append(rest.pop(k))
                break
    return many(d.subject, first), many(d.subject, rest)


def split_many(d: Derivation, parts: list) -> list:
    out = []
    for k, m in enumerate(parts):
        if k == len(parts) - 1:
            if d.type != m:
                raise ValueError(f"{d.type!r} is not {m!r}")
            out.append(d)
        else:
            left, d = split_value(d, m, d.type.minus(m) or EMPTY)
            out.append(left)
    if not parts:
        if d.type:
            raise ValueError("nothing to split into")
    return out


def merge_value(d1: Derivation, d2: Derivation) -> Derivation:
    if not is_value(d1.subject):
        raise ValueError(f"cannot merge derivations of non-value {pretty(d1.subject)}")
    d2 = realign(d2, d1.subject)
    return many(d1.subject, d1.premises + d2.premises)


# ------------------------------------------------------------ substitution

def subst_lemma(phi: Derivation, x: str, psi: Derivation) -> Derivation:
    """From ``G, x:N |- t : M`` and ``D |- v : N`` build ``G + D |- t{x<-v} : M``."""
    v = psi.subject
    if not is_value(v):
        raise ValueError(f"{pretty(v)} is not a value")
    if phi.is_linear:
        raise ValueError("substitution works on multi judgments")
    if phi.ctx(x) != psi.type:
        raise ValueError(f"{x} typed {phi.ctx(x)!r} but the value is typed {psi.type!r}")
    t = phi.subject
    tr = freshen(t, v.fv | {x})
    theta = _subst(realign(phi, tr), x, psi)
    return realign(theta, meta_subst(t, x, v))


def _subst(phi, x, psi):
    s = phi.subject
    if x not in s.fv:
        return phi
    if isinstance(s, Var):
        return psi
    if isinstance(s, Abs):
        lams = phi.premises
        parts = split_many(psi, [p.ctx(x) for p in lams])
        new = [lam(s.binder, _subst(p.premises[0], x, q)) for p, q in zip(lams, parts)]
        return many(_plain_subst(s, x, psi.subject), new)
    p0, p1 = phi.premises
    q0, q1 = split_value(psi, p0.ctx(x), p1.ctx(x))
    if isinstance(s, App):
        return app(_subst(p0, x, q0), _subst(p1, x, q1))
    return es(_subst(p0, x, q0), s.binder, _subst(p1, x, q1))


def removal_lemma(phi: Derivation, t, x: str, v) -> tuple:
    """Split a derivation of ``t{x<-v}`` into one of ``t`` (with ``x`` typed ``N``) and one of ``v : N``."""
    if not is_value(v):
        raise ValueError(f"{pretty(v)} is not a value")
    if not alpha_eq(phi.subject, meta_subst(t, x, v)):
        raise ValueError(f"{pretty(phi.subject)} is not {pretty(t)}{{{x}<-{pretty(v)}}}")
    tr = freshen(t, v.fv | {x})
    psi, theta = _remove(realign(phi, _plain_subst(tr, x, v)), tr, x, v)
    return realign(psi, t), theta


def _remove(phi, t, x, v):
    if x not in t.fv:
        return phi, many(v, ())
    if isinstance(t, Var):
        return many(t, [ax(x, a) for a in phi.type.items]), phi
    if isinstance(t, Abs):
        lams, thetas = [], []
        for p in phi.premises:
            psi_i, theta_i = _remove(p.premises[0], t.body, x, v)
            lams.append(lam(t.binder, psi_i))
            thetas.extend(theta_i.premises)
        return many(t, lams), many(v, thetas)
    p0, p1 = phi.premises
    if isinstance(t, App):
        a0, b0 = _remove(p0, t.fun, x, v)
        a1, b1 = _remove(p1, t.arg, x, v)
        return app(a0, a1), merge_value(b0, b1)
    a0, b0 = _remove(p0, t.body, x, v)
    a1, b1 = _remove(p1, t.defn, x, v)
    return es(a0, t.binder, a1), merge_value(b0, b1)


# ------------------------------------------------------------ linear substitution

def _linear_path(redex) -> tuple:
    if not isinstance(redex, ES):
        raise ValueError(f"{pretty(redex)} is not an explicit substitution")
    occ = occurrences(redex.body, redex.binder)
    if len(occ) != 1:
        raise ValueError(f"{redex.binder} occurs {len(occ)} times, expected exactly once")
    node = redex.body
    for i in occ[0]:
        if isinstance(node, Abs):
            raise ValueError(f"{redex.binder} occurs under an abstraction")
        node = subterm(node, (i,))
    return occ[0]


def linear_subst(phi: Derivation, direction: str = "forward", redex=None) -> Derivation:
    """Move a derivation between ``O<x>[x<-t]`` and ``O<t>``.

    ``forward`` takes a derivation of the substitution.  ``backward`` takes a
    derivation of ``O<t>`` and needs the original ``redex`` to know ``O`` and ``x``.
    """
    if direction == "forward":
        redex = phi.subject
    elif redex is None:
        raise ValueError("backward linear substitution needs the redex")
    path = _linear_path(redex)
    x, t = redex.binder, redex.defn
    renamed = ES(freshen(redex.body, t.fv), x, t)
    path = _linear_path(renamed)
    target = replace(renamed.body, path, t)
    if direction == "forward":
        d = realign(phi, renamed)
        body, dt = d.premises

        def graft(node):
            if node.type != dt.type:
                raise ValueError("occurrence typed differently from the definition")
            return dt

        return _at_path(body, path, graft, t)
    if direction != "backward":
        raise ValueError(f"unknown direction {direction!r}")
    if not alpha_eq(phi.subject, target):
        raise ValueError(f"{pretty(phi.subject)} is not {pretty(target)}")
    d = realign(phi, target)
    holder = []

    def cut(node):
        holder.append(node)
        return many(Var(x), [ax(x, a) for a in node.type.items])

    body = _at_path(d, path, cut, Var(x))
    return realign(es(body, x, holder[0]), redex)


# ------------------------------------------------------------ subject reduction / expansion

def _at_path(d, path, fn, new_sub):
    """Apply ``fn`` to the sub-derivation at ``path`` and rebuild the ancestors.

    Under an abstraction every premise of the ``many`` node is transformed;
    ``new_sub`` is the subterm that replaces the old one at ``path``.
    """
    if not path:
        out = fn(d)
        return out if out.subject == new_sub else realign(out, new_sub)
    s = d.subject
    i, rest = path[0], path[1:]
    if isinstance(s, Abs):
        lams = [lam(s.binder, _at_path(p.premises[0], rest, fn, new_sub)) for p in d.premises]
        return many(replace(s, path, new_sub), lams)
    p0, p1 = d.premises
    if i == 0:
        p0 = _at_path(p0, rest, fn, new_sub)
    else:
        p1 = _at_path(p1, rest, fn, new_sub)
    if isinstance(s, App):
        return app(p0, p1)
    return es(p0, s.binder, p1)


def _axiom(d, a: Axiom):
    s = d.subject
    if a is Axiom.APP_LEFT:
        (dt, du), dr = d.premises[0].premises, d.premises[1]
        return es(app(dt, dr), s.fun.binder, du)
    if a is Axiom.APP_LEFT_INV:
        (dt, dr), du = d.premises[0].premises, d.premises[1]
        return app(es(dt, s.binder, du), dr)
    if a is Axiom.APP_RIGHT:
        dr, (dt, du) = d.premises[0], d.premises[1].premises
        return es(app(dr, dt), s.arg.binder, du)
    if a is Axiom.APP_RIGHT_INV:
        (dr, dt), du = d.premises[0].premises, d.premises[1]
        return app(dr, es(dt, s.binder, du))
    if a is Axiom.SUB:
        (dt, du), dw = d.premises[0].premises, d.premises[1]
        return es(dt, s.body.binder, es(du, s.binder, dw))
    if a is Axiom.SUB_INV:
        dt, (du, dw) = d.premises[0], d.premises[1].premises
        return es(es(dt, s.binder, du), s.defn.binder, dw)
    (dt, ds), du = d.premises[0].premises, d.premises[1]
    return es(es(dt, s.binder, du), s.body.binder, ds)


def _m_reduce(df, da):
    s = df.subject
    if isinstance(s, ES):
        p0, p1 = df.premises
        return es(_m_reduce(p0, da), s.binder, p1)
    (lam_node,) = df.premises
    return es(lam_node.premises[0], s.binder, da)


def _e_reduce(dt, x, dd):
    s = dd.subject
    if isinstance(s, ES):
        p0, p1 = dd.premises
        return es(_e_reduce(dt, x, p0), s.binder, p1)
    return subst_lemma(dt, x, dd)


def _root_reduce(d, kind):
    if isinstance(kind, Axiom):
        return _axiom(d, kind)
    if kind is StepKind.M:
        return _m_reduce(*d.premises)
    if kind in (StepKind.E_LAMBDA, StepKind.E_VAR):
        return _e_reduce(d.premises[0], d.subject.binder, d.premises[1])
    if kind is StepKind.GLUE:
        return linear_subst(d, "forward")
    raise InvalidStep(f"{kind} steps are not handled by the type system")


def _m_expand(d, fun):
    if isinstance(fun, ES):
        p0, p1 = d.premises
        dfun, darg = _m_expand(p0, fun.body)
        return es(dfun, fun.binder, p1), darg
    body, darg = d.premises
    return many(fun, [lam(fun.binder, body)]), darg


def _e_expand(d, t, x, defn):
    if isinstance(defn, ES):
        p0, p1 = d.premises
        dt, dinner = _e_expand(p0, t, x, defn.body)
        return dt, es(dinner, defn.binder, p1)
    return removal_lemma(d, t, x, defn)


def _root_expand(d, kind, redex):
    if isinstance(kind, Axiom):
        return _axiom(d, kind.inverse)
    if kind is StepKind.M:
        return app(*_m_expand(d, redex.fun))
    if kind in (StepKind.E_LAMBDA, StepKind.E_VAR):
        dt, dd = _e_expand(d, redex.body, redex.binder, redex.defn)
        return es(dt, redex.binder, dd)
    if kind is StepKind.GLUE:
        return linear_subst(d, "backward", redex)
    raise InvalidStep(f"{kind} steps are not handled by the type system")


def _locate(t, step: Step):
    path = tuple(step.path)
    if step.kind is StepKind.BETA_V:
        raise InvalidStep("beta_v steps must first be decomposed into m and e steps")
    try:
        sub = subterm(t, path)
        renamed, reduct = fire(sub, step.kind)
    except (IndexError, NotARedex) as e:
        raise InvalidStep(str(e)) from None
    mine = replace(t, path, reduct)
    if not alpha_eq(mine, step.term):
        raise InvalidStep(f"{pretty(t)} does not step to {pretty(step.term)} at {list(path)}")
    return path, renamed, reduct, mine


def size_law(before: Derivation, after: Derivation, source, step: Step) -> Optional[str]:
    """The violated size law for a reduction step, or ``None``.

    Open steps obey the exact open laws.  Solving steps obey the solving laws
    when the final type is solvable.  Other steps carry no size law.
    """
    kind = step.kind
    if kind not in (StepKind.M, StepKind.E_LAMBDA, StepKind.E_VAR):
        return None
    mode = position_mode(source, tuple(step.path))
    dm = after.msize - before.msize
    ds = after.size - before.size
    if mode == "O" or (mode == "S" and is_unitary_solvable(before.type)):
        if kind is StepKind.M and (dm, ds) != (-2, -1):
            return f"m step changed sizes by ({dm}, {ds}), expected (-2, -1)"
    elif mode == "S" and is_solvable(before.type):
        if kind is StepKind.M and not (dm <= -2 and ds < 0):
            return f"m step changed sizes by ({dm}, {ds}), expected at most (-2, -1)"
    else:
        return None
    if kind is not StepKind.M and not (dm == 0 and ds < 0):
        return f"e step changed sizes by ({dm}, {ds}), expected (0, < 0)"
    return None


def subject_reduce(phi: Derivation, step: Step, check_sizes: bool = True) -> Derivation:
    """Push ``phi`` along one step (or one structural axiom) of its subject."""
    if phi.is_linear:
        raise ValueError("subject reduction works on multi judgments")
    t = phi.subject
    path, renamed, reduct, _ = _locate(t, step)
    kind = step.kind
    out = _at_path(phi, path, lambda d: _root_reduce(realign(d, renamed), kind), reduct)
    out = realign(out, step.term)
    if out.ctx != phi.ctx or out.type != phi.type:
        raise AssertionError("judgment changed under subject reduction")
    if check_sizes:
        problem = size_law(phi, out, t, step)
        if problem:
            raise SizeLawViolation(problem)
    return out


def subject_expand(phi: Derivation, source, step: Step) -> Derivation:
    """Pull ``phi``, a derivation of ``step.term``, back to ``source``."""
    if phi.is_linear:
        raise ValueError("subject expansion works on multi judgments")
    if not alpha_eq(phi.subject, step.term):
        raise InvalidStep(f"derivation types {pretty(phi.subject)}, not {pretty(step.term)}")
    path, renamed, reduct, mine = _locate(source, step)
    d = realign(phi, mine)
    kind = step.kind
    out = _at_path(d, path, lambda n: _root_expand(n, kind, renamed), renamed)
    out = realign(out, source)
    if out.ctx != phi.ctx or out.type != phi.type:
        raise AssertionError("judgment changed under subject expansion")
    return out


# ------------------------------------------------------------ normal forms

def type_inert_any(i, m: MultiType) -> Derivation:
    """Type an inert term with any multi type; arguments get ``0``."""
    if not is_inert(i):
        raise ValueError(f"{pretty(i)} is not inert")
    return _inert(i, m)


def _inert(i, m):
    if isinstance(i, Var):
        return many(i, [ax(i.name, a) for a in m.items])
    if isinstance(i, App):
        df = _inert(i.fun, MultiType((Arrow(EMPTY, m),)))
        return app(df, _tight(i.arg))
    db = _inert(i.body, m)
    return es(db, i.binder, _inert(i.defn, db.ctx(i.binder)))


def type_fireball_tight(f) -> Derivation:
    """A tight derivation ``G |- f : 0`` of a fireball."""
    if not is_fireball(f):
        raise ValueError(f"{pretty(f)} is not a fireball")
    return _tight(f)


def _tight(f):
    if is_value(f):
        return many(f, ())
    if is_inert(f):
        return _inert(f, EMPTY)
    db = _tight(f.body)
    return es(db, f.binder, _inert(f.defn, db.ctx(f.binder)))


def type_solved_fireball(fs) -> Derivation:
    """Inert context and precisely solvable type for a solved fireball; inert cores get ``[X]``."""
    if not is_solved_fireball(fs):
        raise ValueError(f"{pretty(fs)} is not a solved fireball")
    return _solved(fs)


def _solved(fs):
    if is_inert(fs):
        return _inert(fs, MultiType((X,)))
    if isinstance(fs, Abs):
        return many(fs, [lam(fs.binder, _solved(fs.body))])
    db = _solved(fs.body)
    return es(db, fs.binder, _inert(fs.defn, db.ctx(fs.binder)))


def infer_with_trace(t, mode: str = "open", fuel: int = 10000) -> tuple:
    closure = Closure(mode.lower())
    if closure is Closure.FULL:
        raise ValueError("inference is available for the open and solving reductions")
    trace = reduce(t, Strategy(closure, True), fuel, True)
    if trace.status is not Status.NORMAL_FORM:
        return None, trace
    nf = trace.final
    d = type_fireball_tight(nf) if closure is Closure.OPEN else type_solved_fireball(nf)
    terms = trace.terms()
    for k in range(len(trace.steps) - 1, -1, -1):
        d = subject_expand(d, terms[k], trace.steps[k])
    return d, trace


def infer(t, mode: str = "open", fuel: int = 10000) -> Optional[Derivation]:
    """Type ``t`` by normalizing it and expanding a typing of the normal form.

    ``None`` when the reduction cycles or runs out of fuel.
    """
    return infer_with_trace(t, mode, fuel)[0]
