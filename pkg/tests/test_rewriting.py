import pytest
from hypothesis import given, settings

from strategies import terms
from vsc.rewriting import (
    STRATEGIES, Axiom, Closure, NotARedex, Status, Step, StepKind, Strategy, apply_axiom,
    betav_reduce, equiv_class, equiv_steps, fire, glue_step, peel, position_mode, redexes,
    reduce, root_kind, sigma_embed_check, simulate_betav_step, step, step_at, struct_equiv, wrap,
)
from vsc.syntax import ES, Abs, Var, alpha_eq, count_es, parse, pretty, size

P = parse
I = r"(\z.z)"


def kinds(trace):
    return [s.kind.value for s in trace.steps]


def test_delta_on_identity_open():
    tr = reduce(P(rf"(\x.x x) {I}"), STRATEGIES["o"])
    assert tr.status is Status.NORMAL_FORM
    assert kinds(tr) == ["m", "e_lambda", "m", "e_lambda"]
    assert alpha_eq(tr.final, P(r"\a.a"))
    assert tr.counts["m"] == 2 and tr.counts["e_lambda"] == 2 and tr.counts["e_var"] == 0


def test_omega_cycles():
    tr = reduce(P(r"(\x.x x) (\x.x x)"), STRATEGIES["o"])
    assert tr.status is Status.CYCLE
    assert tr.cycle_start == 0
    assert len(tr.steps) == 2


def test_fuel_exhaustion():
    tr = reduce(P(r"(\x.x x) (\x.x x)"), STRATEGIES["o"], fuel=1)
    assert tr.status is Status.FUEL_EXHAUSTED
    tr = reduce(P(r"(\x.x x) (\x.x x)"), STRATEGIES["o"], fuel=50, detect_cycles=False)
    assert tr.status is Status.FUEL_EXHAUSTED and len(tr.steps) == 50
    with pytest.raises(ValueError):
        reduce(P("x"), STRATEGIES["o"], fuel=-1)


def test_open_does_not_enter_abstractions():
    t = P(rf"\x.{I} {I}")
    assert reduce(t, STRATEGIES["o"]).steps == []
    tr = reduce(t, STRATEGIES["s"])
    assert kinds(tr) == ["m", "e_lambda"] and tr.steps[0].path == (0,)


def test_solving_arguments_are_open():
    t = P(rf"\x.y (\w.{I} {I})")
    assert reduce(t, STRATEGIES["s"]).steps == []
    assert kinds(reduce(t, STRATEGIES["vsc"])) == ["m", "e_lambda"]


def test_variable_substitution_switch():
    t = P("x[x<-y] x")
    assert kinds(reduce(t, STRATEGIES["o"])) == ["e_var"]
    assert reduce(t, STRATEGIES["olam"]).steps == []


def test_m_at_a_distance():
    t = P(r"(\x.x)[y<-z] w")
    assert root_kind(t) is StepKind.M
    renamed, reduct = fire(t, StepKind.M)
    assert alpha_eq(reduct, P("x[x<-w][y<-z]"))


def test_m_renames_clashing_substitution_binder():
    # the argument mentions y, so the layer [y<-z] must be renamed before moving outside it
    t = P(r"(\x.x y)[y<-z] y")
    _, reduct = fire(t, StepKind.M)
    assert isinstance(reduct, ES) and reduct.binder != "y"
    assert alpha_eq(reduct, P("(x y1)[x<-y][y1<-z]"))


def test_e_at_a_distance():
    t = P(r"(x x)[x<-(\w.w)[q<-y y]]")
    assert root_kind(t) is StepKind.E_LAMBDA
    _, reduct = fire(t, StepKind.E_LAMBDA)
    assert alpha_eq(reduct, P(r"((\w.w) (\w.w))[q<-y y]"))


def test_not_a_redex():
    with pytest.raises(NotARedex):
        fire(P("x y"), StepKind.M)
    with pytest.raises(NotARedex):
        fire(P("x[x<-y y]"), StepKind.E_LAMBDA)


def test_peel_wrap():
    t = P(r"(\x.x)[a<-b][c<-d]")
    core, layers = peel(t)
    assert core == P(r"\x.x") and len(layers) == 2
    assert wrap(core, layers) == t


def test_glue():
    t = P("(x z)[z<-y y]")
    assert root_kind(t) is None
    assert root_kind(t, glue=True) is StepKind.GLUE
    assert glue_step(t) == P("x (y y)")
    # two occurrences, or an occurrence under an abstraction, do not glue
    assert glue_step(P("(z z)[z<-y y]")) is None
    assert glue_step(P(r"(\w.z)[z<-y y]")) is None
    assert glue_step(P("z[z<-y]")) is None


def test_position_mode():
    t = P(r"\x.y (x x)")
    assert position_mode(t, ()) == "O"
    assert position_mode(t, (0, 0)) == "S"
    assert position_mode(t, (0, 1)) == "S"
    assert position_mode(P(r"y \x.x"), (1, 0)) == "F"
    assert position_mode(P(r"y x"), (1,)) == "O"


def test_step_returns_leftmost_outermost():
    t = P(rf"({I} {I}) ({I} {I})")
    s = step(t, STRATEGIES["o"])
    assert s.path == (0,) and s.kind is StepKind.M
    assert step(P("x"), STRATEGIES["o"]) is None
    assert [p for p, _ in redexes(t, STRATEGIES["o"])] == [(0,), (1,)]


def test_trace_json():
    j = reduce(P(rf"{I} y"), STRATEGIES["o"]).to_json()
    assert j["status"] == "NormalForm"
    assert [s["kind"] for s in j["steps"]] == ["m", "e_var"]
    assert j["counts"]["m"] == 1


# ---------------------------------------------------------------- Plotkin

def test_betav():
    tr = betav_reduce(P(rf"(\x.x x) {I}"))
    assert kinds(tr) == ["beta_v", "beta_v"]
    assert alpha_eq(tr.final, P(r"\z.z"))
    with pytest.raises(ValueError):
        betav_reduce(P("x[x<-y]"))
    with pytest.raises(ValueError):
        betav_reduce(P("x"), Closure.SOLVING)
    assert betav_reduce(P(rf"\w.{I} {I}")).steps == []
    assert len(betav_reduce(P(rf"\w.{I} {I}"), Closure.FULL).steps) == 1


def test_betav_simulation():
    t = P(r"(\x.x x) y")
    mid = simulate_betav_step(t, P("y y"))
    assert alpha_eq(mid, P("(x x)[x<-y]"))
    with pytest.raises(NotARedex):
        simulate_betav_step(t, P("y"))


# ---------------------------------------------------------------- structural equivalence

def test_axioms():
    a = P("(x[x<-y]) w")
    b = apply_axiom(a, Axiom.APP_LEFT)
    assert b == P("(x w)[x<-y]")
    assert apply_axiom(b, Axiom.APP_LEFT_INV) == a
    assert apply_axiom(P("(x[x<-y]) x"), Axiom.APP_LEFT) is None
    c = P("w x[x<-y]")
    assert apply_axiom(c, Axiom.APP_RIGHT) == P("(w x)[x<-y]")
    assert apply_axiom(P("z[x<-z][z<-y]"), Axiom.SUB) is None
    e = P("x[z<-w][x<-y]")
    assert apply_axiom(e, Axiom.COM) == P("x[x<-y][z<-w]")
    f = P("x[x<-z[z<-y]]")
    assert apply_axiom(f, Axiom.SUB_INV) == P("x[x<-z][z<-y]")
    assert apply_axiom(P("x[x<-z][z<-y]"), Axiom.SUB) == f
    for ax in Axiom:
        assert ax.inverse.inverse is ax


@given(terms(max_leaves=6))
@settings(max_examples=60)
def test_axiom_steps_are_invertible(t):
    for s in equiv_steps(t):
        back = apply_axiom(s.term if s.path == () else _sub(s.term, s.path), s.kind.inverse)
        assert back is not None


def _sub(t, path):
    from vsc.syntax import subterm
    return subterm(t, path)


@given(terms(max_leaves=6))
@settings(max_examples=60)
def test_equiv_preserves_invariants(t):
    for s in equiv_steps(t):
        assert size(s.term) == size(t)
        assert count_es(s.term) == count_es(t)
        assert s.term.fv == t.fv


def test_struct_equiv():
    assert struct_equiv(P("(x w)[x<-y]"), P("x[x<-y] w"))
    assert struct_equiv(P("x[x<-y][z<-q]"), P("x[z<-q][x<-y]"))
    assert not struct_equiv(P("x[x<-y] w"), P("x w"))
    assert len(equiv_class(P("x y"))) == 1


def test_sigma_embeddings():
    assert sigma_embed_check(P(r"(\x.x) y w"), "sigma1")
    assert sigma_embed_check(P(r"w ((\x.q) (z y))"), "sigma3")
    assert sigma_embed_check(P(r"(\x.x x) (y y) (\z.z)"), "σ1")
    with pytest.raises(NotARedex):
        sigma_embed_check(P("x y"), "sigma1")
