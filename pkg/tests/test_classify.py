import pytest
from hypothesis import given

from strategies import terms
from vsc.classify import (
    classify, is_fireball, is_full_fireball, is_full_inert, is_inert, is_solved_fireball,
)
from vsc.rewriting import STRATEGIES, redexes
from vsc.syntax import parse

P = parse


@pytest.mark.parametrize("text, inert, fireball, solved", [
    ("x", True, True, True),
    (r"\x.x", False, True, True),
    ("x y", True, True, True),
    (r"x (\y.y)", True, True, True),
    ("x (y z)", True, True, True),
    (r"(\x.x) y", False, False, False),
    (r"x[x<-y y]", True, True, True),
    (r"(\x.x)[x<-y y]", False, True, True),
    (r"x[x<-\y.y]", False, False, False),
    (r"\x.y z", False, True, True),
    (r"\x.(\y.y) z", False, True, False),
    (r"x ((\y.y) z)", False, False, False),
    (r"\x.\y.x[z<-y w]", False, True, True),
])
def test_open_and_solving_grammars(text, inert, fireball, solved):
    t = P(text)
    assert is_inert(t) == inert
    assert is_fireball(t) == fireball
    assert is_solved_fireball(t) == solved


def test_full_grammars():
    assert is_full_fireball(P(r"\x.x (\y.y)"))
    assert not is_full_fireball(P(r"\x.(\y.y) x"))
    assert not is_full_fireball(P(r"y (\x.(\y.y) x)"))
    assert is_full_inert(P(r"y (\x.x)"))
    assert not is_full_inert(P(r"\x.x"))


def test_variable_is_value_and_inert():
    c = classify(P("x")).as_dict()
    assert c["value"] and c["inert"] and c["fireball"]


@given(terms())
def test_flags_match_normality(t):
    # flags coincide with the absence of redexes when variables are not substituted
    c = classify(t)
    assert c.fireball == (next(redexes(t, STRATEGIES["olam"]), None) is None)
    assert c.solved_fireball == (next(redexes(t, STRATEGIES["slam"]), None) is None)
    assert c.full_fireball == (next(redexes(t, STRATEGIES["vsclam"]), None) is None)


@given(terms())
def test_grammar_inclusions(t):
    c = classify(t)
    if c.inert:
        assert c.fireball and c.solved_fireball
    if c.solved_fireball:
        assert c.fireball
    if c.full_fireball:
        assert c.solved_fireball


def test_abstraction_of_omega():
    c = classify(P(r"\x.(\a.a a) (\a.a a)"))
    assert c.fireball and c.value
    assert not c.full_fireball and not c.solved_fireball


def test_inert_example_with_substitution():
    c = classify(P(r"x[x<-y (\x.x)] y"))
    assert c.inert and c.fireball and c.solved_fireball
