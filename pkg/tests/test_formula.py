import pytest
from hypothesis import given
from hypothesis import strategies as st

from cbi.formula import (BOT, MBOT, MTOP, TOP, And, FormulaSyntaxError, Iff, Imp, MNot, Not, Or, Par,
                         Star, Var, Wand, expand_macros, parse_formula, render, size, subformulas,
                         substitute, variables)

from conftest import formulas

P, Q, R = Var("P"), Var("Q"), Var("R")


@pytest.mark.parametrize("text,expected", [
    ("top", TOP),
    ("~(P * ~Q)", MNot(Star(P, MNot(Q)))),
    ("P -* Q -> R", Imp(Wand(P, Q), R)),
    ("P & Q | R", Or(And(P, Q), R)),
    ("P * Q & R", And(Star(P, Q), R)),
    ("P -> Q -> R", Imp(P, Imp(Q, R))),
    ("P & Q & R", And(And(P, Q), R)),
    ("P |* Q | R", Or(Par(P, Q), R)),
    ("!~P", Not(MNot(P))),
    ("emp * coemp", Star(MTOP, MBOT)),
    ("P <-> Q", Iff(P, Q)),
    ("∼¬P ∧ ⊤* ⅋ ⊥*", Par(And(MNot(Not(P)), MTOP), MBOT)),
    ("P —∗ Q", Wand(P, Q)),
])
def test_parse_examples(text, expected):
    assert parse_formula(text) == expected


@pytest.mark.parametrize("text,offset", [("P & & Q", 4), ("(P", 2), ("P Q", 2), ("", 0), ("P $ Q", 2)])
def test_syntax_errors_carry_byte_offset(text, offset):
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula(text)
    assert info.value.offset == offset
    assert info.value.expected


def test_offset_counts_utf8_bytes():
    with pytest.raises(FormulaSyntaxError) as info:
        parse_formula("¬ ∧ P")
    assert info.value.offset == len("¬ ".encode())


@pytest.mark.parametrize("f,style,text", [
    (TOP, "ascii", "top"),
    (Par(P, Q), "ascii", "P |* Q"),
    (Wand(P, Q), "unicode", "P —∗ Q"),
    (Wand(P, Q), "latex", r"P \mathrel{\hbox{---}\llap{$\ast$}} Q"),
    (MNot(Star(P, Q)), "unicode", "∼(P ∗ Q)"),
    (Imp(Imp(P, Q), R), "ascii", "(P -> Q) -> R"),
])
def test_render_examples(f, style, text):
    assert render(f, style) == text


@pytest.mark.parametrize("f,vs", [(TOP, set()), (Star(P, MNot(P)), {"P"}), (Imp(P, Q), {"P", "Q"})])
def test_variables(f, vs):
    assert variables(f) == vs


@pytest.mark.parametrize("f,subs", [
    (P, {P}),
    (MNot(P), {MNot(P), P}),
    (Wand(P, Q), {Wand(P, Q), P, Q}),
])
def test_subformulas(f, subs):
    assert subformulas(f) == subs


@pytest.mark.parametrize("f,p,g,out", [
    (And(P, Q), "P", R, And(R, Q)),
    (P, "P", P, P),
    (MNot(P), "P", Par(Q, R), MNot(Par(Q, R))),
])
def test_substitute(f, p, g, out):
    assert substitute(f, p, g) == out


def test_macros_expand_to_the_witness_formulas():
    m = expand_macros()
    assert m["K"] == parse_formula("!(!coemp -* !emp)")
    assert m["L"] == parse_formula("!coemp -* emp")
    assert parse_formula("K -> L", m) == Imp(m["K"], m["L"])


@given(formulas(max_leaves=8))
def test_ascii_round_trip(f):
    assert parse_formula(render(f)) == f


@given(formulas(max_leaves=8))
def test_unicode_round_trip(f):
    assert parse_formula(render(f, "unicode")) == f


@given(formulas(), st.sampled_from(["P", "Q"]))
def test_identity_substitution(f, p):
    assert substitute(f, p, Var(p)) == f


@given(formulas(), st.sampled_from(["P", "Q"]), formulas(names=("Q", "R")))
def test_substitution_variables(f, p, g):
    expected = (variables(f) - {p}) | (variables(g) if p in variables(f) else set())
    assert variables(substitute(f, p, g)) == expected


@given(formulas(max_leaves=10))
def test_subformula_count_bounded_by_size(f):
    assert len(subformulas(f)) <= size(f)
