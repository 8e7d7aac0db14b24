import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbi.constructions import bitvec, fixture_models, powerset_model, relational_model, z_mod
from cbi.formula import (BOT, TOP, And, FormulaSyntaxError, Imp, Not, Or, Var, parse_formula, render)
from cbi.modal import (AXIOMS, E, INF, CoWandMod, CompMod, FrameError, InvMod, MLFrame, ModalEvaluator, check_axioms,
                       decompose_unitary, embed_formula, embed_model, extract_cbi, frame_from_json,
                       frame_sum, frame_to_json, is_modal, is_very_simple_sahlqvist, make_frame, msat,
                       mtruth, parse_modal, revembed_formula)
from cbi.models import model_to_json
from cbi.semantics import UnknownElementError, iter_environments, sat, truth

from conftest import formulas
from oracles import composite, embed_by_table

FIXTURES = fixture_models()
P, Q = Var("P"), Var("Q")


def modal_formulas(names=("P", "Q"), max_leaves=6):
    base = st.sampled_from([Var(n) for n in names] + [TOP, BOT, E, INF])

    def grow(inner):
        un = st.builds(lambda c, a: c(a), st.sampled_from([Not, InvMod]), inner)
        bi = st.builds(lambda c, a, b: c(a, b), st.sampled_from([And, Or, Imp, CompMod, CoWandMod]),
                       inner, inner)
        return st.one_of(un, bi)

    return st.recursive(base, grow, max_leaves=max_leaves)


def with_inv(fr: MLFrame, inv) -> MLFrame:
    return MLFrame(fr.carrier, fr.comp, fr.cowand, fr.unit_set, inv, fr.infinity_set, label=fr.label)


# ---------------------------------------------------------------- grammar

def test_parse_modal_examples():
    assert parse_modal("E o P -> P") == Imp(CompMod(E, P), P)
    assert parse_modal("-.-.P") == InvMod(InvMod(P))
    assert parse_modal("P o- INF") == CoWandMod(P, INF)
    assert render(parse_modal("-.(P o- Q) o E"), "unicode") == "−(P ⊸ Q) ∘ e"


def test_parse_modal_rejects_cbi_connectives():
    for text in ("P * Q", "~P", "emp"):
        with pytest.raises(FormulaSyntaxError):
            parse_modal(text)


@given(modal_formulas())
def test_modal_render_parse_round_trip(a):
    assert is_modal(a)
    assert parse_modal(render(a)) == a


# ---------------------------------------------------------------- satisfaction

def test_infinity_on_embedded_z2():
    fr = embed_model(z_mod(2, 1))
    assert msat(fr, {}, 1, INF) and not msat(fr, {}, 0, INF)
    assert msat(fr, {}, 0, E) and not msat(fr, {}, 1, E)


def test_msat_unknown_element():
    with pytest.raises(UnknownElementError):
        msat(embed_model(z_mod(2, 1)), {}, 7, TOP)


@pytest.mark.parametrize("m", FIXTURES, ids=lambda m: m.label)
def test_inverse_diamond_clause(m):
    fr = embed_model(m)
    for env in iter_environments(m, ["P"]):
        for r in m.carrier:
            expected = any(r in fr.inv_of(r2) and r2 in env["P"] for r2 in m.carrier)
            assert msat(fr, env, r, InvMod(P)) == expected


@pytest.mark.parametrize("m", FIXTURES[:6], ids=lambda m: m.label)
def test_modal_evaluator_matches_msat(m):
    fr = embed_model(m)
    a = parse_modal("-.(P o- Q) o (E | P)")
    envs = list(iter_environments(m, ["P", "Q"]))
    idx = {x: i for i, x in enumerate(fr.carrier)}
    val = {}
    for v in ("P", "Q"):
        arr = np.zeros((len(envs), fr.size), dtype=bool)
        for k, env in enumerate(envs):
            for x in env[v]:
                arr[k, idx[x]] = True
        val[v] = arr
    got = ModalEvaluator(fr).denote(a, val, len(envs))
    for k, env in enumerate(envs):
        assert [bool(b) for b in got[k]] == [msat(fr, env, r, a) for r in fr.carrier]
    assert mtruth(fr, a) == all(msat(fr, env, r, a) for env in iter_environments(m, ["P", "Q"])
                                for r in m.carrier)


@settings(max_examples=30)
@given(st.sampled_from(FIXTURES[:8]), st.data())
def test_modalities_are_monotone(m, data):
    fr = embed_model(m)
    small = frozenset(data.draw(st.sets(st.sampled_from(m.carrier))))
    big = small | frozenset(data.draw(st.sets(st.sampled_from(m.carrier))))
    other = frozenset(data.draw(st.sets(st.sampled_from(m.carrier))))
    env = {"P": small, "Q": big, "R": other}
    for lo, hi in ((InvMod(P), InvMod(Q)), (CompMod(P, Var("R")), CompMod(Q, Var("R"))),
                   (CompMod(Var("R"), P), CompMod(Var("R"), Q)),
                   (CoWandMod(P, Var("R")), CoWandMod(Q, Var("R"))),
                   (CoWandMod(Var("R"), P), CoWandMod(Var("R"), Q))):
        for r in m.carrier:
            assert not msat(fr, env, r, lo) or msat(fr, env, r, hi)


# ---------------------------------------------------------------- frames and axioms

def test_cowand_table_on_z2():
    fr = embed_model(z_mod(2, 1))
    expected = {(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1) if y == (x + z) % 2}
    assert fr.cowand == expected


@pytest.mark.parametrize("m", FIXTURES, ids=lambda m: m.label)
def test_embedded_fixtures_satisfy_every_axiom(m):
    fr = embed_model(m)
    report = check_axioms(fr)
    assert report.all_hold and report.unitary and not report.sampled
    assert len(fr.unit_set) == 1


def test_relational_model_embedding_report():
    doc = check_axioms(embed_model(relational_model())).to_json()
    assert doc["passed"] == doc["total"] == 11 and doc["unitary"]


def test_missing_commutative_pair_breaks_axiom_3():
    fr = embed_model(z_mod(3, 0))
    broken = MLFrame(fr.carrier, fr.comp - {(1, 2, 0)}, fr.cowand, fr.unit_set, fr.inv, fr.infinity_set)
    report = check_axioms(broken, axioms=(3,))
    assert report.failing == [3]
    env, point = report.witnesses[3]
    assert not msat(broken, env, point, AXIOMS[3])


def test_empty_unit_set_not_unitary():
    fr = embed_model(z_mod(2, 1))
    empty = MLFrame(fr.carrier, fr.comp, fr.cowand, frozenset(), fr.inv, fr.infinity_set)
    assert not check_axioms(empty, axioms=(8,)).unitary


def test_frame_rejects_foreign_elements():
    with pytest.raises(ValueError):
        make_frame([0, 1], [(0, 1, 2)], [], [0], {}, [])


def test_sampled_mode():
    fr = embed_model(powerset_model({1, 2, 3}))
    report = check_axioms(fr)
    assert report.sampled and report.all_hold
    bad = with_inv(embed_model(z_mod(2, 1)), {0: frozenset({0}), 1: frozenset({0})})
    assert 8 in check_axioms(bad, mode="sampled", samples=64).failing
    with pytest.raises(ValueError):
        check_axioms(fr, mode="fast")


def test_frame_json_round_trip():
    fr = embed_model(with_strs := z_mod(3, 1))
    doc = frame_to_json(fr)
    back = frame_from_json(doc)
    assert frame_to_json(back) == doc
    assert set(doc) >= {"carrier", "unit_set", "infinity_set", "inv", "comp", "cowand"}
    assert len(doc["cowand"]) == len(with_strs.comp)


# ---------------------------------------------------------------- Sahlqvist shapes

@pytest.mark.parametrize("k", sorted(AXIOMS))
def test_axioms_are_very_simple_sahlqvist(k):
    assert is_very_simple_sahlqvist(AXIOMS[k])


@pytest.mark.parametrize("text,expected", [
    ("!P -> P", False), ("P -> !P", False), ("P o Q -> !!P", True), ("P & E -> P | Q", True),
    ("(P -> Q) -> Q", False), ("P", False),
])
def test_sahlqvist_controls(text, expected):
    assert is_very_simple_sahlqvist(parse_modal(text)) is expected


# ---------------------------------------------------------------- translations

def test_embed_examples():
    assert embed_formula(parse_formula("coemp")) == Not(INF)
    assert render(embed_formula(parse_formula("P |* Q"))) == "!-.(!-.P o !-.Q)"
    assert revembed_formula(embed_formula(parse_formula("P |* Q"))) == parse_formula("!!~(!!~P * !!~Q)")


@given(formulas())
def test_embed_matches_table(f):
    assert embed_formula(f) == embed_by_table(f)


@given(formulas())
def test_composite_table(f):
    assert revembed_formula(embed_formula(f)) == composite(f)


@given(modal_formulas())
def test_revembed_is_cbi(a):
    f = revembed_formula(a)
    assert parse_formula(render(f)) == f


@pytest.mark.parametrize("m", FIXTURES, ids=lambda m: m.label)
def test_extract_inverts_embed(m):
    assert model_to_json(extract_cbi(embed_model(m))) == model_to_json(m)


def test_embed_extract_embed_identity():
    fr = embed_model(bitvec(2))
    assert embed_model(extract_cbi(fr)) == fr


def test_extract_rejects_non_unitary():
    fr = frame_sum(embed_model(z_mod(2, 0)), embed_model(bitvec(1)))
    with pytest.raises(FrameError, match="not unitary"):
        extract_cbi(fr)


def test_extract_names_axiom_8():
    bad = with_inv(embed_model(z_mod(2, 1)), {0: frozenset({0}), 1: frozenset({0})})
    with pytest.raises(FrameError) as err:
        extract_cbi(bad)
    assert err.value.axiom == 8


@settings(max_examples=60)
@given(formulas(max_leaves=4), st.sampled_from(FIXTURES))
def test_truth_transfer(f, m):
    assert truth(m, f) == mtruth(embed_model(m), embed_formula(f))


@settings(max_examples=60)
@given(formulas(max_leaves=4), st.sampled_from(FIXTURES[:8]), st.data())
def test_pointwise_transfer(f, m, data):
    env = {v: frozenset(data.draw(st.sets(st.sampled_from(m.carrier)))) for v in ("P", "Q")}
    fr, a = embed_model(m), embed_formula(f)
    for r in m.carrier:
        assert sat(m, env, r, f) == msat(fr, env, r, a)


# ---------------------------------------------------------------- unitary decomposition

def test_decompose_unitary_identity():
    fr = embed_model(z_mod(3, 1))
    assert decompose_unitary(fr) == [fr]


def test_decompose_two_unit_frame():
    parts_in = (embed_model(z_mod(2, 0)), embed_model(bitvec(1)))
    fr = frame_sum(*parts_in)
    parts = decompose_unitary(fr)
    assert len(parts) == 2 and all(p.unitary for p in parts)
    assert sorted(x for p in parts for x in p.carrier) == sorted(fr.carrier)
    for text in ("INF -> P o -.P", "E -> -.INF", "P o Q -> Q o P", "-.P -> P", "E | INF"):
        a = parse_modal(text)
        assert mtruth(fr, a) == all(mtruth(p, a) for p in parts), text
    assert not mtruth(fr, parse_modal("E | INF"))


def test_decompose_requires_monoid_axioms():
    fr = embed_model(z_mod(3, 0))
    broken = MLFrame(fr.carrier, fr.comp - {(0, 1, 1)}, fr.cowand, fr.unit_set, fr.inv, fr.infinity_set)
    with pytest.raises(FrameError):
        decompose_unitary(broken)
