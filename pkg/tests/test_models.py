import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from cbi.constructions import bitvec, fixture_models, nonconservativity_model, powerset_model, relational_model, z_mod
from cbi.enumeration import enumerate_cbi_models
from cbi.models import (MalformedModelError, ResourceModel, canonical_key, find_isomorphism, is_effect_algebra,
                        is_partial_functional, isomorphic, make_model, model_from_json, model_to_json, relabel,
                        validate_bbi, validate_cbi)

from oracles import relational_by_table


def test_nonconservativity_model_is_bbi():
    assert validate_bbi(nonconservativity_model()).ok


def test_single_point_bbi():
    assert validate_bbi(make_model(["e"], [("e", "e", "e")], "e")).ok


def test_unit_law_failure_has_witness():
    m = make_model(["e", "a"], [("a", "a", "a")], "e")
    report = validate_bbi(m)
    assert not report.ok
    assert ("unit", ("a", "e")) in report.failures


def test_relational_model_is_cbi():
    assert validate_cbi(relational_model()).ok
    assert isomorphic(relational_model(), relational_by_table())


@pytest.mark.parametrize("inf", ["e", "a", "b"])
def test_nonconservativity_model_admits_no_involution(inf):
    m = nonconservativity_model()
    for inv in ({x: x for x in m.carrier}, {"e": inf, "a": "b", "b": "a"}):
        report = validate_cbi(ResourceModel(m.carrier, m.comp, m.unit, inv, inf))
        assert not report.ok
        assert "uniqueness" in report.names() or "dual" in report.names()


def test_zmod42_validates():
    assert validate_cbi(z_mod(4, 2)).ok


def test_malformed_input_is_distinct_from_axiom_failure():
    m = make_model(["e"], [("e", "e", "x")], "e")
    with pytest.raises(MalformedModelError):
        validate_bbi(m)


def test_partial_functional_and_effect_algebra():
    assert not is_partial_functional(relational_model())
    assert is_effect_algebra(powerset_model({1, 2}))
    assert not is_effect_algebra(z_mod(4, 2))


@pytest.mark.parametrize("m", fixture_models(), ids=lambda m: m.label)
def test_json_round_trip(m):
    doc = json.loads(json.dumps(model_to_json(m)))
    back = model_from_json(doc)
    assert model_to_json(back) == model_to_json(m)
    assert isomorphic(back, m)


@pytest.mark.parametrize("m", fixture_models(), ids=lambda m: m.label)
def test_derived_laws(m):
    inv = m.inv
    assert inv[m.unit] == m.infinity
    for x in m.carrier:
        assert inv[inv[x]] == x
        for y in m.carrier:
            for z in m.carrier:
                a = z in m.compose(x, y)
                assert a == (inv[x] in m.compose(y, inv[z])) == (inv[y] in m.compose(x, inv[z]))


@given(st.permutations(range(1, 4)))
def test_isomorphism_invariant_under_relabelling(perm):
    m = z_mod(4, 2)
    mapping = {0: 0, **{i: p for i, p in zip(range(1, 4), perm)}}
    r = relabel(m, mapping)
    iso = find_isomorphism(m, r)
    assert iso is not None
    assert canonical_key(m) == canonical_key(r)


def test_non_isomorphic_models_differ():
    assert not isomorphic(z_mod(4, 0), z_mod(4, 2))
    assert not isomorphic(z_mod(2, 1), z_mod(2, 0))
    assert isomorphic(bitvec(1), z_mod(2, 1))


def test_enumeration_models_are_valid_and_distinct():
    models = list(enumerate_cbi_models(3))
    keys = {canonical_key(m) for m in models}
    assert len(keys) == len(models)
    assert all(validate_cbi(m).ok for m in models)
    assert [m.size for m in enumerate_cbi_models(1)] == [1]


def test_enumeration_contains_relational_model():
    assert any(isomorphic(m, relational_model()) for m in enumerate_cbi_models(3))


def test_enumeration_without_dedup_is_a_superset():
    full = list(enumerate_cbi_models(3, up_to_iso=False))
    dedup = list(enumerate_cbi_models(3))
    assert len(full) >= len(dedup)
    assert {canonical_key(m) for m in full} == {canonical_key(m) for m in dedup}


def _brute_force_keys(n):
    """Every CBI-model on n elements with unit 0, by trying all relations, infinities and involutions."""
    import itertools
    pairs = [(i, j) for i in range(1, n) for j in range(i, n)]
    keys = set()
    for choice in itertools.product(range(1 << n), repeat=len(pairs)):
        comp = {(0, x, x) for x in range(n)} | {(x, 0, x) for x in range(n)}
        for (i, j), s in zip(pairs, choice):
            comp |= {(i, j, z) for z in range(n) if s >> z & 1} | {(j, i, z) for z in range(n) if s >> z & 1}
        for inf in range(n):
            for inv in itertools.product(range(n), repeat=n):
                if any((x, inv[x], inf) not in comp for x in range(n)):
                    continue
                m = make_model(range(n), comp, 0, dict(enumerate(inv)), inf, closed=True)
                if validate_cbi(m).ok:
                    keys.add(canonical_key(m))
    return keys


@pytest.mark.parametrize("n,count", [(1, 1), (2, 4), (3, 20)])
def test_enumeration_matches_brute_force(n, count):
    enum = {canonical_key(m) for m in enumerate_cbi_models(3) if m.size == n}
    assert enum == _brute_force_keys(n)
    assert len(enum) == count
