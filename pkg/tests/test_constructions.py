import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbi.constructions import (ConstructionError, GroupAxiomError, SizeGuardError, action_comm, bar,
                               bbi_extension, bitvec, cyclic_product, deny_guarantee, disjoint_union,
                               fraction_dg, fraction_fragment, from_abelian_group, generalized_heap,
                               heap_at, nonconservativity_model, powerset_model, product_model,
                               relational_model, z_mod)
from cbi.formula import expand_macros, parse_formula
from cbi.models import (from_function, is_effect_algebra, is_nonextensible, isomorphic, validate_bbi,
                        validate_cbi)
from cbi.semantics import sat, truth

from oracles import direct_deny_guarantee, relational_by_table

MACROS = expand_macros()


def z2():
    return from_abelian_group([0, 1], lambda x, y: (x + y) % 2, 0, lambda x: x, "Z_2")


def klein():
    els = [(a, b) for a in (0, 1) for b in (0, 1)]
    return from_abelian_group(els, lambda x, y: ((x[0] + y[0]) % 2, (x[1] + y[1]) % 2), (0, 0),
                              lambda x: x, "V4")


# ---------------------------------------------------------------- Abelian groups

def test_z2_group_model():
    m = z2()
    assert m.infinity == 0 and m.inv == {0: 0, 1: 1}
    assert m.compose(1, 1) == {0}
    assert validate_cbi(m).ok


def test_klein_every_element_self_inverse():
    m = klein()
    assert all(m.inv[x] == x for x in m.carrier)
    assert validate_cbi(m).ok


def test_z4_matches_zmod_with_infinity_zero():
    assert isomorphic(cyclic_product([4]), z_mod(4, 0))


def test_group_axiom_violation_names_axiom():
    with pytest.raises(GroupAxiomError) as err:
        from_abelian_group([0, 1], lambda x, y: max(x, y), 0, lambda x: x)
    assert err.value.axiom == "inverse" and err.value.witness == (1,)
    with pytest.raises(GroupAxiomError) as err:
        from_abelian_group([0, 1, 2], lambda x, y: (x + y) % 3, 0, lambda x: x)
    assert err.value.axiom == "inverse"
    with pytest.raises(GroupAxiomError) as err:
        from_abelian_group([0, 1], lambda x, y: x + y, 0, lambda x: x)
    assert err.value.axiom == "closure"


@pytest.mark.parametrize("orders", [[1], [2], [3], [2, 2], [2, 3], [5]])
def test_groups_are_cbi_and_not_effect_algebras(orders):
    m = cyclic_product(orders)
    assert validate_cbi(m).ok
    assert is_effect_algebra(m) == (m.size == 1)


# ---------------------------------------------------------------- families

def test_zmod42_example():
    m = z_mod(4, 2)
    assert m.inv[3] == 3 and m.inv[0] == 2 and m.infinity == 2


@pytest.mark.parametrize("n", range(1, 7))
def test_zmod_all_infinities_valid(n):
    assert all(validate_cbi(z_mod(n, m)).ok for m in range(n))


def test_zmod_rejects_bad_infinity():
    with pytest.raises(ConstructionError):
        z_mod(3, 3)


def test_bitvec_examples():
    m = bitvec(2)
    assert m.inv["01"] == "10"
    assert m.compose("01", "10") == {"11"}
    assert isomorphic(bitvec(1), z_mod(2, 1))
    assert validate_cbi(bitvec(3)).ok


def test_powerset_examples():
    m = powerset_model({1, 2})
    a, b, ab = frozenset({1}), frozenset({2}), frozenset({1, 2})
    assert m.compose(a, b) == {ab}
    assert m.compose(a, ab) == set()
    assert m.inv[a] == b and m.infinity == ab
    assert is_effect_algebra(m)
    assert powerset_model({1}).size == 2


@pytest.mark.parametrize("k", range(0, 5))
def test_powerset_valid(k):
    assert validate_cbi(powerset_model(range(k))).ok


def test_powerset_size_guard():
    with pytest.raises(SizeGuardError):
        powerset_model(range(8), cap=100)


def test_action_comm_single_action():
    m = action_comm(["a"])
    assert m.size == 4
    assert m.compose("a", bar("a")) == {"tau"}
    assert m.compose("tau", "a") == set()
    assert m.inv["a"] == bar("a") and m.infinity == "tau"
    assert is_effect_algebra(m)


@pytest.mark.parametrize("acts", [["a"], ["a", "b"], ["a", "b", "c"]])
def test_action_comm_valid(acts):
    assert validate_cbi(action_comm(acts)).ok


def test_action_comm_reserved_name():
    with pytest.raises(ConstructionError):
        action_comm(["tau"])


def test_heap_single_location():
    m = generalized_heap([4], [0, 1])
    assert m.size == 4
    assert heap_at(m.infinity, 4) == {0, 1}
    assert validate_cbi(generalized_heap([4], [0, 1, 2])).ok
    assert isomorphic(m, product_model([powerset_model({0, 1})]))


def test_heap_two_locations_is_product():
    m = generalized_heap([1, 2], [0])
    assert isomorphic(m, product_model([powerset_model({0})] * 2))


# ---------------------------------------------------------------- unions

def test_union_of_action_models():
    u = disjoint_union(action_comm(["a"]), action_comm(["b"]))
    assert u.size == 4 + 4 - 2
    assert validate_cbi(u).ok
    assert isomorphic(u, action_comm(["a", "b"]))


def test_fraction_dg_size_and_sums():
    m = fraction_dg(2)
    assert m.size == 4
    assert m.compose("d1/2", "d1/2") == {"1"}
    assert m.compose("d1/2", "g1/2") == set()
    assert m.inv["g1/2"] == "g1/2"
    assert fraction_dg(4).size == 2 + 2 * 3


def test_union_side_condition_error():
    with pytest.raises(ConstructionError, match="side condition"):
        disjoint_union(z_mod(3, 1), z_mod(2, 1))


def test_union_of_groups_rechecked():
    # both sides satisfy ∞ = e; associativity still fails unless one is trivial
    with pytest.raises(ConstructionError, match="not a CBI-model"):
        disjoint_union(z_mod(2, 0), z_mod(2, 0))
    assert isomorphic(disjoint_union(z_mod(1, 0), z_mod(3, 0)), z_mod(3, 0))


def test_fragment_infinity_nonextensible():
    f = fraction_fragment("d", 3)
    assert is_nonextensible(f, f.infinity)


# ---------------------------------------------------------------- products

def test_product_examples():
    assert isomorphic(product_model([bitvec(1), bitvec(1)]), bitvec(2))
    assert isomorphic(product_model([z_mod(3, 1)]), z_mod(3, 1))
    p = product_model([z_mod(2, 0), powerset_model({1})])
    assert p.size == 4 and validate_cbi(p).ok


def test_product_size_guard():
    with pytest.raises(SizeGuardError):
        product_model([bitvec(4)] * 3, cap=1000)


@settings(max_examples=25)
@given(st.lists(st.sampled_from([(1, 0), (2, 0), (2, 1), (3, 1), (3, 2)]), min_size=1, max_size=2))
def test_products_of_zmods_are_cbi(params):
    p = product_model([z_mod(n, m) for n, m in params])
    assert validate_cbi(p).ok


# ---------------------------------------------------------------- deny-guarantee

@pytest.mark.parametrize("acts,k", [(["a"], 2), (["a"], 3), (["a", "b"], 2), (["a", "b"], 4)])
def test_deny_guarantee_matches_direct_tables(acts, k):
    m = deny_guarantee(acts, k)
    assert validate_cbi(m).ok
    assert isomorphic(m, direct_deny_guarantee(acts, k))


def test_deny_guarantee_example():
    m = deny_guarantee(["a"], 2)
    half = (("a", "d1/2"),)
    assert m.compose(half, half) == {(("a", "1"),)}
    assert m.inv[half] == half


# ---------------------------------------------------------------- BBI extension

def test_extension_of_point():
    # ē⊕ē is never generated, so the result is the two-element effect algebra, not Z_2 with ∞ = 1
    point = from_function(["e"], lambda x, y: ["e"], "e")
    ext = bbi_extension(point)
    assert ext.compose(ext.infinity, ext.infinity) == set()
    assert isomorphic(ext, powerset_model({1}))
    assert not isomorphic(ext, z_mod(2, 1))


def test_extension_of_nonconservativity_model():
    ext = bbi_extension(nonconservativity_model())
    assert ext.size == 6
    assert validate_cbi(ext).ok
    f = parse_formula("I & J -> P", MACROS)
    assert not truth(nonconservativity_model(), f)
    assert truth(ext, f)


def test_extension_rejects_non_bbi():
    bad = from_function(["e", "a"], lambda x, y: [y] if x == "e" else [x] if y == "e" else ["a"], "e")
    assert validate_bbi(bad).ok
    broken = from_function(["e", "a"], lambda x, y: ["a"], "e")
    with pytest.raises(ConstructionError):
        bbi_extension(broken)


@pytest.mark.parametrize("m", [z_mod(2, 0), z_mod(3, 0), powerset_model({1}), action_comm(["a"])],
                         ids=lambda m: m.label)
def test_extension_of_cbi_models_is_cbi(m):
    ext = bbi_extension(m)
    assert ext.size == 2 * m.size and validate_cbi(ext).ok


# ---------------------------------------------------------------- named models

def test_relational_model_matches_table():
    m = relational_model()
    assert isomorphic(m, relational_by_table())
    assert validate_cbi(m).ok
    assert sat(m, {}, "a", MACROS["K"])
