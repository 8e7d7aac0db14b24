"""Concrete CBI-models and the general ways of building new ones from old."""

from __future__ import annotations

import itertools
from typing import Iterable, Mapping, Sequence

from .models import (BbiModel, ResourceModel, from_function, is_nonextensible, make_model,
                     relabel, validate_bbi, validate_cbi)

DEFAULT_SIZE_CAP = 4096


class ConstructionError(ValueError):
    """A constructor's precondition or side condition does not hold."""


class GroupAxiomError(ConstructionError):
    def __init__(self, axiom: str, witness: tuple):
        self.axiom = axiom
        self.witness = witness
        super().__init__(f"not an Abelian group: {axiom} fails at {witness!r}")


class SizeGuardError(ConstructionError):
    pass


def _guard(size: int, cap: int) -> None:
    if size > cap:
        raise SizeGuardError(f"carrier would have {size} elements, above the cap of {cap}")


def from_abelian_group(elements: Iterable, op, unit, inverse, label: str = "") -> ResourceModel:
    """An Abelian group as a CBI-model with ∞ = e.

    `op` and `inverse` are either callables or lookup tables keyed by
    (x, y) and x respectively.
    """
    elements = tuple(elements)
    members = set(elements)
    table = {}
    for x in elements:
        for y in elements:
            try:
                xy = op[(x, y)] if isinstance(op, Mapping) else op(x, y)
            except KeyError:
                raise GroupAxiomError("totality", (x, y)) from None
            if xy not in members:
                raise GroupAxiomError("closure", (x, y))
            table[(x, y)] = xy
    inv = {}
    for x in elements:
        try:
            inv[x] = inverse[x] if isinstance(inverse, Mapping) else inverse(x)
        except KeyError:
            raise GroupAxiomError("inverse", (x,)) from None
    if unit not in members:
        raise GroupAxiomError("unit", (unit,))
    for x in elements:
        if table[(x, unit)] != x:
            raise GroupAxiomError("unit", (x,))
        if inv[x] not in members or table[(x, inv[x])] != unit:
            raise GroupAxiomError("inverse", (x,))
        for y in elements:
            if table[(x, y)] != table[(y, x)]:
                raise GroupAxiomError("commutativity", (x, y))
            for z in elements:
                if table[(table[(x, y)], z)] != table[(x, table[(y, z)])]:
                    raise GroupAxiomError("associativity", (x, y, z))
    comp = [(x, y, xy) for (x, y), xy in table.items()]
    return make_model(elements, comp, unit, inv, unit, label or "abelian group", closed=True)


def cyclic_product(orders: Sequence[int]) -> ResourceModel:
    """Z_{n1} × … × Z_{nk} as an Abelian-group model."""
    if not orders or any(n < 1 for n in orders):
        raise ConstructionError("orders must be positive integers")
    elements = list(itertools.product(*(range(n) for n in orders)))
    if len(orders) == 1:
        elements = [t[0] for t in elements]
        n = orders[0]
        return from_abelian_group(elements, lambda x, y: (x + y) % n, 0, lambda x: (-x) % n, f"Z_{n}")
    return from_abelian_group(
        elements,
        lambda x, y: tuple((a + b) % n for a, b, n in zip(x, y, orders)),
        tuple(0 for _ in orders),
        lambda x: tuple((-a) % n for a, n in zip(x, orders)),
        " x ".join(f"Z_{n}" for n in orders))


def z_mod(n: int, m: int) -> ResourceModel:
    """Integers mod n under addition, with ∞ = m and -k = m - k."""
    if n < 1:
        raise ConstructionError("n must be positive")
    if not 0 <= m < n:
        raise ConstructionError(f"infinity {m} out of range for Z_{n}")
    return from_function(range(n), lambda x, y: [(x + y) % n], 0,
                         inv=lambda k: (m - k) % n, infinity=m, label=f"zmod({n},{m})")


def bitvec(n: int) -> ResourceModel:
    """n-bit words under XOR, with NOT as involution and all-ones as ∞."""
    if not 1 <= n <= 16:
        raise ConstructionError("bit width must be between 1 and 16")
    words = [format(i, f"0{n}b") for i in range(1 << n)]
    full = (1 << n) - 1
    return from_function(
        words, lambda x, y: [format(int(x, 2) ^ int(y, 2), f"0{n}b")], "0" * n,
        inv=lambda x: format(int(x, 2) ^ full, f"0{n}b"), infinity="1" * n, label=f"bitvec({n})")


def powerset_model(universe: Iterable, cap: int = DEFAULT_SIZE_CAP) -> ResourceModel:
    """Subsets of a finite universe under disjoint union, complement as involution."""
    universe = frozenset(universe)
    _guard(1 << len(universe), cap)
    items = sorted(universe, key=repr)
    subsets = [frozenset(c) for k in range(len(items) + 1) for c in itertools.combinations(items, k)]
    return from_function(subsets, lambda x, y: [x | y] if not x & y else [], frozenset(),
                         inv=lambda x: universe - x, infinity=universe,
                         label=f"powerset({len(items)})")


def bar(a: str) -> str:
    return a + "_bar"


def action_comm(actions: Iterable[str]) -> ResourceModel:
    """Actions and co-actions; b|0 = b, b|b̄ = τ, everything else undefined."""
    actions = sorted(set(actions))
    if not actions:
        raise ConstructionError("need at least one action")
    for a in actions:
        if a in ("0", "tau") or a.endswith("_bar"):
            raise ConstructionError(f"action name {a!r} is reserved")
    carrier = ["0", "tau"] + [x for a in actions for x in (a, bar(a))]
    co = {"0": "tau", "tau": "0"}
    for a in actions:
        co[a], co[bar(a)] = bar(a), a

    def op(x, y):
        if y == "0":
            return [x]
        if x == "0":
            return [y]
        if x not in ("tau",) and co[x] == y:
            return ["tau"]
        return []

    return from_function(carrier, op, "0", inv=co.__getitem__, infinity="tau",
                         label=f"action({','.join(actions)})")


def product_model(factors: Sequence[ResourceModel], cap: int = DEFAULT_SIZE_CAP) -> ResourceModel:
    """Componentwise composition, involution and infinity over tuples."""
    factors = list(factors)
    if not factors:
        raise ConstructionError("product of an empty list")
    total = 1
    for f in factors:
        total *= f.size
    _guard(total, cap)
    carrier = list(itertools.product(*(f.carrier for f in factors)))

    def op(x, y):
        parts = [f.compose(a, b) for f, a, b in zip(factors, x, y)]
        return list(itertools.product(*parts))

    return from_function(carrier, op, tuple(f.unit for f in factors),
                         inv=lambda x: tuple(f.inv[a] for f, a in zip(factors, x)),
                         infinity=tuple(f.infinity for f in factors),
                         label=" x ".join(f.label or "?" for f in factors))


def generalized_heap(locations: Iterable, values: Iterable, cap: int = DEFAULT_SIZE_CAP) -> ResourceModel:
    """Heaps h: L → P(V) composed by pointwise disjoint union.

    Elements are tuples of (location, frozenset) pairs in location order.
    """
    locations = sorted(set(locations), key=repr)
    values = frozenset(values)
    if not locations or not values:
        raise ConstructionError("locations and values must be nonempty")
    _guard(1 << (len(locations) * len(values)), cap)
    factor = powerset_model(values, cap)
    prod = product_model([factor] * len(locations), cap)
    heap = relabel(prod, lambda t: tuple(zip(locations, t)))
    return ResourceModel(heap.carrier, heap.comp, heap.unit, heap.inv, heap.infinity,
                         label=f"heap({len(locations)}x{len(values)})")


def heap_at(h, loc) -> frozenset:
    return dict(h)[loc]


# ---------------------------------------------------------------- unions

def disjoint_union(m1: ResourceModel, m2: ResourceModel, label: str = "") -> ResourceModel:
    """Identify the units and the infinities of two models and take the union.

    Side condition: both infinities equal their units, or both are
    nonextensible.  The result is re-validated, since the first alternative
    only yields an associative composition when one side is trivial.
    """
    groupish = m1.infinity == m1.unit and m2.infinity == m2.unit
    if not groupish:
        bad = [name for name, m in (("infinity of the first model", m1), ("infinity of the second model", m2))
               if not is_nonextensible(m, m.infinity)]
        if bad:
            raise ConstructionError(
                "side condition fails: " + " and ".join(bad) + (" is" if len(bad) == 1 else " are")
                + " extensible, and the infinities are not both equal to the units")
    special1 = {m1.unit, m1.infinity}
    special2 = {m2.unit, m2.infinity}
    rest1 = [x for x in m1.carrier if x not in special1]
    rest2 = [x for x in m2.carrier if x not in special2]
    if set(rest2) & (set(rest1) | special1):
        f1 = {x: x if x in special1 else (1, x) for x in m1.carrier}
        f2 = {x: (2, x) for x in m2.carrier}
    else:
        f1 = {x: x for x in m1.carrier}
        f2 = {x: x for x in m2.carrier}
    f2[m2.unit] = f1[m1.unit]
    f2[m2.infinity] = f1[m1.infinity]
    carrier = [f1[x] for x in m1.carrier]
    carrier += [f2[x] for x in rest2]
    comp = {(f1[x], f1[y], f1[z]) for x, y, z in m1.comp}
    comp |= {(f2[x], f2[y], f2[z]) for x, y, z in m2.comp}
    inv = {f1[x]: f1[m1.inv[x]] for x in m1.carrier}
    inv.update({f2[x]: f2[m2.inv[x]] for x in m2.carrier})
    out = ResourceModel(tuple(carrier), frozenset(comp), f1[m1.unit], inv, f1[m1.infinity],
                        label=label or f"({m1.label or '?'}) + ({m2.label or '?'})")
    report = validate_cbi(out)
    if not report.ok:
        name, witness = report.failures[0]
        raise ConstructionError(f"the union is not a CBI-model: {name} fails at {witness!r}")
    return out


# ---------------------------------------------------------------- deny-guarantee

def fraction_fragment(tag: str, k: int) -> ResourceModel:
    """{0, (tag, i/k) for 0<i<k, 1} with fractions adding below 1 and meeting at 1."""
    if k < 2:
        raise ConstructionError("granularity k must be at least 2")
    parts = [f"{tag}{i}/{k}" for i in range(1, k)]
    carrier = ["0"] + parts + ["1"]
    value = {p: i for i, p in enumerate(parts, start=1)}

    def op(x, y):
        if x == "0":
            return [y]
        if y == "0":
            return [x]
        if x == "1" or y == "1":
            return []
        s = value[x] + value[y]
        if s < k:
            return [f"{tag}{s}/{k}"]
        return ["1"] if s == k else []

    def inv(x):
        if x == "0":
            return "1"
        if x == "1":
            return "0"
        return f"{tag}{k - value[x]}/{k}"

    return from_function(carrier, op, "0", inv=inv, infinity="1", label=f"{tag}-fragment({k})")


def fraction_dg(k: int) -> ResourceModel:
    return disjoint_union(fraction_fragment("d", k), fraction_fragment("g", k), label=f"FractionDG({k})")


def deny_guarantee(actions: Iterable[str], k: int, cap: int = DEFAULT_SIZE_CAP) -> ResourceModel:
    """Maps from actions to discretised deny/guarantee fractions, built by union then product."""
    actions = sorted(set(actions))
    if not actions:
        raise ConstructionError("need at least one action")
    frac = fraction_dg(k)
    _guard(frac.size ** len(actions), cap)
    prod = product_model([frac] * len(actions), cap)
    m = relabel(prod, lambda t: tuple(zip(actions, t)))
    return ResourceModel(m.carrier, m.comp, m.unit, m.inv, m.infinity,
                         label=f"denyguar({','.join(actions)};{k})")


# ---------------------------------------------------------------- BBI extension

def bbi_extension(m: BbiModel) -> ResourceModel:
    """CBI-model on R ∪ R̄ generated by the rules (⊕1) and (⊕2)."""
    report = validate_bbi(m)
    if not report.ok:
        raise ConstructionError(f"not a BBI-model: {report.failures[0]}")

    def b(x):
        return ("bar", x)

    comp = set()
    for x, y, z in m.comp:
        comp.add((x, y, z))          # (⊕1)
        comp.add((x, b(z), b(y)))    # (⊕2)
        comp.add((b(z), x, b(y)))
    carrier = list(m.carrier) + [b(x) for x in m.carrier]
    inv = {x: b(x) for x in m.carrier}
    inv.update({b(x): x for x in m.carrier})
    return ResourceModel(tuple(carrier), frozenset(comp), m.unit, inv, b(m.unit),
                         label=f"ext({m.label or '?'})")


# ---------------------------------------------------------------- named models

def nonconservativity_model() -> BbiModel:
    """The three-element BBI-model {e, a, b} where only compositions with e are defined."""
    return from_function(["e", "a", "b"], lambda x, y: [y] if x == "e" else [x] if y == "e" else [], "e",
                         label="nonconservativity")


def relational_model() -> ResourceModel:
    """The three-element relational CBI-model {e, a, ∞} with a∘a = {e, ∞}."""
    table = {("a", "a"): ["e", "inf"], ("a", "inf"): ["e", "a"], ("inf", "a"): ["e", "a"],
             ("inf", "inf"): ["e", "a"]}

    def op(x, y):
        if x == "e":
            return [y]
        if y == "e":
            return [x]
        return table[(x, y)]

    return from_function(["e", "a", "inf"], op, "e", inv={"e": "inf", "a": "a", "inf": "e"}.__getitem__,
                         infinity="inf", label="relational")


def fixture_models() -> list[ResourceModel]:
    """The model fixtures shared by the test suites."""
    out: list[ResourceModel] = [z_mod(n, m) for n in range(1, 5) for m in range(n)]
    out += [bitvec(2), powerset_model({1, 2}), action_comm(["a"]), relational_model()]
    return out

