"""Exhaustive enumeration of small CBI-models and bounded countermodel search."""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass, field
from typing import Iterator

from .constructions import (ConstructionError, action_comm, bitvec, disjoint_union, powerset_model,
                            product_model, z_mod)
from .formula import Formula
from .models import ResourceModel, bits, canonical_key, is_nonextensible, make_model
from .semantics import DEFAULT_ENV_CAP, BudgetExceeded, find_falsifier


def _associative(masks: list[list[int]], n: int) -> bool:
    for i in range(n):
        for j in range(n):
            ij = masks[i][j]
            for k in range(n):
                left = 0
                for w in bits(masks[j][k]):
                    left |= masks[i][w]
                right = 0
                for v in bits(ij):
                    right |= masks[v][k]
                if left != right:
                    return False
    return True


def _bbi_tables(n: int) -> Iterator[list[list[int]]]:
    """Every commutative, unital, associative relation on {0..n-1} with unit 0."""
    pairs = [(i, j) for i in range(1, n) for j in range(i, n)]
    for choice in itertools.product(range(1 << n), repeat=len(pairs)):
        masks = [[0] * n for _ in range(n)]
        for i in range(n):
            masks[0][i] = masks[i][0] = 1 << i
        for (i, j), s in zip(pairs, choice):
            masks[i][j] = masks[j][i] = s
        if _associative(masks, n):
            yield masks


def nondeterminism(m: ResourceModel) -> int:
    """The largest composition set max |x∘y|; 1 or less means partial-functional."""
    return max(bin(mask).count("1") for row in m.comp_masks for mask in row)


def enumerate_cbi_models(max_size: int = 3, up_to_iso: bool = True) -> Iterator[ResourceModel]:
    """Every CBI-model on {0}, {0,1}, … up to `max_size` elements, unit 0.

    Once ∞ is chosen the involution is forced (the unique dual of each x),
    so the stream runs over (relation, ∞) pairs that admit unique duals.
    Within each carrier size, models come simplest first: by max |x∘y|,
    then by number of triples, then by canonical form.
    """
    if max_size not in (1, 2, 3):
        raise ValueError("max_size must be 1, 2 or 3")
    for n in range(1, max_size + 1):
        found = []
        for masks in _bbi_tables(n):
            for inf in range(n):
                inv = []
                for x in range(n):
                    duals = [y for y in range(n) if masks[x][y] >> inf & 1]
                    if len(duals) != 1:
                        break
                    inv.append(duals[0])
                else:
                    comp = [(x, y, z) for x in range(n) for y in range(n) for z in bits(masks[x][y])]
                    found.append(make_model(range(n), comp, 0, dict(enumerate(inv)), inf,
                                            label=f"enum{n}", closed=True))
        keyed = [((nondeterminism(m), len(m.comp), canonical_key(m)), i, m) for i, m in enumerate(found)]
        keyed.sort(key=lambda t: (t[0], t[1]))
        seen = set()
        for (_, _, key), _, m in keyed:
            if up_to_iso:
                if key in seen:
                    continue
                seen.add(key)
            yield m


# ---------------------------------------------------------------- countermodels

FAMILIES = ("enum", "zmod", "bitvec", "powerset", "action", "product", "union")


@dataclass(frozen=True)
class SearchBudget:
    max_enum_size: int = 3
    max_zmod: int = 6
    max_bitvec: int = 3
    max_powerset: int = 3
    max_actions: int = 2
    carrier_cap: int = 16
    env_cap: int = DEFAULT_ENV_CAP
    families: tuple = FAMILIES


@dataclass(frozen=True)
class Countermodel:
    model: ResourceModel
    env: dict
    point: object
    family: str


@dataclass(frozen=True)
class Exhausted:
    models_checked: int
    models_skipped: int
    seconds: float
    families: tuple = field(default=())


def _candidates(budget: SearchBudget) -> Iterator[tuple[str, ResourceModel]]:
    fams = budget.families
    small: list[ResourceModel] = []
    if "enum" in fams:
        for m in enumerate_cbi_models(budget.max_enum_size, up_to_iso=True):
            yield "enum", m
    if "zmod" in fams:
        for n in range(1, budget.max_zmod + 1):
            for k in range(n):
                m = z_mod(n, k)
                small.append(m)
                yield "zmod", m
    if "bitvec" in fams:
        for n in range(1, budget.max_bitvec + 1):
            if 1 << n <= budget.carrier_cap:
                m = bitvec(n)
                small.append(m)
                yield "bitvec", m
    if "powerset" in fams:
        for n in range(1, budget.max_powerset + 1):
            if 1 << n <= budget.carrier_cap:
                m = powerset_model(range(1, n + 1))
                small.append(m)
                yield "powerset", m
    if "action" in fams:
        for n in range(1, budget.max_actions + 1):
            m = action_comm([f"a{i}" for i in range(n)])
            if m.size <= budget.carrier_cap:
                small.append(m)
                yield "action", m
    small = [m for m in small if m.size > 1]
    if "product" in fams:
        for a, b in itertools.combinations_with_replacement(small, 2):
            if a.size * b.size <= budget.carrier_cap:
                yield "product", product_model([a, b])
    if "union" in fams:
        ne = [m for m in small if is_nonextensible(m, m.infinity)]
        for a, b in itertools.combinations_with_replacement(ne, 2):
            if a.size + b.size - 2 <= budget.carrier_cap:
                try:
                    yield "union", disjoint_union(a, b)
                except ConstructionError:
                    continue


def countermodel_search(f: Formula, budget: SearchBudget = SearchBudget()) -> Countermodel | Exhausted:
    """First model (in a fixed order) with a point and environment falsifying f."""
    start = time.perf_counter()
    checked = skipped = 0
    for family, m in _candidates(budget):
        try:
            bad = find_falsifier(m, f, budget.env_cap)
        except BudgetExceeded:
            skipped += 1
            continue
        checked += 1
        if bad is not None:
            return Countermodel(m, bad.env, bad.point, family)
    return Exhausted(checked, skipped, time.perf_counter() - start, tuple(budget.families))
