"""Finite BBI- and CBI-models: data types, axiom validation, JSON I/O and
isomorphism search.

Composition is stored extensionally as a set of triples (x, y, z) meaning
z ∈ x∘y.  Elements may be any hashable value; serialized ids are strings.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Hashable, Iterable, Mapping

import numpy as np


class MalformedModelError(ValueError):
    """The input does not even describe a structure over its carrier."""

    def __init__(self, problems: list[str]):
        self.problems = problems
        super().__init__("; ".join(problems))


@dataclass(frozen=True)
class BbiModel:
    carrier: tuple
    comp: frozenset
    unit: Hashable
    label: str = field(default="", compare=False, kw_only=True)

    # -- indexed views, computed on demand ---------------------------------
    @cached_property
    def index(self) -> dict:
        return {x: i for i, x in enumerate(self.carrier)}

    @property
    def size(self) -> int:
        return len(self.carrier)

    @cached_property
    def comp_masks(self) -> list[list[int]]:
        """comp_masks[i][j] is the bitmask of x_i ∘ x_j."""
        n = self.size
        masks = [[0] * n for _ in range(n)]
        idx = self.index
        for x, y, z in self.comp:
            masks[idx[x]][idx[y]] |= 1 << idx[z]
        return masks

    @cached_property
    def comp_tensor(self) -> np.ndarray:
        n = self.size
        t = np.zeros((n, n, n), dtype=bool)
        idx = self.index
        for x, y, z in self.comp:
            t[idx[x], idx[y], idx[z]] = True
        return t

    @cached_property
    def unit_index(self) -> int:
        return self.index[self.unit]

    def compose(self, x, y) -> frozenset:
        m = self.comp_masks[self.index[x]][self.index[y]]
        return frozenset(self.carrier[i] for i in bits(m))

    def is_cbi(self) -> bool:
        return False


@dataclass(frozen=True)
class ResourceModel(BbiModel):
    inv: Mapping = field(default_factory=dict, hash=False)
    infinity: Hashable = None

    @cached_property
    def inv_index(self) -> list[int]:
        idx = self.index
        return [idx[self.inv[x]] for x in self.carrier]

    @cached_property
    def infinity_index(self) -> int:
        return self.index[self.infinity]

    def neg(self, x):
        return self.inv[x]

    def is_cbi(self) -> bool:
        return True


def bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def close_commutative(triples: Iterable[tuple]) -> frozenset:
    out = set()
    for x, y, z in triples:
        out.add((x, y, z))
        out.add((y, x, z))
    return frozenset(out)


def make_model(carrier: Iterable, comp: Iterable[tuple], unit, inv: Mapping | None = None,
               infinity=None, label: str = "", closed: bool = False) -> BbiModel:
    """Build a model, taking the commutative closure of `comp` unless `closed`."""
    carrier = tuple(carrier)
    comp = frozenset(map(tuple, comp)) if closed else close_commutative(comp)
    if inv is None:
        return BbiModel(carrier, comp, unit, label=label)
    return ResourceModel(carrier, comp, unit, dict(inv), infinity, label=label)


def from_function(carrier: Iterable, op, unit, inv=None, infinity=None, label: str = "") -> BbiModel:
    """Model whose composition is given by `op(x, y)` returning an iterable of results."""
    carrier = tuple(carrier)
    comp = [(x, y, z) for x in carrier for y in carrier for z in op(x, y)]
    inv_map = None if inv is None else {x: inv(x) for x in carrier}
    return make_model(carrier, comp, unit, inv_map, infinity, label, closed=True)


# ---------------------------------------------------------------- validation

@dataclass(frozen=True)
class ValidationReport:
    failures: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.failures

    def names(self) -> set[str]:
        return {name for name, _ in self.failures}

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "failures": [{"axiom": name, "witness": [element_id(w) for w in wit]} for name, wit in self.failures],
        }


MAX_WITNESSES = 25


class _Collector:
    def __init__(self):
        self.failures: list[tuple[str, tuple]] = []
        self.counts: dict[str, int] = {}

    def add(self, name: str, witness: tuple) -> None:
        c = self.counts.get(name, 0)
        self.counts[name] = c + 1
        if c < MAX_WITNESSES:
            self.failures.append((name, witness))


def _check_wellformed(m: BbiModel) -> None:
    problems = []
    if not m.carrier:
        problems.append("empty carrier")
    if len(set(m.carrier)) != len(m.carrier):
        problems.append("duplicate carrier elements")
    members = set(m.carrier)
    if m.unit not in members:
        problems.append(f"unit {m.unit!r} not in carrier")
    for t in m.comp:
        if len(t) != 3:
            problems.append(f"composition entry {t!r} is not a triple")
        elif not all(v in members for v in t):
            problems.append(f"composition triple {t!r} leaves the carrier")
    if isinstance(m, ResourceModel):
        if m.infinity not in members:
            problems.append(f"infinity {m.infinity!r} not in carrier")
        for x in m.carrier:
            if x not in m.inv:
                problems.append(f"inv undefined at {x!r}")
            elif m.inv[x] not in members:
                problems.append(f"inv({x!r}) = {m.inv[x]!r} not in carrier")
        for x in m.inv:
            if x not in members:
                problems.append(f"inv defined outside carrier at {x!r}")
    if problems:
        raise MalformedModelError(problems)


def _bbi_failures(m: BbiModel, out: _Collector) -> None:
    car = m.carrier
    n = len(car)
    cm = m.comp_masks
    e = m.unit_index
    for x, y, z in sorted(m.comp, key=lambda t: tuple(m.index[v] for v in t)):
        if (y, x, z) not in m.comp:
            out.add("commutativity", (x, y, z))
    for i in range(n):
        if cm[i][e] != 1 << i:
            out.add("unit", (car[i], m.unit))
    for i in range(n):
        row = cm[i]
        for j in range(n):
            ij = row[j]
            for k in range(n):
                jk = cm[j][k]
                if not ij and not jk:
                    continue
                left = 0
                for w in bits(jk):
                    left |= row[w]
                right = 0
                for v in bits(ij):
                    right |= cm[v][k]
                if left != right:
                    out.add("associativity", (car[i], car[j], car[k]))


def validate_bbi(m: BbiModel) -> ValidationReport:
    """Commutativity, unit law and associativity of the pointwise extension."""
    _check_wellformed(m)
    out = _Collector()
    _bbi_failures(m, out)
    return ValidationReport(tuple(out.failures))


def validate_cbi(m: ResourceModel) -> ValidationReport:
    """BBI checks, the dual axiom, and the derived involution laws as cross-checks."""
    if not isinstance(m, ResourceModel):
        raise MalformedModelError(["model has no involution / infinity"])
    _check_wellformed(m)
    out = _Collector()
    _bbi_failures(m, out)
    car = m.carrier
    n = len(car)
    cm = m.comp_masks
    inv = m.inv_index
    inf = m.infinity_index
    for i in range(n):
        duals = [j for j in range(n) if cm[i][j] >> inf & 1]
        if inv[i] not in duals:
            out.add("dual", (car[i], car[inv[i]]))
        if len(duals) != 1:
            out.add("uniqueness", (car[i],) + tuple(car[j] for j in duals))
    for i in range(n):
        if inv[inv[i]] != i:
            out.add("involution", (car[i],))
    if inv[m.unit_index] != inf:
        out.add("inv-unit", (m.unit,))
    for i in range(n):
        for j in range(n):
            for k in range(n):
                a = cm[i][j] >> k & 1
                b = cm[j][inv[k]] >> inv[i] & 1
                c = cm[i][inv[k]] >> inv[j] & 1
                if not a == b == c:
                    out.add("rotation", (car[i], car[j], car[k]))
    return ValidationReport(tuple(out.failures))


def is_partial_functional(m: BbiModel) -> bool:
    return all(len(m.compose(x, y)) <= 1 for x in m.carrier for y in m.carrier)


def is_effect_algebra(m: ResourceModel) -> bool:
    """Partial-functional with nonextensible infinity."""
    return is_partial_functional(m) and all(
        not m.compose(x, m.infinity) for x in m.carrier if x != m.unit)


def is_nonextensible(m: ResourceModel, x) -> bool:
    return all(not m.compose(x, y) for y in m.carrier if y != m.unit)


# ---------------------------------------------------------------- ids and JSON

def element_id(x: Any) -> str:
    """Deterministic string id for a structured element."""
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    if isinstance(x, (frozenset, set)):
        return "{" + ",".join(sorted((element_id(v) for v in x), key=_natural)) + "}"
    if isinstance(x, tuple):
        return "(" + ",".join(element_id(v) for v in x) + ")"
    return str(x)


def _natural(s: str):
    return (0, int(s), "") if s.lstrip("-").isdigit() else (1, 0, s)


def relabel(m: BbiModel, mapping: Mapping) -> BbiModel:
    """Rename elements through an injective mapping."""
    f = mapping.__getitem__ if isinstance(mapping, Mapping) else mapping
    carrier = tuple(f(x) for x in m.carrier)
    if len(set(carrier)) != len(carrier):
        raise ValueError("relabelling is not injective")
    comp = frozenset((f(x), f(y), f(z)) for x, y, z in m.comp)
    if isinstance(m, ResourceModel):
        inv = {f(x): f(m.inv[x]) for x in m.carrier}
        return ResourceModel(carrier, comp, f(m.unit), inv, f(m.infinity), label=m.label)
    return BbiModel(carrier, comp, f(m.unit), label=m.label)


def with_string_ids(m: BbiModel) -> BbiModel:
    return relabel(m, element_id)


def is_commutatively_closed(comp: frozenset) -> bool:
    return all((y, x, z) in comp for x, y, z in comp)


def model_to_json(m: BbiModel) -> dict:
    ids = {x: element_id(x) for x in m.carrier}
    if len(set(ids.values())) != len(ids):
        raise ValueError("element ids collide after stringification")
    order = m.index
    closed = is_commutatively_closed(m.comp)
    triples = sorted(m.comp, key=lambda t: tuple(order[v] for v in t))
    if closed:
        triples = [t for t in triples if order[t[0]] <= order[t[1]]]
    doc: dict[str, Any] = {"carrier": [ids[x] for x in m.carrier], "unit": ids[m.unit]}
    if isinstance(m, ResourceModel):
        doc["infinity"] = ids[m.infinity]
        doc["inv"] = {ids[x]: ids[m.inv[x]] for x in m.carrier}
    doc["comp"] = [[ids[v] for v in t] for t in triples]
    if not closed:
        doc["comp_closed"] = True
    if m.label:
        doc["label"] = m.label
    return doc


def model_from_json(doc: Mapping) -> BbiModel:
    try:
        carrier = [str(x) for x in doc["carrier"]]
        unit = str(doc["unit"])
        comp = [tuple(str(v) for v in t) for t in doc.get("comp", [])]
    except (KeyError, TypeError) as exc:
        raise MalformedModelError([f"missing or malformed field: {exc}"]) from None
    closed = bool(doc.get("comp_closed", False))
    label = str(doc.get("label", ""))
    if "inv" in doc or "infinity" in doc:
        if "inv" not in doc or "infinity" not in doc:
            raise MalformedModelError(["a CBI model needs both 'inv' and 'infinity'"])
        inv = {str(k): str(v) for k, v in doc["inv"].items()}
        return make_model(carrier, comp, unit, inv, str(doc["infinity"]), label, closed)
    return make_model(carrier, comp, unit, label=label, closed=closed)


# ---------------------------------------------------------------- isomorphism

def _refine(models: list[BbiModel], colors: list[list[int]]) -> list[list[int]]:
    """Colour refinement run jointly on several models so colours are comparable."""
    while True:
        table: dict = {}
        new = []
        for m, col in zip(models, colors):
            n = m.size
            out_sig: list[list] = [[] for _ in range(n)]
            in_sig: list[list] = [[] for _ in range(n)]
            cm = m.comp_masks
            for i in range(n):
                for j in range(n):
                    for k in bits(cm[i][j]):
                        out_sig[i].append((col[j], col[k]))
                        in_sig[k].append((col[i], col[j]))
            inv = m.inv_index if isinstance(m, ResourceModel) else None
            sigs = []
            for i in range(n):
                sigs.append((col[i], col[inv[i]] if inv else -1,
                             tuple(sorted(out_sig[i])), tuple(sorted(in_sig[i]))))
            new.append(sigs)
        keys = sorted(set(s for sigs in new for s in sigs))
        table = {s: c for c, s in enumerate(keys)}
        refined = [[table[s] for s in sigs] for sigs in new]
        if all(len(set(r)) == len(set(c)) for r, c in zip(refined, colors)):
            return refined
        colors = refined


def _initial_colors(m: BbiModel) -> list[int]:
    out = []
    for i in range(m.size):
        c = 1 if i == m.unit_index else 0
        if isinstance(m, ResourceModel):
            c += 2 if i == m.infinity_index else 0
        out.append(c)
    return out


def _is_isomorphism(a: BbiModel, b: BbiModel, perm: list[int]) -> bool:
    if perm[a.unit_index] != b.unit_index:
        return False
    ca, cb = a.comp_masks, b.comp_masks
    n = a.size
    for i in range(n):
        for j in range(n):
            img = 0
            for k in bits(ca[i][j]):
                img |= 1 << perm[k]
            if img != cb[perm[i]][perm[j]]:
                return False
    if isinstance(a, ResourceModel):
        if perm[a.infinity_index] != b.infinity_index:
            return False
        if any(perm[a.inv_index[i]] != b.inv_index[perm[i]] for i in range(n)):
            return False
    return True


def find_isomorphism(a: BbiModel, b: BbiModel) -> dict | None:
    """An isomorphism a → b as an element mapping, or None."""
    if a.size != b.size or len(a.comp) != len(b.comp):
        return None
    if isinstance(a, ResourceModel) != isinstance(b, ResourceModel):
        return None
    n = a.size

    def search(ca: list[int], cb: list[int]):
        ca, cb = _refine([a, b], [ca, cb])
        if sorted(ca) != sorted(cb):
            return None
        cells: dict[int, list[int]] = {}
        for i, c in enumerate(ca):
            cells.setdefault(c, []).append(i)
        if all(len(v) == 1 for v in cells.values()):
            where = {c: j for j, c in enumerate(cb)}
            perm = [where[ca[i]] for i in range(n)]
            return perm if _is_isomorphism(a, b, perm) else None
        colour, members = min(((c, v) for c, v in cells.items() if len(v) > 1), key=lambda cv: len(cv[1]))
        x = members[0]
        fresh = max(max(ca), max(cb)) + 1
        for y in (j for j, c in enumerate(cb) if c == colour):
            na, nb = list(ca), list(cb)
            na[x], nb[y] = fresh, fresh
            found = search(na, nb)
            if found is not None:
                return found
        return None

    perm = search(_initial_colors(a), _initial_colors(b))
    if perm is None:
        return None
    return {a.carrier[i]: b.carrier[perm[i]] for i in range(n)}


def isomorphic(a: BbiModel, b: BbiModel) -> bool:
    return find_isomorphism(a, b) is not None


def canonical_key(m: BbiModel, fixed: Iterable[int] = ()) -> tuple:
    """Lexicographically least relabelled table over permutations fixing the unit.

    Only intended for the tiny models produced by exhaustive enumeration.
    """
    n = m.size
    e = m.unit_index
    others = [i for i in range(n) if i != e]
    best = None
    for order in itertools.permutations(others):
        perm = [0] * n
        perm[e] = 0
        for new, old in enumerate(order, start=1):
            perm[old] = new
        triples = tuple(sorted((perm[m.index[x]], perm[m.index[y]], perm[m.index[z]]) for x, y, z in m.comp))
        extra = ()
        if isinstance(m, ResourceModel):
            extra = (perm[m.infinity_index],)
        key = (triples, extra)
        if best is None or key < best:
            best = key
    return best
