"""The modal side: ML_CBI frames, diamond satisfaction, the eleven AX_CBI
axioms, very simple Sahlqvist shapes, and the translations between CBI
formulas/models and modal formulas/frames.

Modal formulas reuse the additive nodes of `formula` (Var, Top, Bot, Not,
And, Or, Imp) and add five modality nodes.  e, ∞, −, ∘ and ⊸ are diamonds:
−A is monotone in A, and A ⊸ B is monotone in both arguments.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterable, Mapping

import numpy as np

from . import formula as _fm
from .formula import (BOT, MBOT, MTOP, TOP, And, Bot, Dialect, Formula, Iff, Imp, MBot, MNot, MTop,
                      Not, Or, Par, Parser, Star, Top, Var, Wand)
from .models import ResourceModel, element_id, validate_cbi
from .semantics import BudgetExceeded, UnknownElementError, environment_of, valuation_arrays


# ---------------------------------------------------------------- syntax

@dataclass(frozen=True, slots=True)
class UnitMod(Formula):
    pass


@dataclass(frozen=True, slots=True)
class InftyMod(Formula):
    pass


@dataclass(frozen=True, slots=True)
class InvMod(Formula):
    arg: Formula

    def children(self):
        return (self.arg,)


@dataclass(frozen=True, slots=True)
class CompMod(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


@dataclass(frozen=True, slots=True)
class CoWandMod(Formula):
    left: Formula
    right: Formula

    def children(self):
        return (self.left, self.right)


E, INF = UnitMod(), InftyMod()
MODAL_TYPES = (Var, Top, Bot, Not, And, Or, Imp, UnitMod, InftyMod, InvMod, CompMod, CoWandMod)
for _cls in (UnitMod, InftyMod, InvMod, CompMod, CoWandMod):
    _cls.__hash__ = _fm.typed_hash

_fm.EXTRA_CONST[UnitMod] = ("E", "e", "e")
_fm.EXTRA_CONST[InftyMod] = ("INF", "∞", r"\infty")
_fm.EXTRA_UNARY[InvMod] = ("-.", "−", "-")
_fm.EXTRA_BINARY[CompMod] = ("o", "o", "∘", r"\circ")
_fm.EXTRA_BINARY[CoWandMod] = ("o-", "o-", "⊸", r"\mathbin{-\!\bullet}")

MODAL = Dialect(modal=True)

_MODAL_BINARY = {"&": And, "|": Or, "->": Imp, "o": CompMod, "o-": CoWandMod}
_MODAL_CONSTS = {"top": TOP, "bot": BOT, "E": E, "INF": INF}


def _modal_atom(t):
    if t.kind == "ident":
        return Var(t.text)
    return _MODAL_CONSTS[t.kind]


def _modal_prefix(kind: str, arg: Formula) -> Formula:
    return Not(arg) if kind == "!" else InvMod(arg)


def _modal_binary(kind: str, left: Formula, right: Formula) -> Formula:
    if kind == "<->":
        return Iff(left, right)
    return _MODAL_BINARY[kind](left, right)


def parse_modal(text: str) -> Formula:
    """Parse a modal formula: the additive grammar plus E, INF, -., o and o-."""
    p = Parser(text, MODAL, _modal_atom, _modal_prefix, _modal_binary)
    # multiplicative CBI connectives are not modal syntax
    p.atom_kinds -= {"emp", "coemp"}
    p.prefix_kinds -= {"~"}
    p.binary_kinds -= {"*", "|*", "-*"}
    return p.parse_all()


def is_modal(a: Formula) -> bool:
    return type(a) in MODAL_TYPES and all(is_modal(c) for c in a.children())


# ---------------------------------------------------------------- frames

@dataclass(frozen=True)
class MLFrame:
    carrier: tuple
    comp: frozenset            # (x, y, z): z ∈ x∘y
    cowand: frozenset          # (x, y, z): z ∈ x⊸y
    unit_set: frozenset
    inv: Mapping = field(hash=False)   # x -> frozenset, the set −x
    infinity_set: frozenset = frozenset()
    label: str = field(default="", compare=False, kw_only=True)

    def __post_init__(self) -> None:
        members = set(self.carrier)
        problems = []
        if len(members) != len(self.carrier):
            problems.append("carrier has repeated elements")
        for name, triples in (("comp", self.comp), ("cowand", self.cowand)):
            bad = [t for t in triples if len(t) != 3 or any(v not in members for v in t)]
            if bad:
                problems.append(f"{name} mentions elements outside the carrier: {bad[:3]!r}")
        for name, s in (("unit_set", self.unit_set), ("infinity_set", self.infinity_set)):
            if not set(s) <= members:
                problems.append(f"{name} is not a subset of the carrier")
        if set(self.inv) - members:
            problems.append("inv has keys outside the carrier")
        if any(not set(v) <= members for v in self.inv.values()):
            problems.append("inv maps into elements outside the carrier")
        if problems:
            raise ValueError("; ".join(problems))

    @cached_property
    def index(self) -> dict:
        return {x: i for i, x in enumerate(self.carrier)}

    @property
    def size(self) -> int:
        return len(self.carrier)

    @property
    def unitary(self) -> bool:
        return len(self.unit_set) == 1

    def inv_of(self, x) -> frozenset:
        return frozenset(self.inv.get(x, ()))

    def _tensor(self, triples) -> np.ndarray:
        n, idx = self.size, self.index
        t = np.zeros((n, n, n), dtype=bool)
        for x, y, z in triples:
            t[idx[x], idx[y], idx[z]] = True
        return t

    @cached_property
    def comp_tensor(self) -> np.ndarray:
        return self._tensor(self.comp)

    @cached_property
    def cowand_tensor(self) -> np.ndarray:
        return self._tensor(self.cowand)

    @cached_property
    def inv_matrix(self) -> np.ndarray:
        """inv_matrix[i, j]: x_j ∈ −x_i."""
        n, idx = self.size, self.index
        t = np.zeros((n, n), dtype=bool)
        for x, ys in self.inv.items():
            for y in ys:
                t[idx[x], idx[y]] = True
        return t

    def _mask(self, s) -> np.ndarray:
        out = np.zeros(self.size, dtype=bool)
        for x in s:
            out[self.index[x]] = True
        return out


def make_frame(carrier: Iterable, comp: Iterable, cowand: Iterable, unit_set: Iterable,
               inv: Mapping, infinity_set: Iterable, label: str = "") -> MLFrame:
    carrier = tuple(carrier)
    return MLFrame(carrier, frozenset(map(tuple, comp)), frozenset(map(tuple, cowand)),
                   frozenset(unit_set), {x: frozenset(inv.get(x, ())) for x in carrier},
                   frozenset(infinity_set), label=label)


def frame_to_json(fr: MLFrame) -> dict:
    ids = {x: element_id(x) for x in fr.carrier}
    if len(set(ids.values())) != len(ids):
        raise ValueError("element ids collide after stringification")
    order = fr.index
    key = lambda t: tuple(order[v] for v in t)
    doc: dict[str, Any] = {
        "carrier": [ids[x] for x in fr.carrier],
        "unit_set": [ids[x] for x in sorted(fr.unit_set, key=order.get)],
        "infinity_set": [ids[x] for x in sorted(fr.infinity_set, key=order.get)],
        "inv": {ids[x]: [ids[y] for y in sorted(fr.inv_of(x), key=order.get)] for x in fr.carrier},
        "comp": [[ids[v] for v in t] for t in sorted(fr.comp, key=key)],
        "cowand": [[ids[v] for v in t] for t in sorted(fr.cowand, key=key)],
    }
    if fr.label:
        doc["label"] = fr.label
    return doc


def frame_from_json(doc: Mapping) -> MLFrame:
    try:
        s = lambda xs: [str(x) for x in xs]
        return make_frame(s(doc["carrier"]), [tuple(s(t)) for t in doc.get("comp", [])],
                          [tuple(s(t)) for t in doc.get("cowand", [])], s(doc["unit_set"]),
                          {str(k): s(v) for k, v in doc.get("inv", {}).items()},
                          s(doc.get("infinity_set", [])), str(doc.get("label", "")))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed frame: missing or malformed field {exc}") from None


# ---------------------------------------------------------------- satisfaction

def msat(fr: MLFrame, env: Mapping[str, frozenset], r, a: Formula) -> bool:
    """r ⊨ρ a, with the modalities read as diamonds."""
    if r not in fr.index:
        raise UnknownElementError(f"{r!r} is not an element of the frame")
    return _msat(fr, env, r, a)


def _msat(fr, env, r, a) -> bool:
    t = type(a)
    if t is Var:
        return r in env.get(a.name, ())
    if t is Top:
        return True
    if t is Bot:
        return False
    if t is Not:
        return not _msat(fr, env, r, a.arg)
    if t is And:
        return _msat(fr, env, r, a.left) and _msat(fr, env, r, a.right)
    if t is Or:
        return _msat(fr, env, r, a.left) or _msat(fr, env, r, a.right)
    if t is Imp:
        return not _msat(fr, env, r, a.left) or _msat(fr, env, r, a.right)
    if t is UnitMod:
        return r in fr.unit_set
    if t is InftyMod:
        return r in fr.infinity_set
    if t is InvMod:
        return any(r in fr.inv_of(r1) and _msat(fr, env, r1, a.arg) for r1 in fr.carrier)
    if t in (CompMod, CoWandMod):
        triples = fr.comp if t is CompMod else fr.cowand
        return any(z == r and _msat(fr, env, x, a.left) and _msat(fr, env, y, a.right)
                   for x, y, z in triples)
    raise TypeError(f"not a modal formula: {a!r}")


class ModalEvaluator:
    """Denotations as boolean arrays of shape (environments, carrier)."""

    def __init__(self, fr: MLFrame):
        self.fr = fr
        self.n = fr.size
        self.comp = fr.comp_tensor
        self.cowand = fr.cowand_tensor
        self.inv = fr.inv_matrix.astype(np.int32)
        self.unit = fr._mask(fr.unit_set)
        self.inf = fr._mask(fr.infinity_set)

    @staticmethod
    def diamond2(t: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # res[e, z] = ∃x,y. a[e,x] ∧ b[e,y] ∧ t[x,y,z]
        u = np.tensordot(a, t, axes=([1], [0]))  # (E, y, z)
        return np.any(u & b[:, :, None], axis=1)

    def denote(self, a: Formula, val: Mapping[str, np.ndarray], batch: int,
               memo: dict | None = None) -> np.ndarray:
        return self._denote(a, val, batch, {} if memo is None else memo)

    def _denote(self, a, val, batch, memo):
        hit = memo.get(a)
        if hit is not None:
            return hit
        t = type(a)
        d = lambda sub: self._denote(sub, val, batch, memo)
        if t is Var:
            out = val.get(a.name)
            if out is None:
                out = np.zeros((batch, self.n), dtype=bool)
        elif t is Top:
            out = np.ones((batch, self.n), dtype=bool)
        elif t is Bot:
            out = np.zeros((batch, self.n), dtype=bool)
        elif t is UnitMod:
            out = np.broadcast_to(self.unit, (batch, self.n)).copy()
        elif t is InftyMod:
            out = np.broadcast_to(self.inf, (batch, self.n)).copy()
        elif t is Not:
            out = ~d(a.arg)
        elif t is And:
            out = d(a.left) & d(a.right)
        elif t is Or:
            out = d(a.left) | d(a.right)
        elif t is Imp:
            out = ~d(a.left) | d(a.right)
        elif t is InvMod:
            out = (d(a.arg).astype(np.int32) @ self.inv) > 0
        elif t is CompMod:
            out = self.diamond2(self.comp, d(a.left), d(a.right))
        elif t is CoWandMod:
            out = self.diamond2(self.cowand, d(a.left), d(a.right))
        else:
            raise TypeError(f"not a modal formula: {a!r}")
        memo[a] = out
        return out


def _chunk(n: int) -> int:
    return max(1, min(1 << 14, (1 << 22) // max(1, n * n)))


def _variables(a: Formula) -> list[str]:
    return sorted({s.name for s in _fm.iter_subterms(a) if type(s) is Var})


def find_modal_falsifier(fr: MLFrame, a: Formula, cap: int = 1 << 20):
    """First (environment, point) where a fails, or None when a is true in fr."""
    names = _variables(a)
    n = fr.size
    total = 1 << (n * len(names))
    if total > cap:
        raise BudgetExceeded(total, cap)
    ev = ModalEvaluator(fr)
    step = _chunk(n)
    for start in range(0, total, step):
        stop = min(total, start + step)
        den = ev.denote(a, valuation_arrays(n, names, start, stop), stop - start)
        bad = np.argwhere(~den)
        if len(bad):
            e, i = bad[0]
            return environment_of(fr, names, start + int(e)), fr.carrier[int(i)]
    return None


def mtruth(fr: MLFrame, a: Formula, cap: int = 1 << 20) -> bool:
    """a holds at every point of fr under every environment over its variables."""
    return find_modal_falsifier(fr, a, cap) is None


# ---------------------------------------------------------------- axioms

AXIOM_TEXT: dict[int, str] = {
    1: "E o P -> P",
    2: "P -> E o P",
    3: "P o Q -> Q o P",
    4: "(P o Q) o R -> P o (Q o R)",
    5: "P o (Q o R) -> (P o Q) o R",
    6: "Q & (R o P) -> (R & (P o- Q)) o top",
    7: "R & (P o- Q) -> (top o- (Q & (R o P)))",
    8: "-.-.P -> P",
    9: "P -> -.-.P",
    10: "-.P -> (P o- INF)",
    11: "(P o- INF) -> -.P",
}
AXIOMS: dict[int, Formula] = {k: parse_modal(v) for k, v in AXIOM_TEXT.items()}
EXACT_LIMIT = 6
DEFAULT_SAMPLES = 4096


@dataclass(frozen=True)
class AxiomReport:
    results: dict             # axiom id -> bool
    unitary: bool
    sampled: bool
    witnesses: dict = field(default_factory=dict)  # axiom id -> (env, point)

    @property
    def all_hold(self) -> bool:
        return all(self.results.values())

    @property
    def failing(self) -> list[int]:
        return [k for k, v in sorted(self.results.items()) if not v]

    def to_json(self) -> dict:
        wit = {}
        for k, (env, point) in self.witnesses.items():
            wit[str(k)] = {"env": {v: sorted(map(element_id, s)) for v, s in env.items()},
                           "point": element_id(point)}
        return {"axioms": {str(k): v for k, v in sorted(self.results.items())},
                "passed": sum(self.results.values()), "total": len(self.results),
                "unitary": self.unitary, "sampled": self.sampled, "witnesses": wit}


def _sampled_falsifier(fr: MLFrame, a: Formula, samples: int, seed: int):
    names = _variables(a)
    rng = np.random.default_rng(seed)
    ev = ModalEvaluator(fr)
    n = fr.size
    val = {v: rng.random((samples, n)) < 0.5 for v in names}
    den = ev.denote(a, val, samples)
    bad = np.argwhere(~den)
    if not len(bad):
        return None
    e, i = bad[0]
    env = {v: frozenset(fr.carrier[j] for j in range(n) if val[v][e, j]) for v in names}
    return env, fr.carrier[int(i)]


def check_axioms(fr: MLFrame, axioms: Iterable[int] = tuple(AXIOMS), mode: str = "auto",
                 samples: int = DEFAULT_SAMPLES, seed: int = 0, cap: int = 1 << 24) -> AxiomReport:
    """Check each axiom under every subset-valued instantiation of P, Q, R.

    mode "auto" is exact up to EXACT_LIMIT elements and sampled above; "exact"
    raises BudgetExceeded when 8^|R| exceeds `cap`; "sampled" draws `samples`
    random instantiations with a fixed seed and marks the report as sampled.
    """
    if mode not in ("auto", "exact", "sampled"):
        raise ValueError("mode must be auto, exact or sampled")
    sampled = mode == "sampled" or (mode == "auto" and fr.size > EXACT_LIMIT)
    results, witnesses = {}, {}
    for k in axioms:
        a = AXIOMS[k]
        if sampled:
            bad = _sampled_falsifier(fr, a, samples, seed + k)
        else:
            bad = find_modal_falsifier(fr, a, cap)
        results[k] = bad is None
        if bad is not None:
            witnesses[k] = bad
    return AxiomReport(results, fr.unitary, sampled, witnesses)


# ---------------------------------------------------------------- Sahlqvist shapes

_S_LEAVES = (Top, Bot, Var, UnitMod, InftyMod)
_S_NODES = (And, InvMod, CompMod, CoWandMod)


def is_sahlqvist_antecedent(a: Formula) -> bool:
    t = type(a)
    if t in _S_LEAVES:
        return True
    return t in _S_NODES and all(is_sahlqvist_antecedent(c) for c in a.children())


def is_positive(a: Formula, negative: bool = False) -> bool:
    """No variable under an odd number of negations.

    An implication A → B is read as ¬A ∨ B, so its antecedent flips parity.
    """
    t = type(a)
    if t is Var:
        return not negative
    if t is Not:
        return is_positive(a.arg, not negative)
    if t is Imp:
        return is_positive(a.left, not negative) and is_positive(a.right, negative)
    return all(is_positive(c, negative) for c in a.children())


def is_very_simple_sahlqvist(a: Formula) -> bool:
    return type(a) is Imp and is_sahlqvist_antecedent(a.left) and is_positive(a.right)


# ---------------------------------------------------------------- translations

def embed_formula(f: Formula) -> Formula:
    """⌊F⌋: CBI formula to modal formula."""
    t = type(f)
    if t in (Var, Top, Bot):
        return f
    if t is MTop:
        return E
    if t is MBot:
        return Not(INF)
    if t is Not:
        return Not(embed_formula(f.arg))
    if t is MNot:
        return Not(InvMod(embed_formula(f.arg)))
    if t in (And, Or, Imp):
        return t(embed_formula(f.left), embed_formula(f.right))
    if t is Star:
        return CompMod(embed_formula(f.left), embed_formula(f.right))
    if t is Wand:
        return Not(CoWandMod(embed_formula(f.left), Not(embed_formula(f.right))))
    if t is Par:
        return Not(InvMod(CompMod(Not(InvMod(embed_formula(f.left))),
                                  Not(InvMod(embed_formula(f.right))))))
    raise TypeError(f"not a CBI formula: {f!r}")


def revembed_formula(a: Formula) -> Formula:
    """⌈A⌉: modal formula to CBI formula."""
    t = type(a)
    if t in (Var, Top, Bot):
        return a
    if t is UnitMod:
        return MTOP
    if t is InftyMod:
        return Not(MBOT)
    if t is Not:
        return Not(revembed_formula(a.arg))
    if t is InvMod:
        return Not(MNot(revembed_formula(a.arg)))
    if t in (And, Or, Imp):
        return t(revembed_formula(a.left), revembed_formula(a.right))
    if t is CompMod:
        return Star(revembed_formula(a.left), revembed_formula(a.right))
    if t is CoWandMod:
        return Not(Wand(revembed_formula(a.left), Not(revembed_formula(a.right))))
    raise TypeError(f"not a modal formula: {a!r}")


def embed_model(m: ResourceModel) -> MLFrame:
    """⌈M⌉, with X ⊸ Y = {z | ∃x∈X, y∈Y. y ∈ x∘z} materialized as triples."""
    cowand = frozenset((x, y, z) for x, z, y in m.comp)
    return MLFrame(m.carrier, m.comp, cowand, frozenset([m.unit]),
                   {x: frozenset([m.inv[x]]) for x in m.carrier}, frozenset([m.infinity]),
                   label=f"embed({m.label})" if m.label else "")


class FrameError(ValueError):
    """A frame-level precondition fails; `axiom` names the failing axiom if any."""

    def __init__(self, message: str, axiom: int | None = None):
        self.axiom = axiom
        super().__init__(message)


def extract_cbi(fr: MLFrame, mode: str = "auto") -> ResourceModel:
    """The CBI-model of a unitary AX_CBI frame (inverse of embed_model)."""
    if not fr.unitary:
        raise FrameError(f"frame is not unitary: the unit set has {len(fr.unit_set)} elements")
    report = check_axioms(fr, mode=mode)
    if not report.all_hold:
        k = report.failing[0]
        raise FrameError(f"frame fails axiom {k}: {AXIOM_TEXT[k]}", axiom=k)
    (unit,) = fr.unit_set
    if len(fr.infinity_set) != 1 or any(len(fr.inv_of(x)) != 1 for x in fr.carrier):
        raise FrameError("infinity or an inverse is not a singleton")
    (inf,) = fr.infinity_set
    label = fr.label[len("embed("):-1] if fr.label.startswith("embed(") else fr.label
    m = ResourceModel(fr.carrier, fr.comp, unit, {x: next(iter(fr.inv_of(x))) for x in fr.carrier},
                      inf, label=label)
    rep = validate_cbi(m)
    if not rep.ok:
        raise FrameError(f"extracted structure is not a CBI-model: {rep.failures[0]}")
    return m


def restrict_frame(fr: MLFrame, keep: Iterable, unit_set: Iterable, label: str = "") -> MLFrame:
    keep = frozenset(keep)
    inside = lambda t: all(v in keep for v in t)
    return MLFrame(tuple(x for x in fr.carrier if x in keep),
                   frozenset(t for t in fr.comp if inside(t)),
                   frozenset(t for t in fr.cowand if inside(t)),
                   frozenset(unit_set) & keep,
                   {x: fr.inv_of(x) & keep for x in fr.carrier if x in keep},
                   fr.infinity_set & keep, label=label)


def decompose_unitary(fr: MLFrame, mode: str = "auto") -> list[MLFrame]:
    """The unitary frames M_x (x ∈ e) on R_x = {r | r∘x ≠ ∅}; they partition fr."""
    report = check_axioms(fr, axioms=(1, 2, 3, 4, 5), mode=mode)
    if not report.all_hold:
        k = report.failing[0]
        raise FrameError(f"frame fails axiom {k}: {AXIOM_TEXT[k]}", axiom=k)
    order = fr.index
    defined = {(x, y) for x, y, _ in fr.comp}
    parts = []
    for x in sorted(fr.unit_set, key=order.get):
        rx = {r for r in fr.carrier if (r, x) in defined}
        parts.append(restrict_frame(fr, rx, {x}, label=f"{fr.label}[{element_id(x)}]"))
    seen: list = [r for p in parts for r in p.carrier]
    if len(seen) != len(set(seen)) or set(seen) != set(fr.carrier):
        raise FrameError("the components R_x do not partition the carrier")
    return parts


def frame_sum(*frames: MLFrame, label: str = "") -> MLFrame:
    """Disjoint union of frames; element x of the i-th frame becomes f"{i}:{x}"."""
    tag = lambda i, x: f"{i}:{element_id(x)}"
    carrier, comp, cowand, units, infs, inv = [], set(), set(), set(), set(), {}
    for i, fr in enumerate(frames):
        carrier += [tag(i, x) for x in fr.carrier]
        comp |= {tuple(tag(i, v) for v in t) for t in fr.comp}
        cowand |= {tuple(tag(i, v) for v in t) for t in fr.cowand}
        units |= {tag(i, x) for x in fr.unit_set}
        infs |= {tag(i, x) for x in fr.infinity_set}
        inv.update({tag(i, x): {tag(i, y) for y in fr.inv_of(x)} for x in fr.carrier})
    return make_frame(carrier, comp, cowand, units, inv, infs, label)


def modal_formulas(names: Iterable[str], max_size: int):
    """Every modal formula over `names` with at most `max_size` nodes."""
    leaves = [Var(v) for v in names] + [TOP, BOT, E, INF]
    by_size: dict[int, list[Formula]] = {1: leaves}
    for s in range(2, max_size + 1):
        out = [u(a) for a in by_size[s - 1] for u in (Not, InvMod)]
        for i in range(1, s - 1):
            for a, b in itertools.product(by_size[i], by_size[s - 1 - i]):
                out += [c(a, b) for c in (And, Or, Imp, CompMod, CoWandMod)]
        by_size[s] = out
    for s in range(1, max_size + 1):
        yield from by_size[s]
