"""Proof trees, the proof checker, identity proofs and proof JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterator

from .display import (AE, ME, Comma, Consecution, Flat, Leaf, PostulateStep, Semi, Sharp,
                      consecution_formulas, consecution_from_json, consecution_subformulas,
                      consecution_to_json, iter_formulas, render_consecution)
from .formula import (BOT, MBOT, MTOP, TOP, And, Bot, Formula, Imp, MBot, MNot, MTop, Not, Or,
                      Par, Star, Top, Var, Wand, as_formula)
from .rules import DISPLAY_RULE, RULES, RuleInstanceError, canonical_rule_name, check_rule_instance


@dataclass(frozen=True)
class Proof:
    conclusion: Consecution
    rule: str
    premises: tuple = ()
    trace: tuple | None = None      # DisplayEq only: postulate steps from conclusion to premise
    direction: str | None = None    # bidirectional structural rules only

    def nodes(self, path: tuple = ()) -> Iterator[tuple[tuple, "Proof"]]:
        yield path, self
        for i, p in enumerate(self.premises):
            yield from p.nodes(path + (i,))

    @property
    def height(self) -> int:
        return 1 + max((p.height for p in self.premises), default=0)

    @property
    def size(self) -> int:
        return 1 + sum(p.size for p in self.premises)


def node_label(path: tuple) -> str:
    return "root" + "".join(f".{i}" for i in path)


@dataclass(frozen=True)
class ProofReport:
    ok: bool
    cut_free: bool
    subformula_ok: bool | None  # None when not checked (proof uses Cut)
    errors: tuple = ()          # (node label, message)

    def to_json(self) -> dict:
        return {"ok": self.ok, "cut_free": self.cut_free, "subformula_ok": self.subformula_ok,
                "errors": [{"node": n, "message": m} for n, m in self.errors]}


def check_proof(p: Proof) -> ProofReport:
    """Check every node against its rule; report cut-freeness and the subformula property."""
    errors = []
    cut_free = True
    for path, node in p.nodes():
        try:
            name = canonical_rule_name(node.rule)
        except KeyError as exc:
            errors.append((node_label(path), str(exc.args[0])))
            continue
        if name == "Cut":
            cut_free = False
        aux = {"trace": node.trace, "direction": node.direction}
        try:
            check_rule_instance(name, node.conclusion, [q.conclusion for q in node.premises], aux)
        except RuleInstanceError as exc:
            errors.append((node_label(path), str(exc)))
    sub_ok = None
    if cut_free:
        allowed = consecution_subformulas(p.conclusion)
        sub_ok = True
        for path, node in p.nodes():
            stray = [f for f in consecution_formulas(node.conclusion) if f not in allowed]
            if stray:
                sub_ok = False
                errors.append((node_label(path), "formula not a subformula of the end consecution: "
                               + ", ".join(_render(f) for f in stray)))
                break
    return ProofReport(not errors, cut_free, sub_ok, tuple(errors))


def _render(f: Formula) -> str:
    from .formula import render
    return render(f)


# ---------------------------------------------------------------- identity proofs

def _c(lhs, rhs) -> Consecution:
    wrap = lambda s: Leaf(s) if isinstance(s, Formula) else s
    return Consecution(wrap(lhs), wrap(rhs))


def _steps(*names: str) -> tuple:
    return tuple(PostulateStep.parse(s) for s in names)


def identity_proof(f) -> Proof:
    """A cut-free proof of (F ⊢ F) with Id used only on propositional variables."""
    f = as_formula(f)
    goal = _c(f, f)
    t = type(f)
    if t is Var:
        return Proof(goal, "Id")
    if t is Top:
        return Proof(goal, "TopL", (Proof(_c(AE, TOP), "TopR"),))
    if t is MTop:
        return Proof(goal, "MTopL", (Proof(_c(ME, MTOP), "MTopR"),))
    if t is Bot:
        return Proof(goal, "BotR", (Proof(_c(BOT, AE), "BotL"),))
    if t is MBot:
        return Proof(goal, "MBotR", (Proof(_c(MBOT, ME), "MBotL"),))
    if t in (Not, MNot):
        neg, fam, lr = (Sharp, "AD", "Not") if t is Not else (Flat, "MD", "MNot")
        a = f.arg
        inner = Proof(_c(neg(Leaf(a)), neg(Leaf(a))), DISPLAY_RULE, (identity_proof(a),),
                      trace=_steps(f"{fam}3a:bwd"))
        left = Proof(_c(f, neg(Leaf(a))), lr + "L", (inner,))
        return Proof(goal, lr + "R", (left,))
    a, b = f.left, f.right
    ida, idb = identity_proof(a), identity_proof(b)
    if t in (And, Star):
        op, name = (Semi, "And") if t is And else (Comma, "Star")
        right = Proof(_c(op(Leaf(a), Leaf(b)), f), name + "R", (ida, idb))
        return Proof(goal, name + "L", (right,))
    if t in (Or, Par):
        op, name = (Semi, "Or") if t is Or else (Comma, "Par")
        left = Proof(_c(f, op(Leaf(a), Leaf(b))), name + "L", (ida, idb))
        return Proof(goal, name + "R", (left,))
    if t in (Imp, Wand):
        op, neg, fam, name = ((Semi, Sharp, "AD", "Imp") if t is Imp else (Comma, Flat, "MD", "Wand"))
        left = Proof(_c(f, op(neg(Leaf(a)), Leaf(b))), name + "L", (ida, idb))
        disp = Proof(_c(op(Leaf(f), Leaf(a)), b), DISPLAY_RULE, (left,), trace=_steps(f"{fam}1a:fwd"))
        return Proof(goal, name + "R", (disp,))
    raise TypeError(f"no identity proof for {f!r}")


# ---------------------------------------------------------------- JSON

def proof_to_json(p: Proof) -> dict:
    doc: dict = {"conclusion": consecution_to_json(p.conclusion), "rule": p.rule}
    if p.direction is not None:
        doc["direction"] = p.direction
    if p.trace is not None:
        doc["trace"] = [str(s) for s in p.trace]
    doc["premises"] = [proof_to_json(q) for q in p.premises]
    return doc


class ProofFormatError(ValueError):
    pass


def proof_from_json(doc) -> Proof:
    """Rule names may be ASCII (e.g. TopL) or the symbolic aliases (e.g. ⊤L, ≡D)."""
    if isinstance(doc, str):
        doc = json.loads(doc)
    try:
        rule = canonical_rule_name(doc["rule"])
        trace = doc.get("trace")
        if trace is not None:
            trace = tuple(PostulateStep.parse(s) for s in trace)
        return Proof(consecution_from_json(doc["conclusion"]), rule,
                     tuple(proof_from_json(q) for q in doc.get("premises", [])),
                     trace, doc.get("direction"))
    except (KeyError, TypeError) as exc:
        raise ProofFormatError(f"malformed proof node: {exc}") from None


def render_proof(p: Proof, style: str = "ascii", indent: str = "") -> str:
    """Indented tree, conclusion first."""
    extra = ""
    if p.direction:
        extra = f" [{p.direction}]"
    if p.trace is not None:
        extra = " [" + ", ".join(str(s) for s in p.trace) + "]"
    lines = [f"{indent}{render_consecution(p.conclusion, style)}   ({p.rule}{extra})"]
    for q in p.premises:
        lines.append(render_proof(q, style, indent + "  "))
    return "\n".join(lines)
