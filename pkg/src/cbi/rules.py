"""The proof rules of the display calculus as schemata, instance checking
against them, and the static Belnap-condition audit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .display import (AE, ME, POSTULATES, _field_names, Comma, Consecution, Flat, FMeta, Leaf, PMeta, PostulateStep,
                      SVar, Semi, ShapeMismatch, Sharp, Structure, apply_postulate, instantiate,
                      render_consecution, render_structure)
from .formula import (BOT, MBOT, MTOP, TOP, And, Formula, Imp, MNot, Not, Or, Par, Star, Wand,
                      render as render_formula)

W, X, Y, Z = SVar("W"), SVar("X"), SVar("Y"), SVar("Z")
F, G = FMeta("F"), FMeta("G")
P = PMeta("P")


def _c(lhs, rhs) -> Consecution:
    wrap = lambda s: Leaf(s) if isinstance(s, Formula) else s
    return Consecution(wrap(lhs), wrap(rhs))


@dataclass(frozen=True)
class Rule:
    name: str
    premises: tuple
    conclusion: Consecution
    bidirectional: bool = False
    kind: str = "logical"  # identity | logical | structural | postulate | test
    alias: str = ""


def _r(name, premises, conclusion, alias="", bidirectional=False, kind="logical") -> Rule:
    return Rule(name, tuple(premises), conclusion, bidirectional, kind, alias)


RULES: dict[str, Rule] = {r.name: r for r in [
    _r("Id", [], _c(P, P), kind="identity"),
    _r("Cut", [_c(X, F), _c(F, Y)], _c(X, Y), kind="identity"),
    _r("TopL", [_c(AE, X)], _c(TOP, X), "⊤L"),
    _r("TopR", [], _c(AE, TOP), "⊤R"),
    _r("BotL", [], _c(BOT, AE), "⊥L"),
    _r("BotR", [_c(X, AE)], _c(X, BOT), "⊥R"),
    _r("NotL", [_c(Sharp(Leaf(F)), X)], _c(Not(F), X), "¬L"),
    _r("NotR", [_c(X, Sharp(Leaf(F)))], _c(X, Not(F)), "¬R"),
    _r("AndL", [_c(Semi(Leaf(F), Leaf(G)), X)], _c(And(F, G), X), "∧L"),
    _r("AndR", [_c(X, F), _c(Y, G)], _c(Semi(X, Y), And(F, G)), "∧R"),
    _r("OrL", [_c(F, X), _c(G, Y)], _c(Or(F, G), Semi(X, Y)), "∨L"),
    _r("OrR", [_c(X, Semi(Leaf(F), Leaf(G)))], _c(X, Or(F, G)), "∨R"),
    _r("ImpL", [_c(X, F), _c(G, Y)], _c(Imp(F, G), Semi(Sharp(X), Y)), "→L"),
    _r("ImpR", [_c(Semi(X, Leaf(F)), G)], _c(X, Imp(F, G)), "→R"),
    _r("MTopL", [_c(ME, X)], _c(MTOP, X), "⊤*L"),
    _r("MTopR", [], _c(ME, MTOP), "⊤*R"),
    _r("MBotL", [], _c(MBOT, ME), "⊥*L"),
    _r("MBotR", [_c(X, ME)], _c(X, MBOT), "⊥*R"),
    _r("MNotL", [_c(Flat(Leaf(F)), X)], _c(MNot(F), X), "∼L"),
    _r("MNotR", [_c(X, Flat(Leaf(F)))], _c(X, MNot(F)), "∼R"),
    _r("StarL", [_c(Comma(Leaf(F), Leaf(G)), X)], _c(Star(F, G), X), "∗L"),
    _r("StarR", [_c(X, F), _c(Y, G)], _c(Comma(X, Y), Star(F, G)), "∗R"),
    _r("ParL", [_c(F, X), _c(G, Y)], _c(Par(F, G), Comma(X, Y)), "⅋L"),
    _r("ParR", [_c(X, Comma(Leaf(F), Leaf(G)))], _c(X, Par(F, G)), "⅋R"),
    _r("WandL", [_c(X, F), _c(G, Y)], _c(Wand(F, G), Comma(Flat(X), Y)), "—∗L"),
    _r("WandR", [_c(Comma(X, Leaf(F)), G)], _c(X, Wand(F, G)), "—∗R"),
    _r("AAL", [_c(Semi(W, Semi(X, Y)), Z)], _c(Semi(Semi(W, X), Y), Z), bidirectional=True, kind="structural"),
    _r("AAR", [_c(W, Semi(Semi(X, Y), Z))], _c(W, Semi(X, Semi(Y, Z))), bidirectional=True, kind="structural"),
    _r("MAL", [_c(Comma(W, Comma(X, Y)), Z)], _c(Comma(Comma(W, X), Y), Z), bidirectional=True,
       kind="structural"),
    _r("MAR", [_c(W, Comma(Comma(X, Y), Z))], _c(W, Comma(X, Comma(Y, Z))), bidirectional=True,
       kind="structural"),
    _r("AEL", [_c(Semi(AE, X), Y)], _c(X, Y), "∅L", bidirectional=True, kind="structural"),
    _r("AER", [_c(X, Semi(Y, AE))], _c(X, Y), "∅R", bidirectional=True, kind="structural"),
    _r("MEL", [_c(Comma(ME, X), Y)], _c(X, Y), "⊘L", bidirectional=True, kind="structural"),
    _r("MER", [_c(X, Comma(Y, ME))], _c(X, Y), "⊘R", bidirectional=True, kind="structural"),
    _r("WkL", [_c(X, Z)], _c(Semi(X, Y), Z), kind="structural"),
    _r("WkR", [_c(X, Z)], _c(X, Semi(Y, Z)), kind="structural"),
    _r("CtrL", [_c(Semi(X, X), Z)], _c(X, Z), kind="structural"),
    _r("CtrR", [_c(X, Semi(Z, Z))], _c(X, Z), kind="structural"),
]}

DISPLAY_RULE = "DisplayEq"
RULE_NAMES = tuple(RULES) + (DISPLAY_RULE,)

_ALIASES = {r.alias: r.name for r in RULES.values() if r.alias}
_ALIASES.update({"≡D": DISPLAY_RULE, "=D": DISPLAY_RULE, "DisplayEq": DISPLAY_RULE})


def canonical_rule_name(name: str) -> str:
    if name in RULES or name == DISPLAY_RULE:
        return name
    if name in _ALIASES:
        return _ALIASES[name]
    raise KeyError(f"unknown rule {name!r}")


# ---------------------------------------------------------------- instance checking

class RuleInstanceError(ValueError):
    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{message} (at {where})" if where else message)


def _show(x) -> str:
    if isinstance(x, Structure):
        return render_structure(x)
    if isinstance(x, Formula):
        return render_formula(x) if not isinstance(x, (FMeta, PMeta)) else x.name
    return repr(x)


def _mismatch(pattern, term, binding: dict, where: str) -> str | None:
    """None if `term` matches `pattern` (extending binding); else the first differing position."""
    if isinstance(pattern, (SVar, FMeta, PMeta)):
        if isinstance(pattern, SVar) and not isinstance(term, Structure):
            return where
        if isinstance(pattern, FMeta) and not isinstance(term, Formula):
            return where
        if isinstance(pattern, PMeta):
            from .formula import Var
            if not isinstance(term, Var):
                return f"{where}: {_show(term)} is not a propositional variable"
        if pattern.name in binding:
            if binding[pattern.name] != term:
                return (f"{where}: {pattern.name} is already {_show(binding[pattern.name])}, "
                        f"found {_show(term)}")
            return None
        binding[pattern.name] = term
        return None
    if type(pattern) is not type(term):
        return f"{where}: expected {type(pattern).__name__}, found {_show(term)}"
    if isinstance(pattern, Consecution):
        return (_mismatch(pattern.lhs, term.lhs, binding, f"{where}.lhs")
                or _mismatch(pattern.rhs, term.rhs, binding, f"{where}.rhs"))
    names = _field_names(type(pattern))
    for n in names:
        a, b = getattr(pattern, n), getattr(term, n)
        if isinstance(a, (Structure, Formula)):
            bad = _mismatch(a, b, binding, f"{where}.{n}")
            if bad:
                return bad
        elif a != b:
            return f"{where}.{n}: expected {a!r}, found {b!r}"
    return None


def oriented(rule: Rule, direction: str | None) -> tuple[tuple, Consecution]:
    """(premise patterns, conclusion pattern) for the direction used."""
    if direction in (None, "fwd"):
        return rule.premises, rule.conclusion
    if direction == "bwd":
        if not rule.bidirectional:
            raise RuleInstanceError(f"{rule.name} is not bidirectional")
        (prem,) = rule.premises
        return (rule.conclusion,), prem
    raise RuleInstanceError(f"unknown direction {direction!r}")


def check_rule_instance(rule: str, conclusion: Consecution, premises: Sequence[Consecution],
                        aux: dict | None = None) -> None:
    """Raise RuleInstanceError unless the inference is an instance of the named rule."""
    aux = aux or {}
    name = canonical_rule_name(rule)
    if name == DISPLAY_RULE:
        _check_display(conclusion, premises, aux.get("trace"))
        return
    r = RULES[name]
    direction = aux.get("direction")
    if direction is not None and not r.bidirectional:
        raise RuleInstanceError(f"{name} is not bidirectional but a direction was given")
    prem_pats, concl_pat = oriented(r, direction)
    if len(premises) != len(prem_pats):
        raise RuleInstanceError(f"{name} takes {len(prem_pats)} premises, got {len(premises)}")
    binding: dict = {}
    bad = _mismatch(concl_pat, conclusion, binding, "conclusion")
    if bad:
        raise RuleInstanceError(f"{name}: conclusion does not match "
                                f"{render_consecution(concl_pat)}", bad)
    for i, (pat, prem) in enumerate(zip(prem_pats, premises)):
        bad = _mismatch(pat, prem, binding, f"premise[{i}]")
        if bad:
            raise RuleInstanceError(f"{name}: premise {i} does not match "
                                    f"{render_consecution(pat)}", bad)


def _check_display(conclusion: Consecution, premises: Sequence[Consecution], trace) -> None:
    if len(premises) != 1:
        raise RuleInstanceError(f"DisplayEq takes 1 premise, got {len(premises)}")
    if trace is None:
        raise RuleInstanceError("DisplayEq needs an explicit postulate trace")
    cur = conclusion
    for i, step in enumerate(trace):
        if not isinstance(step, PostulateStep):
            step = PostulateStep.parse(str(step))
        try:
            cur = apply_postulate(cur, step)
        except ShapeMismatch as exc:
            raise RuleInstanceError(str(exc), f"trace[{i}]") from None
    if cur != premises[0]:
        raise RuleInstanceError(f"trace replay reaches {render_consecution(cur)}, "
                                f"not the premise {render_consecution(premises[0])}", "premise[0]")


# ---------------------------------------------------------------- Belnap audit

def _var_positions(x, negs: int, side: str, out: list) -> None:
    """(name, kind) occurrences of metavariables with their part classification."""
    if isinstance(x, SVar):
        pos = "antecedent" if (negs % 2 == 0) == (side == "lhs") else "consequent"
        out.append((x.name, "structure", pos))
        return
    if isinstance(x, Leaf):
        for f in _formula_metas(x.formula):
            out.append((f, "formula", None))
        return
    if isinstance(x, (Sharp, Flat)):
        _var_positions(x.arg, negs + 1, side, out)
    elif isinstance(x, (Semi, Comma)):
        _var_positions(x.left, negs, side, out)
        _var_positions(x.right, negs, side, out)


def _formula_metas(f) -> list[str]:
    if isinstance(f, (FMeta, PMeta)):
        return [f.name]
    out = []
    for k in f.children():
        out.extend(_formula_metas(k))
    return out


def _occurrences(c: Consecution) -> list:
    out: list = []
    _var_positions(c.lhs, 0, "lhs", out)
    _var_positions(c.rhs, 0, "rhs", out)
    return out


@dataclass(frozen=True)
class AuditReport:
    checked: tuple
    violations: tuple = ()  # (rule, condition, detail)

    def passed(self, condition: str) -> bool:
        return not any(v[1] == condition for v in self.violations)

    @property
    def ok(self) -> bool:
        return not self.violations

    def violators(self, condition: str) -> set[str]:
        return {v[0] for v in self.violations if v[1] == condition}

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "rules_checked": list(self.checked),
            "conditions": {c: self.passed(c) for c in ("C1", "C3", "C4", "C5")},
            "violations": [{"rule": r, "condition": c, "detail": d} for r, c, d in self.violations],
        }


def postulate_rules() -> list[Rule]:
    return [Rule(name, (upper,), lower, True, "postulate") for name, (upper, lower) in POSTULATES.items()]


def _orientations(rule: Rule):
    yield "fwd", rule.premises, rule.conclusion
    if rule.bidirectional:
        yield "bwd", (rule.conclusion,), rule.premises[0]


def _leaf_positions(x: Structure, top: bool, out: list) -> None:
    """Formula leaves of a conclusion schema and whether each is a whole side."""
    if isinstance(x, Leaf):
        out.append((x.formula, top))
        return
    for k in x.children():
        _leaf_positions(k, False, out)


def audit_rule(rule: Rule) -> list[tuple[str, str, str]]:
    bad = []
    for d, prems, concl in _orientations(rule):
        tag = f"{rule.name}:{d}" if rule.bidirectional else rule.name
        c_occ = _occurrences(concl)
        c_names = {n for n, _, _ in c_occ}
        # C1: nothing in a premise is lost in the conclusion (Cut is the one exception, by design)
        if rule.name != "Cut":
            for p in prems:
                lost = sorted({n for n, _, _ in _occurrences(p)} - c_names)
                if lost:
                    bad.append((tag, "C1", f"premise variables {lost} missing from the conclusion"))
        # C3: each structure variable occurs exactly once in the conclusion
        counts: dict[str, int] = {}
        for n, kind, _ in c_occ:
            if kind == "structure":
                counts[n] = counts.get(n, 0) + 1
        for n, k in sorted(counts.items()):
            if k != 1:
                bad.append((tag, "C3", f"{n} occurs {k} times in the conclusion"))
        # C4: no structure variable is both an antecedent and a consequent part
        roles: dict[str, set] = {}
        for c in (concl,) + tuple(prems):
            for n, kind, pos in _occurrences(c):
                if kind == "structure":
                    roles.setdefault(n, set()).add(pos)
        for n, r in sorted(roles.items()):
            if len(r) > 1:
                bad.append((tag, "C4", f"{n} is both an antecedent and a consequent part"))
        # C5: non-parametric conclusion formulas are an entire side
        leaves: list = []
        _leaf_positions(concl.lhs, True, leaves)
        _leaf_positions(concl.rhs, True, leaves)
        for f, whole in leaves:
            if not whole:
                bad.append((tag, "C5", f"principal formula {_show(f)} is not a whole side"))
    return bad


def audit_belnap_conditions(rules: Iterable[Rule] | None = None) -> AuditReport:
    """Static check of C1, C3, C4 and C5 over rule schemata (default: every rule and postulate)."""
    if rules is None:
        rules = list(RULES.values()) + postulate_rules()
    rules = list(rules)
    violations = []
    for r in rules:
        violations.extend(audit_rule(r))
    return AuditReport(tuple(r.name for r in rules), tuple(violations))


def mutation_controls() -> list[Rule]:
    """Deliberately broken rules the audit must flag."""
    return [
        Rule("DupX", (_c(X, Z),), _c(Semi(X, X), Z), kind="test"),   # C3
        Rule("FlipX", (_c(X, Z),), _c(Z, X), kind="test"),            # C4
    ]


def instantiate_rule(rule: Rule, binding: dict, direction: str | None = None):
    prems, concl = oriented(rule, direction)
    return [instantiate(p, binding) for p in prems], instantiate(concl, binding)
