"""Bounded cut-free backward proof search for DL_CBI consecutions.

Iterative deepening over moves.  A move is one backward rule application,
preceded if necessary by a DisplayEq node whose trace comes from display_at
(or, for a few fixed rearrangements, from a short postulate search).  A few
moves bundle a contraction or a unit law with the logical rule they enable;
depth counts every non-DisplayEq rule they contain.

The search is incomplete by nature (CBI is undecidable).  It never answers
"unprovable": the only outcomes are a checked proof or an exhausted budget.
"""

from __future__ import annotations

import functools
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator

from .display import (AE, ME, AEmpty, Comma, Consecution, Flat, Leaf, MEmpty, Path, PostulateStep, Semi,
                      Sharp, Structure, at_path, canonical_form, classify_part, consecution_formulas,
                      consecution_subformulas, consecution_valid_on, display_at, find_display_trace,
                      iter_paths, replay)
from .formula import (And, Bot, Formula, Imp, MBot, MNot, MTop, Not, Or, Par, Star, Top, Var, Wand)
from .proofs import Proof
from .semantics import BudgetExceeded

RULE_GROUPS = ("right", "left", "units", "assoc", "weaken", "contract")


@dataclass(frozen=True)
class SearchConfig:
    depth: int = 12                 # max non-DisplayEq rule applications per branch
    postulate_budget: int = 12      # max postulate steps in one searched rearrangement
    rule_order: tuple = RULE_GROUPS
    canonicalize: bool = True       # loop check and failure memo keyed on canonical_form
    semantic_prune: bool = True     # drop goals refuted on small CBI-models (sound by local soundness)
    max_nodes: int = 200_000

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be at least 1")
        if sorted(self.rule_order) != sorted(RULE_GROUPS):
            raise ValueError(f"rule_order must be a permutation of {RULE_GROUPS}")


@dataclass(frozen=True)
class SearchStats:
    nodes: int
    depth_reached: int
    seconds: float
    pruned_semantic: int = 0
    pruned_formula_free: int = 0
    budget_hit: bool = False

    def to_json(self) -> dict:
        return {"nodes": self.nodes, "depth_reached": self.depth_reached,
                "seconds": round(self.seconds, 4), "pruned_semantic": self.pruned_semantic,
                "pruned_formula_free": self.pruned_formula_free, "budget_hit": self.budget_hit}


@dataclass(frozen=True)
class Proved:
    proof: Proof
    stats: SearchStats


@dataclass(frozen=True)
class Exhausted:
    stats: SearchStats


SearchOutcome = Proved | Exhausted


# ---------------------------------------------------------------- moves

Builder = Callable[[list], Proof]


@dataclass(frozen=True)
class Move:
    premises: tuple
    build: Builder
    cost: int = 1
    exact_loop_key: bool = False  # associativity: canonical keys cannot tell the premise apart
    contraction: bool = False     # subject to the one-contraction-per-key bound


def _steps(*names: str) -> tuple:
    return tuple(PostulateStep.parse(s) for s in names)


def _disp(c: Consecution, trace, inner: Proof) -> Proof:
    """Wrap inner (whose conclusion is replay(c, trace)) in a DisplayEq node when needed."""
    if not trace:
        return inner
    return Proof(c, "DisplayEq", (inner,), tuple(trace))


def _leaf(x: Structure) -> Formula | None:
    return x.formula if isinstance(x, Leaf) else None


_COMMUTE = {
    ("lhs", Semi): _steps("AD1a:fwd", "AD1b:fwd"),
    ("rhs", Semi): _steps("AD2a:fwd", "AD2b:fwd"),
    ("lhs", Comma): _steps("MD1a:fwd", "MD1b:fwd"),
    ("rhs", Comma): _steps("MD2a:fwd", "MD2b:fwd"),
}

# whole-side double-negation cancellation
_CANCEL = {
    ("lhs", Sharp): _steps("AD3b:bwd", "AD3a:bwd"),
    ("lhs", Flat): _steps("MD3b:bwd", "MD3a:bwd"),
    ("rhs", Sharp): _steps("AD3a:fwd", "AD3b:bwd", "AD3a:bwd", "AD3a:bwd"),
    ("rhs", Flat): _steps("MD3a:fwd", "MD3b:bwd", "MD3a:bwd", "MD3a:bwd"),
}


def commute(c: Consecution, side: str) -> tuple[Consecution, tuple]:
    node = c.side(side)
    tr = _COMMUTE[(side, type(node))]
    return replay(c, tr), tr


def cancel_negations(c: Consecution, side: str) -> tuple[Consecution, list]:
    """Strip ♯♯ / ♭♭ pairs from the top of one side."""
    trace: list = []
    while True:
        x = c.side(side)
        if isinstance(x, (Sharp, Flat)) and type(x.arg) is type(x):
            tr = _CANCEL[(side, type(x))]
            c = replay(c, tr)
            trace.extend(tr)
        else:
            return c, trace


def strip_to_identity(c: Consecution) -> tuple[Consecution, list] | None:
    """Reach (P ⊢ P) by cancelling ♯♯/♭♭ and stripping a shared outer ♯ or ♭, if possible."""
    trace: list = []
    for _ in range(64):
        if isinstance(c.lhs, Leaf) and isinstance(c.lhs.formula, Var) and c.lhs == c.rhs:
            return c, trace
        c, t1 = cancel_negations(c, "lhs")
        c, t2 = cancel_negations(c, "rhs")
        trace += t1 + t2
        if t1 or t2:
            continue
        if isinstance(c.lhs, Sharp) and isinstance(c.rhs, Sharp):
            step = _steps("AD3a:bwd")
        elif isinstance(c.lhs, Flat) and isinstance(c.rhs, Flat):
            step = _steps("MD3a:bwd")
        else:
            return None
        c = replay(c, step)
        trace += step
    return None


_INVERTIBLE_R = {Not: "NotR", MNot: "MNotR", Or: "OrR", Par: "ParR", Imp: "ImpR", Wand: "WandR",
                 Bot: "BotR", MBot: "MBotR"}
_INVERTIBLE_L = {Not: "NotL", MNot: "MNotL", And: "AndL", Star: "StarL", Top: "TopL", MTop: "MTopL"}


def _invertible_premise(c: Consecution, side: str) -> tuple[str, Consecution] | None:
    f = _leaf(c.side(side))
    if f is None:
        return None
    t = type(f)
    if side == "rhs" and t in _INVERTIBLE_R:
        x = c.lhs
        prem = {Not: lambda: Consecution(x, Sharp(Leaf(f.arg))),
                MNot: lambda: Consecution(x, Flat(Leaf(f.arg))),
                Or: lambda: Consecution(x, Semi(Leaf(f.left), Leaf(f.right))),
                Par: lambda: Consecution(x, Comma(Leaf(f.left), Leaf(f.right))),
                Imp: lambda: Consecution(Semi(x, Leaf(f.left)), Leaf(f.right)),
                Wand: lambda: Consecution(Comma(x, Leaf(f.left)), Leaf(f.right)),
                Bot: lambda: Consecution(x, AE),
                MBot: lambda: Consecution(x, ME)}[t]()
        return _INVERTIBLE_R[t], prem
    if side == "lhs" and t in _INVERTIBLE_L:
        y = c.rhs
        prem = {Not: lambda: Consecution(Sharp(Leaf(f.arg)), y),
                MNot: lambda: Consecution(Flat(Leaf(f.arg)), y),
                And: lambda: Consecution(Semi(Leaf(f.left), Leaf(f.right)), y),
                Star: lambda: Consecution(Comma(Leaf(f.left), Leaf(f.right)), y),
                Top: lambda: Consecution(AE, y),
                MTop: lambda: Consecution(ME, y)}[t]()
        return _INVERTIBLE_L[t], prem
    return None


def _unary(c: Consecution, trace, rule: str, prem: Consecution, cost: int = 1) -> Move:
    d = replay(c, trace)
    return Move((prem,), lambda ps: _disp(c, trace, Proof(d, rule, (ps[0],))), cost)


@functools.lru_cache(maxsize=1 << 16)
def _formula_paths(c: Consecution) -> tuple[tuple[Path, str], ...]:
    return tuple((p, classify_part(c, p)) for p in iter_paths(c) if isinstance(at_path(c, p), Leaf))


class _Searcher:
    def __init__(self, root: Consecution, cfg: SearchConfig, models):
        self.cfg = cfg
        self.root_subs = consecution_subformulas(root)
        self.models = models
        self.nodes = 0
        self.pruned_semantic = 0
        self.pruned_free = 0
        self.valid_cache: dict = {}
        self.fail_memo: dict = {}
        self.trace_cache: dict = {}
        self.budget_hit = False

    # ---------- pruning

    def key(self, c: Consecution):
        return canonical_form(c) if self.cfg.canonicalize else c

    def admissible(self, c: Consecution) -> bool:
        fs = consecution_formulas(c)
        if not fs:
            # no formula occurrence: no axiom is reachable by backward rules
            self.pruned_free += 1
            return False
        if any(f not in self.root_subs for f in fs):
            return False
        if self.cfg.semantic_prune and self.models:
            k = canonical_form(c)
            ok = self.valid_cache.get(k)
            if ok is None:
                ok = True
                for m in self.models:
                    try:
                        if not consecution_valid_on(m, c):
                            ok = False
                            break
                    except BudgetExceeded:
                        continue
                self.valid_cache[k] = ok
            if not ok:
                self.pruned_semantic += 1
                return False
        return True

    def retrace(self, c: Consecution, target: Consecution):
        k = (c, target)
        if k not in self.trace_cache:
            self.trace_cache[k] = find_display_trace(c, target, self.cfg.postulate_budget)
        return self.trace_cache[k]

    # ---------- move generation

    def invertible(self, c: Consecution) -> Move | None:
        for group in self.cfg.rule_order:
            if group not in ("right", "left"):
                continue
            want = "consequent" if group == "right" else "antecedent"
            for p, part in _formula_paths(c):
                if part != want:
                    continue
                d, tr = display_at(c, p)
                hit = _invertible_premise(d, "rhs" if group == "right" else "lhs")
                if hit:
                    rule, prem = hit
                    return _unary(c, tr, rule, prem)
        return None

    def closing(self, c: Consecution) -> Iterator[Move]:
        hit = strip_to_identity(c)
        if hit is not None:
            e, full = hit
            yield Move((), lambda ps: _disp(c, full, Proof(e, "Id")))
        for p, part in _formula_paths(c):
            f = at_path(c, p).formula
            if isinstance(f, Var):
                d, tr = display_at(c, p)
                if isinstance(d.lhs if part == "consequent" else d.rhs, Semi):
                    got = self._weaken_close(d)
                    if got is not None:
                        proof, cost = got
                        yield Move((), lambda ps, tr=tr, proof=proof: _disp(c, tr, proof), cost)
                continue
            d, tr = display_at(c, p)
            side = "lhs" if part == "antecedent" else "rhs"
            if isinstance(f, Top) and side == "rhs":
                yield self._top_close(c, tr, d)
            elif isinstance(f, Bot) and side == "lhs":
                yield self._bot_close(c, tr, d)
            elif isinstance(f, MTop) and side == "rhs":
                e, tr2 = cancel_negations(d, "lhs")
                if isinstance(e.lhs, MEmpty):
                    full = list(tr) + tr2
                    yield Move((), lambda ps, e=e, full=full: _disp(c, full, Proof(e, "MTopR")))
            elif isinstance(f, MBot) and side == "lhs":
                e, tr2 = cancel_negations(d, "rhs")
                if isinstance(e.rhs, MEmpty):
                    full = list(tr) + tr2
                    yield Move((), lambda ps, e=e, full=full: _disp(c, full, Proof(e, "MBotL")))

    def _weaken_close(self, d: Consecution) -> tuple[Proof, int] | None:
        """Close (X ⊢ P) or (P ⊢ Y) by weakening a ; chain down to an identity, with its cost."""
        hit = strip_to_identity(d)
        if hit is not None:
            e, full = hit
            return _disp(d, full, Proof(e, "Id")), 1
        side = "lhs" if isinstance(d.lhs, Semi) and isinstance(d.rhs, Leaf) else \
            "rhs" if isinstance(d.rhs, Semi) and isinstance(d.lhs, Leaf) else None
        if side is None:
            return None
        # WkL keeps the left of X;Y, WkR keeps the right of Y;Z
        rule = "WkL" if side == "lhs" else "WkR"
        for flip in (False, True):
            e, ctr = commute(d, side) if flip else (d, ())
            s = e.side(side)
            prem = Consecution(s.left, e.rhs) if side == "lhs" else Consecution(e.lhs, s.right)
            got = self._weaken_close(prem)
            if got is not None:
                sub, cost = got
                return _disp(d, ctr, Proof(e, rule, (sub,))), cost + 1
        return None

    def _top_close(self, c, tr, d) -> Move:
        x = d.lhs
        if isinstance(x, AEmpty):
            return Move((), lambda ps: _disp(c, tr, Proof(d, "TopR")))
        unit = Consecution(AE, d.rhs)
        wk = Consecution(Semi(AE, x), d.rhs)

        def build(ps):
            inner = Proof(wk, "WkL", (Proof(unit, "TopR"),))
            return _disp(c, tr, Proof(d, "AEL", (inner,)))
        return Move((), build, cost=3)

    def _bot_close(self, c, tr, d) -> Move:
        y = d.rhs
        if isinstance(y, AEmpty):
            return Move((), lambda ps: _disp(c, tr, Proof(d, "BotL")))
        unit = Consecution(d.lhs, AE)
        wk = Consecution(d.lhs, Semi(y, AE))

        def build(ps):
            inner = Proof(wk, "WkR", (Proof(unit, "BotL"),))
            return _disp(c, tr, Proof(d, "AER", (inner,)))
        return Move((), build, cost=3)

    def branching_logical(self, c: Consecution, group: str) -> Iterator[Move]:
        want = "consequent" if group == "right" else "antecedent"
        for p, part in _formula_paths(c):
            if part != want:
                continue
            d, tr = display_at(c, p)
            f = at_path(c, p).formula
            t = type(f)
            if group == "right" and t is And:
                yield self._shared_ctx(c, tr, d, "lhs", "AndR")
            elif group == "left" and t is Or:
                yield self._shared_ctx(c, tr, d, "rhs", "OrL")
            elif group == "left" and t is Imp:
                yield self._imp_left(c, tr, d)
            elif group == "right" and t is Star:
                yield from self._mult_split(c, tr, d, "lhs", "StarR")
            elif group == "left" and t is Par:
                yield from self._mult_split(c, tr, d, "rhs", "ParL")
            elif group == "left" and t is Wand:
                yield from self._wand_left(c, tr, d)

    def _shared_ctx(self, c, tr, d, ctx_side, rule) -> Move:
        """∧R / ∨L with a contracted shared context."""
        f = _leaf(d.rhs if ctx_side == "lhs" else d.lhs)
        ctx = d.side(ctx_side)
        if ctx_side == "lhs":
            doubled = Consecution(Semi(ctx, ctx), d.rhs)
            prems = (Consecution(ctx, Leaf(f.left)), Consecution(ctx, Leaf(f.right)))
            ctr = "CtrL"
        else:
            doubled = Consecution(d.lhs, Semi(ctx, ctx))
            prems = (Consecution(Leaf(f.left), ctx), Consecution(Leaf(f.right), ctx))
            ctr = "CtrR"

        def build(ps):
            return _disp(c, tr, Proof(d, ctr, (Proof(doubled, rule, tuple(ps)),)))
        return Move(prems, build, cost=2)

    def _imp_left(self, c, tr, d) -> Move:
        f, y = d.lhs.formula, d.rhs
        doubled = Consecution(d.lhs, Semi(y, y))
        moved_tr = _steps("AD2a:fwd", "AD1a:fwd")
        moved = replay(doubled, moved_tr)  # F→G ⊢ ♯♯Y ; Y
        prems = (Consecution(Sharp(y), Leaf(f.left)), Consecution(Leaf(f.right), y))

        def build(ps):
            imp = Proof(moved, "ImpL", tuple(ps))
            return _disp(c, tr, Proof(d, "CtrR", (Proof(doubled, "DisplayEq", (imp,), moved_tr),)))
        return Move(prems, build, cost=2)

    def _mult_split(self, c, tr, d, ctx_side, rule) -> Iterator[Move]:
        """∗R / ⅋L: split a comma context, either order, or against a ⊘ unit."""
        ctx = d.side(ctx_side)
        f = _leaf(d.rhs if ctx_side == "lhs" else d.lhs)

        def prem(part, sub):
            return Consecution(part, Leaf(sub)) if ctx_side == "lhs" else Consecution(Leaf(sub), part)

        def split(e, pre_tr):
            a, b = e.side(ctx_side).left, e.side(ctx_side).right
            prems = (prem(a, f.left), prem(b, f.right))

            def build(ps):
                return _disp(c, tr, _disp(d, pre_tr, Proof(e, rule, tuple(ps))))
            return Move(prems, build)

        if isinstance(ctx, Comma):
            yield split(d, ())
            yield split(*commute(d, ctx_side))
            yield from self._reassociate(c, tr, d, ctx_side)
        # unit: X ⊢ F∗G from ⊘,X ⊢ F∗G (⊘L), and X,⊘ via commutation
        if ctx_side == "lhs":
            u = Consecution(Comma(ME, ctx), d.rhs)
            unit_rule = "MEL"
        else:
            u = Consecution(d.lhs, Comma(ctx, ME))
            unit_rule = "MER"
        for flip in (False, True):
            if flip:
                e, ctr = commute(u, ctx_side)
            else:
                e, ctr = u, ()

            a, b = e.side(ctx_side).left, e.side(ctx_side).right
            prems = (prem(a, f.left), prem(b, f.right))

            def build(ps, e=e, ctr=ctr, u=u):
                return _disp(c, tr, Proof(d, unit_rule, (_disp(u, ctr, Proof(e, rule, tuple(ps))),)))
            yield Move(prems, build, cost=2)

    def _reassociate(self, c, tr, d, ctx_side) -> Iterator[Move]:
        """MAL / MAR on a displayed comma context, so later splits can group it differently."""
        ctx = d.side(ctx_side)
        rule = "MAL" if ctx_side == "lhs" else "MAR"
        # MAL relates (W,X),Y to W,(X,Y); MAR relates X,(Y,Z) to (X,Y),Z; fwd reads conclusion to premise
        to_right = rule == "MAL"
        for nested, direction in ((ctx.left, None if to_right else "bwd"), (ctx.right, "bwd" if to_right else None)):
            if not isinstance(nested, Comma):
                continue
            if nested is ctx.left:
                new = Comma(nested.left, Comma(nested.right, ctx.right))
            else:
                new = Comma(Comma(ctx.left, nested.left), nested.right)
            prem = Consecution(new, d.rhs) if ctx_side == "lhs" else Consecution(d.lhs, new)

            def build(ps, direction=direction):
                return _disp(c, tr, Proof(d, rule, (ps[0],), direction=direction))
            yield Move((prem,), build, exact_loop_key=True)

    def _wand_left(self, c, tr, d) -> Iterator[Move]:
        f, y = d.lhs.formula, d.rhs
        targets = []
        if isinstance(y, Comma):
            for a, b in ((y.left, y.right), (y.right, y.left)):
                x = a.arg if isinstance(a, Flat) else Flat(a)
                targets.append((None, Consecution(d.lhs, Comma(Flat(x), b)), x, b))
        else:
            u = Consecution(d.lhs, Comma(y, ME))
            for x, b in ((Flat(y), ME), (Flat(ME), y)):
                targets.append((u, Consecution(d.lhs, Comma(Flat(x), b)), x, b))
        for u, target, x, b in targets:
            start = u if u is not None else d
            rtr = self.retrace(start, target)
            if rtr is None:
                continue
            prems = (Consecution(x, Leaf(f.left)), Consecution(Leaf(f.right), b))

            def build(ps, u=u, start=start, rtr=rtr, target=target):
                inner = _disp(start, rtr, Proof(target, "WandL", tuple(ps)))
                if u is not None:
                    inner = Proof(d, "MER", (inner,))
                return _disp(c, tr, inner)
            yield Move(prems, build, cost=2 if u is not None else 1)

    def units(self, c: Consecution) -> Iterator[Move]:
        """Remove ∅ / ⊘ standing beside a structure of the same family."""
        yield from self._unit_moves(c, c, ())
        # a unit that is a whole side joins the other side once one of its children is displayed
        for side, other, unit_t, cls in (("lhs", "rhs", AEmpty, Semi), ("lhs", "rhs", MEmpty, Comma),
                                         ("rhs", "lhs", AEmpty, Semi), ("rhs", "lhs", MEmpty, Comma)):
            if isinstance(c.side(side), unit_t) and isinstance(c.side(other), cls):
                for step in ("left", "right"):
                    d, pre = display_at(c, Path(other, (step,)))
                    yield from self._unit_moves(c, d, tuple(pre))

    def _unit_moves(self, c: Consecution, c0: Consecution, pre: tuple) -> Iterator[Move]:
        for p in iter_paths(c0):
            node = at_path(c0, p)
            if not isinstance(node, (Semi, Comma)):
                continue
            unit_t = AEmpty if isinstance(node, Semi) else MEmpty
            if not (isinstance(node.left, unit_t) or isinstance(node.right, unit_t)):
                continue
            d, tr = display_at(c0, p)
            side = "lhs" if classify_part(c0, p) == "antecedent" else "rhs"
            s = d.side(side)
            # lhs wants the unit on the left, rhs on the right
            unit_left = isinstance(s.left, unit_t)
            e, ctr = d, ()
            if (side == "lhs") != unit_left:
                e, ctr = commute(d, side)
            s = e.side(side)
            rest = s.right if side == "lhs" else s.left
            prem = Consecution(rest, e.rhs) if side == "lhs" else Consecution(e.lhs, rest)
            rule = {("lhs", AEmpty): "AEL", ("rhs", AEmpty): "AER",
                    ("lhs", MEmpty): "MEL", ("rhs", MEmpty): "MER"}[(side, unit_t)]
            full = list(pre) + list(tr) + list(ctr)

            def build(ps, e=e, full=full, rule=rule):
                return _disp(c, full, Proof(e, rule, (ps[0],), direction="bwd"))
            yield Move((prem,), build)

    def assoc(self, c: Consecution) -> Iterator[Move]:
        for side in ("lhs", "rhs"):
            s = c.side(side)
            for cls, fam in ((Semi, "A"), (Comma, "M")):
                if not isinstance(s, cls):
                    continue
                rule = f"{fam}A{'L' if side == 'lhs' else 'R'}"
                # rule schemata: L: (W;(X;Y)) premise / ((W;X);Y) conclusion
                #                R: ((X;Y);Z) premise / (X;(Y;Z)) conclusion
                if side == "lhs":
                    if isinstance(s.left, cls):  # conclusion shape: fwd
                        w, x, y = s.left.left, s.left.right, s.right
                        yield self._assoc_move(c, side, cls(w, cls(x, y)), rule, None)
                    if isinstance(s.right, cls):  # premise shape: bwd
                        w, x, y = s.left, s.right.left, s.right.right
                        yield self._assoc_move(c, side, cls(cls(w, x), y), rule, "bwd")
                else:
                    if isinstance(s.right, cls):
                        x, y, z = s.left, s.right.left, s.right.right
                        yield self._assoc_move(c, side, cls(cls(x, y), z), rule, None)
                    if isinstance(s.left, cls):
                        x, y, z = s.left.left, s.left.right, s.right
                        yield self._assoc_move(c, side, cls(x, cls(y, z)), rule, "bwd")

    def _assoc_move(self, c, side, new, rule, direction) -> Move:
        prem = Consecution(new, c.rhs) if side == "lhs" else Consecution(c.lhs, new)
        return Move((prem,), lambda ps: Proof(c, rule, (ps[0],), direction=direction), exact_loop_key=True)

    def weakenings(self, c: Consecution) -> Iterator[Move]:
        for p in iter_paths(c):
            if not isinstance(at_path(c, p), Semi):
                continue
            d, tr = display_at(c, p)
            side = "lhs" if classify_part(c, p) == "antecedent" else "rhs"
            rule = "WkL" if side == "lhs" else "WkR"
            for flip in (False, True):
                e, ctr = (commute(d, side) if flip else (d, ()))
                s = e.side(side)
                prem = Consecution(s.left, e.rhs) if side == "lhs" else Consecution(e.lhs, s.right)
                full = list(tr) + list(ctr)

                def build(ps, e=e, full=full, rule=rule):
                    return _disp(c, full, Proof(e, rule, (ps[0],)))
                yield Move((prem,), build)

    def contractions(self, c: Consecution) -> Iterator[Move]:
        yield Move((Consecution(Semi(c.lhs, c.lhs), c.rhs),),
                   lambda ps: Proof(c, "CtrL", (ps[0],)), contraction=True)
        yield Move((Consecution(c.lhs, Semi(c.rhs, c.rhs)),),
                   lambda ps: Proof(c, "CtrR", (ps[0],)), contraction=True)
        yield self._flip_contraction(c)

    def _flip_contraction(self, c: Consecution) -> Move:
        """X ⊢ Y from ♯♭A ⊢ ♭A with A = X;♯Y (a unit, a contraction and a weakening).

        Route: ∅R, display ∅, flip with ♭, contract ♭A, move one copy left, drop ♭∅.
        """
        a = Semi(c.lhs, Sharp(c.rhs))
        s1 = Consecution(c.lhs, Semi(c.rhs, AE))                       # ∅R
        s2 = Consecution(Flat(AE), Flat(a))                            # after display and flip
        tr1 = _steps("AD2a:fwd", "MD3a:fwd")
        s3 = Consecution(Flat(AE), Semi(Flat(a), Flat(a)))             # CtrR
        tr2 = _steps("AD2a:fwd", "AD1a:fwd", "AD1b:fwd")
        s4 = replay(s3, tr2)                                           # ♯♭A ; ♭∅ ⊢ ♭A
        prem = Consecution(Sharp(Flat(a)), Flat(a))                    # WkL

        def build(ps):
            wk = Proof(s4, "WkL", (ps[0],))
            ctr = Proof(s2, "CtrR", (Proof(s3, "DisplayEq", (wk,), tr2),))
            return Proof(c, "AER", (Proof(s1, "DisplayEq", (ctr,), tr1),))
        return Move((prem,), build, cost=3, contraction=True)

    # ---------- driver

    def moves(self, c: Consecution) -> Iterator[Move]:
        inv = self.invertible(c)
        if inv is not None:
            yield inv
            return
        yield from self.closing(c)
        for group in self.cfg.rule_order:
            if group in ("right", "left"):
                yield from self.branching_logical(c, group)
            elif group == "units":
                yield from self.units(c)
            elif group == "assoc":
                yield from self.assoc(c)
            elif group == "weaken":
                yield from self.weakenings(c)
            elif group == "contract":
                yield from self.contractions(c)

    def search(self, c: Consecution, budget: int, branch: frozenset, contracted: frozenset,
               exact: frozenset = frozenset()):
        self.nodes += 1
        if self.nodes > self.cfg.max_nodes:
            self.budget_hit = True
            return None
        k = self.key(c)
        memo_k = (k, contracted)
        if self.fail_memo.get(memo_k, -1) >= budget:
            return None
        branch = branch | {k}
        exact = exact | {c}
        for mv in self.moves(c):
            if self.budget_hit:
                return None
            if mv.cost > budget and mv.premises:
                continue
            if not mv.premises:
                if mv.cost <= budget:
                    return mv.build([])
                continue
            if mv.contraction and k in contracted:
                continue
            ctr_next = contracted | {k} if mv.contraction else contracted
            prems_ok = True
            for q in mv.premises:
                looped = q in exact if mv.exact_loop_key else self.key(q) in branch
                if looped or not self.admissible(q):
                    prems_ok = False
                    break
            if not prems_ok:
                continue
            subs = []
            for q in mv.premises:
                sp = self.search(q, budget - mv.cost, branch, ctr_next, exact)
                if sp is None:
                    break
                subs.append(sp)
            else:
                return mv.build(subs)
        if not self.budget_hit:
            self.fail_memo[memo_k] = budget
        return None


def default_prune_models():
    from .constructions import bitvec, powerset_model, z_mod
    from .enumeration import enumerate_cbi_models
    return list(enumerate_cbi_models(3)) + [z_mod(4, 1), z_mod(4, 2), bitvec(2), powerset_model([1, 2])]


_MODELS = None


def _prune_models():
    global _MODELS
    if _MODELS is None:
        _MODELS = default_prune_models()
    return _MODELS


def prove(c: Consecution, cfg: SearchConfig = SearchConfig()) -> SearchOutcome:
    """Iterative deepening from depth 1 to cfg.depth; the first proof found wins."""
    start = time.perf_counter()
    s = _Searcher(c, cfg, _prune_models() if cfg.semantic_prune else [])
    reached = 0
    proof = None
    if s.admissible(c):
        for d in range(1, cfg.depth + 1):
            reached = d
            proof = s.search(c, d, frozenset(), frozenset())
            if proof is not None or s.budget_hit:
                break
    stats = SearchStats(max(s.nodes, 1), reached, time.perf_counter() - start, s.pruned_semantic,
                        s.pruned_free, s.budget_hit)
    if proof is not None:
        return Proved(proof, stats)
    return Exhausted(stats)
