"""Independent reference definitions the library is checked against."""

import itertools
from fractions import Fraction

from cbi.formula import (MBOT, MTOP, And, Iff, Imp, MNot, Not, Or, Par, Star, Var, Wand, parse_formula)
from cbi.modal import CoWandMod, CompMod, E, INF, InvMod
from cbi.models import from_function

BOT = parse_formula("bot")
TOP = parse_formula("top")


def cbi_equivalences(F, G):
    """The ten CBI equivalences, instantiated at F and G."""
    return [
        Iff(MNot(TOP), BOT),
        Iff(MNot(MTOP), MBOT),
        Iff(MNot(MNot(F)), F),
        Iff(Not(MNot(F)), MNot(Not(F))),
        Iff(MNot(F), Wand(F, MBOT)),  # printed with ⊥, which is refutable; see test_semantics
        Iff(Par(F, G), MNot(Star(MNot(F), MNot(G)))),
        Iff(Wand(F, G), Par(MNot(F), G)),
        Iff(Wand(F, G), Wand(MNot(G), MNot(F))),
        Iff(Wand(F, G), MNot(Star(F, MNot(G)))),
        Iff(Par(F, MBOT), F),
    ]


def composite(f):
    """revembed(embed(f)) computed from the composite table, row by row."""
    t = type(f)
    if t in (Var,) or f in (TOP, BOT):
        return f
    if f == MTOP:
        return MTOP
    if f == MBOT:
        return Not(Not(MBOT))
    if t is Not:
        return Not(composite(f.arg))
    if t is MNot:
        return Not(Not(MNot(composite(f.arg))))
    if t in (And, Or, Imp, Star):
        return t(composite(f.left), composite(f.right))
    if t is Wand:
        return Not(Not(Wand(composite(f.left), Not(Not(composite(f.right))))))
    if t is Par:
        a = Not(Not(MNot(composite(f.left))))
        b = Not(Not(MNot(composite(f.right))))
        return Not(Not(MNot(Star(a, b))))
    raise TypeError(f)


def embed_by_table(f):
    """The CBI to modal translation written out independently of the library."""
    t = type(f)
    if t is Var or f in (TOP, BOT):
        return f
    if f == MTOP:
        return E
    if f == MBOT:
        return Not(INF)
    if t is Not:
        return Not(embed_by_table(f.arg))
    if t is MNot:
        return Not(InvMod(embed_by_table(f.arg)))
    if t in (And, Or, Imp):
        return t(embed_by_table(f.left), embed_by_table(f.right))
    if t is Star:
        return CompMod(embed_by_table(f.left), embed_by_table(f.right))
    if t is Wand:
        return Not(CoWandMod(embed_by_table(f.left), Not(embed_by_table(f.right))))
    l, r = Not(InvMod(embed_by_table(f.left))), Not(InvMod(embed_by_table(f.right)))
    return Not(InvMod(CompMod(l, r)))


def heap_worked_example(h4: frozenset, X: frozenset, Y: frozenset) -> bool:
    """Right-hand side of the worked generalised-heap equivalence at location 4."""
    if X <= h4 or Y <= h4:
        return True
    dx, dy = X - h4, Y - h4
    return dx == dy and len(dx) == 1


def direct_deny_guarantee(actions, k):
    """PermDG over discretised fractions, written directly from the component tables."""
    fracs = [Fraction(i, k) for i in range(1, k)]
    frac_dg = ["0", "1"] + [("deny", p) for p in fracs] + [("guar", p) for p in fracs]

    def plus(x, y):
        if x == "0":
            return y
        if y == "0":
            return x
        if x == "1" or y == "1" or x[0] != y[0]:
            return None
        s = x[1] + y[1]
        return (x[0], s) if s < 1 else "1" if s == 1 else None

    def neg(x):
        return {"0": "1", "1": "0"}[x] if isinstance(x, str) else (x[0], 1 - x[1])

    actions = sorted(actions)
    carrier = [tuple(zip(actions, vals)) for vals in itertools.product(frac_dg, repeat=len(actions))]

    def op(p, q):
        out = []
        for (a, x), (_, y) in zip(p, q):
            z = plus(x, y)
            if z is None:
                return []
            out.append((a, z))
        return [tuple(out)]

    return from_function(carrier, op, tuple((a, "0") for a in actions),
                         inv=lambda p: tuple((a, neg(x)) for a, x in p),
                         infinity=tuple((a, "1") for a in actions), label="direct PermDG")


def relational_by_table():
    """The three-element relational model, transcribed from its defining table."""
    table = {
        ("e", "e"): ["e"], ("e", "a"): ["a"], ("e", "i"): ["i"],
        ("a", "a"): ["e", "i"], ("a", "i"): ["e", "a"], ("i", "i"): ["e", "a"],
    }
    op = lambda x, y: table.get((x, y)) or table[(y, x)]
    return from_function(["e", "a", "i"], op, "e", inv={"e": "i", "a": "a", "i": "e"}.__getitem__,
                         infinity="i")


def cbi_formulas_by_size(names, max_size):
    """{size: [every CBI formula over names with exactly that many nodes]}."""
    leaves = [Var(v) for v in names] + [TOP, BOT, MTOP, MBOT]
    out = {1: leaves}
    for s in range(2, max_size + 1):
        level = [u(a) for a in out[s - 1] for u in (Not, MNot)]
        for i in range(1, s - 1):
            for a, b in itertools.product(out[i], out[s - 1 - i]):
                level += [c(a, b) for c in (And, Or, Imp, Star, Par, Wand)]
        out[s] = level
    return out
