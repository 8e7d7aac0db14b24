import os

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from cbi.display import AE, ME, Comma, Consecution, Flat, Leaf, Semi, Sharp
from cbi.formula import (BOT, MBOT, MTOP, TOP, And, Imp, MNot, Not, Or, Par, Star, Var, Wand)

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", deadline=None, max_examples=1000,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

BINARY = (And, Or, Imp, Star, Par, Wand)
UNARY = (Not, MNot)


def formulas(names=("P", "Q"), max_leaves=6, units=True):
    leaves = [st.sampled_from([Var(n) for n in names])]
    if units:
        leaves.append(st.sampled_from([TOP, BOT, MTOP, MBOT]))
    base = st.one_of(*leaves)

    def grow(inner):
        un = st.builds(lambda c, a: c(a), st.sampled_from(UNARY), inner)
        bi = st.builds(lambda c, a, b: c(a, b), st.sampled_from(BINARY), inner, inner)
        return st.one_of(un, bi)

    return st.recursive(base, grow, max_leaves=max_leaves)


def structures(max_leaves=5, names=("P", "Q", "R")):
    base = st.one_of(st.sampled_from([Leaf(Var(n)) for n in names]), st.just(AE), st.just(ME))

    def grow(inner):
        return st.one_of(
            st.builds(Sharp, inner), st.builds(Flat, inner),
            st.builds(Semi, inner, inner), st.builds(Comma, inner, inner))

    return st.recursive(base, grow, max_leaves=max_leaves)


def consecutions(max_leaves=5):
    return st.builds(Consecution, structures(max_leaves), structures(max_leaves))
