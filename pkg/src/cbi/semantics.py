"""Forcing semantics for CBI formulas on finite models.

`sat` follows the satisfaction clauses literally, one point at a time, and is
the reference.  `Evaluator` computes whole denotations for a batch of
environments at once with numpy; `truth` and `find_falsifier` use it.  The
test-suite cross-checks the two.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from typing import Iterator, Mapping

import numpy as np

from .formula import (And, Bot, Formula, Imp, MBot, MNot, MTop, Not, Or, Par, Star, Top, Var,
                      Wand, variables)
from .models import BbiModel, ResourceModel

Environment = Mapping[str, frozenset]

DEFAULT_ENV_CAP = 1 << 20


class UnknownElementError(KeyError):
    pass


class NotACbiModelError(TypeError):
    """A CBI-only connective was evaluated on a BBI model."""


class BudgetExceeded(Exception):
    """Enumeration would exceed its cap; the answer is indeterminate."""

    def __init__(self, needed: int, cap: int):
        self.needed = needed
        self.cap = cap
        super().__init__(f"indeterminate: {needed} environments exceed the cap of {cap}")


def check_environment(m: BbiModel, env: Environment) -> None:
    members = set(m.carrier)
    for name, value in env.items():
        bad = [x for x in value if x not in members]
        if bad:
            raise UnknownElementError(f"environment assigns {name} elements outside the carrier: {bad!r}")


def _require_cbi(m: BbiModel, f: Formula) -> ResourceModel:
    if not isinstance(m, ResourceModel):
        raise NotACbiModelError(f"{type(f).__name__} needs a CBI-model (involution and infinity)")
    return m


def sat(m: BbiModel, env: Environment, r, f: Formula) -> bool:
    """r ⊨ρ f, evaluated clause by clause."""
    if r not in m.index:
        raise UnknownElementError(f"{r!r} is not an element of the model")
    return _sat(m, env, r, f)


def _sat(m: BbiModel, env: Environment, r, f: Formula) -> bool:
    t = type(f)
    if t is Var:
        return r in env.get(f.name, ())
    if t is Top:
        return True
    if t is Bot:
        return False
    if t is Not:
        return not _sat(m, env, r, f.arg)
    if t is And:
        return _sat(m, env, r, f.left) and _sat(m, env, r, f.right)
    if t is Or:
        return _sat(m, env, r, f.left) or _sat(m, env, r, f.right)
    if t is Imp:
        return not _sat(m, env, r, f.left) or _sat(m, env, r, f.right)
    if t is MTop:
        return r == m.unit
    car = m.carrier
    if t is Star:
        return any(r in m.compose(r1, r2) and _sat(m, env, r1, f.left) and _sat(m, env, r2, f.right)
                   for r1 in car for r2 in car)
    if t is Wand:
        return all(not (r2 in m.compose(r, r1) and _sat(m, env, r1, f.left)) or _sat(m, env, r2, f.right)
                   for r1 in car for r2 in car)
    cm = _require_cbi(m, f)
    if t is MBot:
        return r != cm.infinity
    if t is MNot:
        return not _sat(m, env, cm.inv[r], f.arg)
    if t is Par:
        nr = cm.inv[r]
        return all(nr not in m.compose(r1, r2)
                   or _sat(m, env, cm.inv[r1], f.left) or _sat(m, env, cm.inv[r2], f.right)
                   for r1 in car for r2 in car)
    raise TypeError(f"not a CBI formula: {f!r}")


# ---------------------------------------------------------------- batched evaluation

class Evaluator:
    """Denotations as boolean arrays of shape (environments, carrier)."""

    def __init__(self, m: BbiModel):
        self.m = m
        self.n = m.size
        self.comp = m.comp_tensor
        self.unit = m.unit_index
        if isinstance(m, ResourceModel):
            self.inv = np.array(m.inv_index)
            self.inf = m.infinity_index
        else:
            self.inv = None

    def star(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # res[e, z] = ∃x,y. a[e,x] ∧ b[e,y] ∧ z ∈ x∘y
        t = np.tensordot(a, self.comp, axes=([1], [0]))  # (E, y, z)
        return np.any(t & b[:, :, None], axis=1)

    def wand(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        # fails at r iff ∃r1 ∈ a, r2 ∉ b with r2 ∈ r∘r1
        t = np.tensordot(a, self.comp, axes=([1], [1]))  # (E, r, r2)
        return ~np.any(t & ~b[:, None, :], axis=2)

    def neg(self, a: np.ndarray) -> np.ndarray:
        """{r | -r ∈ a} for each environment."""
        return a[:, self.inv]

    def denote(self, f: Formula, valuation: Mapping[str, np.ndarray], batch: int,
               memo: dict | None = None) -> np.ndarray:
        memo = {} if memo is None else memo
        return self._denote(f, valuation, batch, memo)

    def _denote(self, f, val, batch, memo):
        hit = memo.get(f)
        if hit is not None:
            return hit
        t = type(f)
        if t is Var:
            out = val.get(f.name)
            if out is None:
                out = np.zeros((batch, self.n), dtype=bool)
        elif t is Top:
            out = np.ones((batch, self.n), dtype=bool)
        elif t is Bot:
            out = np.zeros((batch, self.n), dtype=bool)
        elif t is MTop:
            out = np.zeros((batch, self.n), dtype=bool)
            out[:, self.unit] = True
        elif t is Not:
            out = ~self._denote(f.arg, val, batch, memo)
        elif t is And:
            out = self._denote(f.left, val, batch, memo) & self._denote(f.right, val, batch, memo)
        elif t is Or:
            out = self._denote(f.left, val, batch, memo) | self._denote(f.right, val, batch, memo)
        elif t is Imp:
            out = ~self._denote(f.left, val, batch, memo) | self._denote(f.right, val, batch, memo)
        elif t is Star:
            out = self.star(self._denote(f.left, val, batch, memo), self._denote(f.right, val, batch, memo))
        elif t is Wand:
            out = self.wand(self._denote(f.left, val, batch, memo), self._denote(f.right, val, batch, memo))
        else:
            if self.inv is None:
                raise NotACbiModelError(f"{t.__name__} needs a CBI-model (involution and infinity)")
            if t is MBot:
                out = np.ones((batch, self.n), dtype=bool)
                out[:, self.inf] = False
            elif t is MNot:
                out = ~self.neg(self._denote(f.arg, val, batch, memo))
            elif t is Par:
                # r fails iff -r ∈ r1∘r2 with -r1 ∉ F and -r2 ∉ G
                na = ~self.neg(self._denote(f.left, val, batch, memo))
                nb = ~self.neg(self._denote(f.right, val, batch, memo))
                out = ~self.neg(self.star(na, nb))
            else:
                raise TypeError(f"not a CBI formula: {f!r}")
        memo[f] = out
        return out


def valuation_arrays(n: int, names: list[str], start: int, stop: int) -> dict[str, np.ndarray]:
    """Boolean arrays for environments numbered start..stop-1.

    Environment number t assigns to names[j] the subset whose bitmask is
    (t >> (n*j)) mod 2^n, element i being bit i.
    """
    return dict(zip(names, _valuation_columns(n, len(names), start, stop)))


@functools.lru_cache(maxsize=4096)
def _valuation_columns(n: int, k: int, start: int, stop: int) -> tuple[np.ndarray, ...]:
    t = np.arange(start, stop, dtype=np.int64)
    shifts = np.arange(n, dtype=np.int64)
    out = []
    for j in range(k):
        masks = (t >> (n * j)) & ((1 << n) - 1)
        col = ((masks[:, None] >> shifts[None, :]) & 1).astype(bool)
        col.flags.writeable = False
        out.append(col)
    return tuple(out)


def environment_of(m: BbiModel, names: list[str], number: int) -> dict[str, frozenset]:
    n = m.size
    env = {}
    for j, name in enumerate(names):
        mask = (number >> (n * j)) & ((1 << n) - 1)
        env[name] = frozenset(m.carrier[i] for i in range(n) if mask >> i & 1)
    return env


def environment_count(m: BbiModel, f: Formula) -> int:
    return 1 << (m.size * len(variables(f)))


def iter_environments(m: BbiModel, names) -> Iterator[dict[str, frozenset]]:
    names = sorted(names)
    for t in range(1 << (m.size * len(names))):
        yield environment_of(m, names, t)


@dataclass(frozen=True)
class Falsifier:
    env: dict
    point: object


def _chunk(n: int) -> int:
    return max(1, min(1 << 14, (1 << 22) // max(1, n * n)))


def find_falsifier(m: BbiModel, f: Formula, cap: int = DEFAULT_ENV_CAP) -> Falsifier | None:
    """First (environment, point) at which f fails, in enumeration order; None if f is true."""
    names = sorted(variables(f))
    n = m.size
    total = 1 << (n * len(names))
    if total > cap:
        raise BudgetExceeded(total, cap)
    ev = Evaluator(m)
    step = _chunk(n)
    for start in range(0, total, step):
        stop = min(total, start + step)
        den = ev.denote(f, valuation_arrays(n, names, start, stop), stop - start)
        bad = np.argwhere(~den)
        if len(bad):
            e, i = bad[0]
            return Falsifier(environment_of(m, names, start + int(e)), m.carrier[int(i)])
    return None


def truth(m: BbiModel, f: Formula, cap: int = DEFAULT_ENV_CAP) -> bool:
    """f holds at every point under every environment over vars(f).

    Raises BudgetExceeded rather than answering when the enumeration is too large.
    """
    return find_falsifier(m, f, cap) is None


def extension(m: BbiModel, env: Environment, f: Formula) -> frozenset:
    """The set of points satisfying f under env."""
    check_environment(m, env)
    idx = m.index
    val = {}
    for name in variables(f):
        row = np.zeros((1, m.size), dtype=bool)
        for x in env.get(name, ()):
            row[0, idx[x]] = True
        val[name] = row
    den = Evaluator(m).denote(f, val, 1)[0]
    return frozenset(m.carrier[i] for i in range(m.size) if den[i])
