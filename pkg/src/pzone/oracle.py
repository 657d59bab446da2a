"""Brute-force ground truth: concrete zone graphs at sampled parameter valuations.

Concrete zones are difference-bound matrices over integers, kept separate from
the polyhedron kernel so the two implementations check each other.  A bound
``(c, <=)`` is encoded as ``2c + 1`` and ``(c, <)`` as ``2c``; the encoding is
monotone, so the tighter bound is the smaller integer.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import networkx as nx

from .engine import ParamConstraint
from .model import INF, ConcreteTa, Pta, Rel, instantiate

__all__ = [
    "ConcreteTa",
    "Verdict",
    "Property",
    "check_concrete",
    "check_unextrapolated",
    "default_samples",
    "validate",
]

_INF = 1 << 62
_LE_ZERO = 1


def _le(c: int) -> int:
    return 2 * c + 1


def _lt(c: int) -> int:
    return 2 * c


def _add(a: int, b: int) -> int:
    if a == _INF or b == _INF:
        return _INF
    return ((a >> 1) + (b >> 1)) * 2 + (a & b & 1)


class _Dbm:
    """Operations on flat row-major DBMs of size ``n * n`` (index 0 is the zero clock)."""

    def __init__(self, nclocks: int, bounds: Sequence[int] | None):
        self.n = nclocks + 1
        # per-index extrapolation constants; None disables extrapolation
        self.m = None if bounds is None else [0] + list(bounds)

    def zero(self) -> list[int]:
        return [_LE_ZERO] * (self.n * self.n)

    def up(self, d: list[int]) -> None:
        n = self.n
        for i in range(1, n):
            d[i * n] = _INF

    def constrain(self, d: list[int], i: int, j: int, b: int) -> bool:
        """Add ``x_i - x_j (bound) b``; keep ``d`` closed.  False when empty."""
        n = self.n
        if b >= d[i * n + j]:
            return True
        if _add(b, d[j * n + i]) < _LE_ZERO:
            return False
        d[i * n + j] = b
        for k in range(n):
            dki = d[k * n + i]
            if dki == _INF:
                continue
            via = _add(dki, b)
            row = k * n
            for l in range(n):
                djl = d[j * n + l]
                if djl == _INF:
                    continue
                s = _add(via, djl)
                if s < d[row + l]:
                    d[row + l] = s
        return True

    def guard(self, d: list[int], guards) -> bool:
        for x, rel, c in guards:
            i = x + 1
            if rel in (Rel.LE, Rel.EQ, Rel.LT):
                if not self.constrain(d, i, 0, _lt(c) if rel is Rel.LT else _le(c)):
                    return False
            if rel in (Rel.GE, Rel.EQ, Rel.GT):
                if not self.constrain(d, 0, i, _lt(-c) if rel is Rel.GT else _le(-c)):
                    return False
        return True

    def reset(self, d: list[int], clocks: Iterable[int]) -> None:
        n = self.n
        for x in clocks:
            i = x + 1
            for j in range(n):
                d[i * n + j] = d[j]
                d[j * n + i] = d[j * n]
            d[i * n + i] = _LE_ZERO

    def close(self, d: list[int]) -> None:
        n = self.n
        for k in range(n):
            for i in range(n):
                dik = d[i * n + k]
                if dik == _INF:
                    continue
                for j in range(n):
                    s = _add(dik, d[k * n + j])
                    if s < d[i * n + j]:
                        d[i * n + j] = s

    def extrapolate(self, d: list[int]) -> None:
        """Classical per-clock maximal-constant abstraction."""
        m = self.m
        if m is None:
            return
        n = self.n
        changed = False
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                v = d[i * n + j]
                if v == _INF:
                    continue
                if v > _le(m[i]):
                    d[i * n + j] = _INF
                    changed = True
                elif v < _lt(-m[j]):
                    d[i * n + j] = _lt(-m[j])
                    changed = True
        if changed:
            self.close(d)


@dataclass(frozen=True)
class Verdict:
    reachable: bool
    has_accepting_lasso: bool
    states_explored: int


@dataclass(frozen=True)
class Property:
    """``kind`` is ``"reach"`` or ``"cycle"``."""

    kind: str
    locations: frozenset

    @classmethod
    def reach(cls, locations: Iterable[str]) -> "Property":
        return cls("reach", frozenset(locations))

    @classmethod
    def cycle(cls, locations: Iterable[str]) -> "Property":
        return cls("cycle", frozenset(locations))

    def holds(self, v: Verdict) -> bool:
        return v.reachable if self.kind == "reach" else v.has_accepting_lasso


class _Explorer:
    def __init__(self, t: ConcreteTa, extrapolate: bool):
        self.t = t
        bounds = t.max_constants() if extrapolate else None
        self.ops = _Dbm(len(t.clock_names), bounds)
        self.out = {loc: [e for e in t.edges if e[0] == loc] for loc in t.locations}

    def initial(self):
        ops = self.ops
        d = ops.zero()
        ops.up(d)
        if not ops.guard(d, self.t.invariants.get(self.t.initial, ())):
            return None
        ops.extrapolate(d)
        return (self.t.initial, tuple(d))

    def successors(self, state):
        ops = self.ops
        loc, zone = state
        for _, guards, _, resets, target in self.out[loc]:
            d = list(zone)
            if not ops.guard(d, guards):
                continue
            ops.reset(d, resets)
            inv = self.t.invariants.get(target, ())
            if not ops.guard(d, inv):
                continue
            ops.up(d)
            if not ops.guard(d, inv):
                continue
            ops.extrapolate(d)
            yield (target, tuple(d))


def check_concrete(
    t: ConcreteTa,
    targets: Iterable[str] = (),
    accepting: Iterable[str] = (),
    *,
    extrapolate: bool = True,
    max_depth: int | None = None,
) -> Verdict:
    """Breadth-first zone graph of a parameter-free automaton.

    Without accepting locations the search stops at the first target.  With
    them the whole (finite) graph is built and searched for a cycle through an
    accepting location.
    """
    targets = frozenset(targets)
    accepting = frozenset(accepting)
    ex = _Explorer(t, extrapolate)
    s0 = ex.initial()
    if s0 is None:
        return Verdict(False, False, 0)
    need_graph = bool(accepting)
    graph = nx.DiGraph() if need_graph else None
    seen = {s0: 0}
    queue = deque([s0])
    reachable = s0[0] in targets
    if need_graph:
        graph.add_node(s0)
    while queue:
        if reachable and not need_graph:
            break
        s = queue.popleft()
        depth = seen[s]
        if max_depth is not None and depth >= max_depth:
            continue
        for nxt in ex.successors(s):
            if need_graph:
                graph.add_edge(s, nxt)
            if nxt not in seen:
                seen[nxt] = depth + 1
                queue.append(nxt)
                if nxt[0] in targets:
                    reachable = True
    lasso = False
    if need_graph:
        for comp in nx.strongly_connected_components(graph):
            if not any(s[0] in accepting for s in comp):
                continue
            if len(comp) > 1:
                lasso = True
                break
            (only,) = comp
            if graph.has_edge(only, only):
                lasso = True
                break
    return Verdict(reachable, lasso, len(seen))


def check_unextrapolated(t: ConcreteTa, targets: Iterable[str], accepting: Iterable[str], depth: int) -> Verdict:
    """Same search on the exact zone graph, truncated at ``depth`` steps."""
    return check_concrete(t, targets, accepting, extrapolate=False, max_depth=depth)


# ---------------------------------------------------------------------------
# sampling and validation


def _sample_range(a: Pta, p, horizon: int):
    lo, hi = a.domain[p]
    start = max(Fraction(lo), Fraction(0)) if lo != -INF else Fraction(0)
    stop = Fraction(min(Fraction(hi), Fraction(horizon))) if hi != INF else Fraction(horizon)
    return start, max(stop, start)


def default_horizon(a: Pta, lp_hat: int | None) -> int:
    if lp_hat is not None:
        return lp_hat + 2
    consts = [abs(Fraction(g.constant)) for g in _guards(a)]
    c = math.ceil(max(consts, default=0))
    return max(2 * c + 2, 5)


def _guards(a: Pta):
    for gs in a.invariants.values():
        yield from gs
    for e in a.edges:
        yield from e.guard


def default_samples(a: Pta, lp_hat: int | None = None, seed: int = 0, n_random: int = 50) -> list[dict]:
    """Integer grid over the (clipped) domain box plus seeded random rationals."""
    horizon = default_horizon(a, lp_hat)
    ranges = [_sample_range(a, p, horizon) for p in a.params]
    axes = [range(math.ceil(lo), math.floor(hi) + 1) for lo, hi in ranges]
    out = [dict(zip(a.params, map(Fraction, combo))) for combo in itertools.product(*axes)]
    if not a.params:
        return [{}]
    rng = random.Random(seed)
    for _ in range(n_random):
        v = {}
        for p, (lo, hi) in zip(a.params, ranges):
            den = rng.randint(1, 8)
            num = rng.randint(math.ceil(lo * den), math.floor(hi * den))
            v[p] = Fraction(num, den)
        out.append(v)
    return out


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def validate(
    a: Pta,
    result: ParamConstraint,
    prop: Property,
    sampler: Callable[[Pta], Iterable[Mapping]] | Iterable[Mapping] | None = None,
    *,
    lp_hat: int | None = None,
    seed: int = 0,
) -> dict:
    """Compare ``result`` against the oracle at every sampled valuation."""
    if sampler is None:
        samples = default_samples(a, lp_hat, seed)
    elif callable(sampler):
        samples = list(sampler(a))
    else:
        samples = list(sampler)
    agreements = 0
    counterexamples = []
    for v in samples:
        t = instantiate(a, v)
        if prop.kind == "reach":
            verdict = check_concrete(t, prop.locations)
        else:
            verdict = check_concrete(t, (), prop.locations)
        expected = prop.holds(verdict)
        got = result.contains(v)
        if expected == got:
            agreements += 1
        else:
            counterexamples.append(
                {
                    "valuation": {str(p): _fmt(Fraction(x)) for p, x in v.items()},
                    "expected": expected,
                    "got": got,
                }
            )
    return {"samples": len(samples), "agreements": agreements, "counterexamples": counterexamples}
