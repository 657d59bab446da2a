"""Shared helpers for the test suite: cached analyses and an independent elimination check."""

from __future__ import annotations

import functools
import random
from fractions import Fraction

from pzone.engine import Caps, cycle_synth, eef
from pzone.extrapolation import select_mode
from pzone.geometry import ConvexPolyhedron, LinearInequality, VarId, clock, param
from pzone.samples import load_fixture

# (fixture, property kind, locations) for every model with a declared property
PROPERTIES = {
    "bounded_loop": ("reach", ("l1",)),
    "equality_guard": ("reach", ("l1",)),
    "upper_bound": ("reach", ("l1",)),
    "shrinking_loop": ("cycle", ("l0",)),
    "acyclic": ("reach", ("l3",)),
    "full_reset": ("reach", ("l1",)),
    "accepting_window": ("cycle", ("l1",)),
}


@functools.lru_cache(maxsize=None)
def analysed(name: str, mode: str = "auto", correct: bool = True, max_states: int = 0):
    """(pta, bounds, report, result, stats) for a fixture's declared property."""
    a = load_fixture(name)
    kind, locs = PROPERTIES[name]
    bounds, report = select_mode(a, mode)
    caps = Caps(max_states=max_states)
    if kind == "reach":
        result, stats = eef(a, locs, bounds, caps)
    else:
        result, stats = cycle_synth(a, locs, bounds, caps, report=report, correct=correct)
    return a, bounds, report, result, stats


def exists_extension(c: ConvexPolyhedron, v: VarId, point: dict) -> bool:
    """Is there a value for ``v`` that puts ``point`` inside ``c``?

    Each inequality becomes a bound on ``v`` once the other coordinates are
    fixed, so the answer is an interval non-emptiness test.
    """
    lo = hi = None  # (value, strict)
    for ineq in c.inequalities:
        coeffs = ineq.coefficients
        a = coeffs.get(v, Fraction(0))
        rest = ineq.constant + sum(
            (coef * Fraction(point[u]) for u, coef in coeffs.items() if u != v), Fraction(0)
        )
        if a == 0:
            if rest > 0 or (ineq.strict and rest == 0):
                return False
            continue
        bound = -rest / a
        if a > 0:
            if hi is None or bound < hi[0] or (bound == hi[0] and ineq.strict):
                hi = (bound, ineq.strict)
        else:
            if lo is None or bound > lo[0] or (bound == lo[0] and ineq.strict):
                lo = (bound, ineq.strict)
    if lo is None or hi is None:
        return True
    return lo[0] < hi[0] or (lo[0] == hi[0] and not lo[1] and not hi[1])


def random_polyhedron(rng: random.Random, roster, n_ineq: int, coef: int = 3, const: int = 6):
    ineqs = []
    for _ in range(n_ineq):
        coeffs = {v: rng.randint(-coef, coef) for v in roster}
        ineqs.append(
            LinearInequality.build(coeffs, rng.randint(-const, const), strict=rng.random() < 0.3)
        )
    return ConvexPolyhedron.from_inequalities(roster, ineqs)


def random_zone(rng: random.Random, clocks, params, n_extra: int):
    """Non-negative clocks under random bounds, differences and parametric bounds."""
    ineqs = [LinearInequality.build({x: -1}, 0) for x in clocks]
    ineqs += [LinearInequality.build({p: -1}, 0) for p in params]
    ineqs += [LinearInequality.build({p: 1}, -6) for p in params]
    for _ in range(n_extra):
        shape = rng.random()
        strict = rng.random() < 0.4
        x = rng.choice(clocks)
        sign = rng.choice((1, -1))
        k = rng.randint(0, 7)
        if shape < 0.4:
            coeffs = {x: sign}
        elif shape < 0.75 and len(clocks) > 1:
            y = rng.choice([c for c in clocks if c != x])
            coeffs = {x: sign, y: -sign}
        elif params:
            coeffs = {x: sign, rng.choice(params): -sign * rng.randint(1, 2)}
        else:
            coeffs = {x: sign}
        ineqs.append(LinearInequality.build(coeffs, -sign * k, strict))
    roster = tuple(clocks) + tuple(params)
    return ConvexPolyhedron.from_inequalities(roster, ineqs)


def random_rational(rng: random.Random, lo: int = -6, hi: int = 6) -> Fraction:
    den = rng.randint(1, 4)
    return Fraction(rng.randint(lo * den, hi * den), den)


X, Y, Z = clock(0, "x"), clock(1, "y"), clock(2, "z")
P, Q = param(0, "p"), param(1, "q")
