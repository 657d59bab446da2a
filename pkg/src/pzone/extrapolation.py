"""Clock bounds and the zone extrapolation operators built on them."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .geometry import (
    ConvexPolyhedron,
    PolySet,
    VarId,
    add_constraint,
    cylindrify,
)
from .model import INF, ModelError, Pta, SimpleClockGuard, classify, guard_set

__all__ = [
    "ClockBounds",
    "BoundInputs",
    "ModeReport",
    "max_over_domain",
    "clock_bounds",
    "compute_lp_hat",
    "bounded_valuation",
    "extrapolate_clock",
    "extrapolate",
    "select_mode",
    "MODES",
]

MODES = ("none", "m", "vecm", "auto")


@dataclass(frozen=True)
class ClockBounds:
    """Extrapolation constant per clock; ``math.inf`` means never extrapolate."""

    clocks: tuple[VarId, ...]
    values: tuple  # int or math.inf, aligned with ``clocks``

    @classmethod
    def of(cls, mapping: Mapping[VarId, object]) -> "ClockBounds":
        clocks = tuple(sorted(mapping))
        return cls(clocks, tuple(mapping[x] for x in clocks))

    @classmethod
    def unbounded(cls, clocks: Iterable[VarId]) -> "ClockBounds":
        clocks = tuple(clocks)
        return cls(clocks, (INF,) * len(clocks))

    def __getitem__(self, x: VarId):
        return self.values[self.clocks.index(x)]

    def items(self):
        return zip(self.clocks, self.values)

    def as_dict(self) -> dict[str, object]:
        return {str(x): ("inf" if m == INF else m) for x, m in self.items()}

    @property
    def all_infinite(self) -> bool:
        return all(m == INF for m in self.values)


@dataclass(frozen=True)
class BoundInputs:
    k: int
    c: int
    r_hat: int
    lp_hat: int


@dataclass
class ModeReport:
    cls: str
    mode: str
    bounds: ClockBounds
    k: int | None = None
    c: int | None = None
    r_hat: int | None = None
    lp_hat: int | None = None
    # which side the parameter bound applies to ('L' or 'U'), if one was computed
    lp_side: str | None = None
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        out = {"class": self.cls, "mode": self.mode, "bounds": self.bounds.as_dict()}
        for key in ("k", "c", "r_hat", "lp_hat", "lp_side"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        if self.warnings:
            out["warnings"] = list(self.warnings)
        return out


def max_over_domain(g: SimpleClockGuard, domain: Mapping[VarId, tuple]):
    """Largest value the right-hand side of ``g`` reaches over the domain box."""
    total = Fraction(g.constant)
    for p, alpha in g.param_coeffs:
        lo, hi = domain[p]
        gamma = lo if alpha < 0 else hi
        if gamma in (INF, -INF):
            return INF
        total += alpha * Fraction(gamma)
    return total


def clock_bounds(a: Pta, domain: Mapping[VarId, tuple] | None = None) -> ClockBounds:
    domain = a.domain if domain is None else domain
    out = {x: 0 for x in a.clocks}
    for g in guard_set(a):
        m = max_over_domain(g, domain)
        if m == INF or out[g.clock] == INF:
            out[g.clock] = INF
        else:
            out[g.clock] = max(out[g.clock], math.ceil(m))
    return ClockBounds.of(out)


def _constant_scale(a: Pta) -> int:
    s = 1
    for g in guard_set(a):
        s = math.lcm(s, Fraction(g.constant).denominator)
    return s


def compute_lp_hat(a: Pta, side: str) -> BoundInputs:
    """Parameter bound past which accepting-run existence no longer changes.

    ``side`` is ``"L"`` or ``"U"`` and must match the automaton's class.
    """
    if side not in ("L", "U"):
        raise ValueError(f"side must be 'L' or 'U', not {side!r}")
    cl = classify(a)
    if side == "L" and not cl.is_L:
        raise ModelError("the automaton is not an L-PTA")
    if side == "U" and not cl.is_U:
        raise ModelError("the automaton is not a U-PTA")
    scale = _constant_scale(a)
    guards = guard_set(a)
    k = len(cl.parametric_clocks)
    c = max((abs(int(g.constant * scale)) for g in guards), default=0)
    per_clock = {x: 0 for x in a.clocks}
    for g in guards:
        per_clock[g.clock] = max(per_clock[g.clock], int(g.constant * scale))
    n = len(a.clocks)
    r_hat = 2**n * math.factorial(n)
    for cx in per_clock.values():
        r_hat *= 2 * cx + 2
    factor = 1 if side == "L" else 8
    lp = factor * k * (r_hat + 1) + c + 1
    if scale != 1:
        lp = -(-lp // scale)
    return BoundInputs(k, c, r_hat, lp)


def bounded_valuation(a: Pta) -> Pta:
    """Replace each bounded parameter by the domain end that maximizes its guard."""
    cl = classify(a)
    if not (cl.is_bptaL or cl.is_bptaU):
        raise ModelError("bounded valuation needs a bPTA+L or bPTA+U")

    def value(g: SimpleClockGuard) -> SimpleClockGuard:
        const = Fraction(g.constant)
        kept = []
        for p, alpha in g.param_coeffs:
            if a.is_bounded_param(p):
                lo, hi = a.domain[p]
                const += alpha * Fraction(lo if alpha < 0 else hi)
            else:
                kept.append((p, alpha))
        return SimpleClockGuard(g.clock, g.relation, tuple(kept), const)

    invariants = {loc: tuple(value(g) for g in gs) for loc, gs in a.invariants.items()}
    edges = tuple(
        type(e)(e.source, tuple(value(g) for g in e.guard), e.action, e.resets, e.target)
        for e in a.edges
    )
    return a.replace(invariants=invariants, edges=edges)


def extrapolate_clock(c: ConvexPolyhedron, x: VarId, m: int) -> PolySet:
    """Split ``c`` at ``x = m`` and forget everything about ``x`` above ``m``."""
    if c.is_empty():
        return PolySet(c.roster)
    low = add_constraint(c, {x: 1}, -m)
    high_part = add_constraint(c, {x: -1}, m, strict=True)
    members = [low.minimized()]
    if not high_part.is_empty():
        high = add_constraint(cylindrify(high_part, x), {x: -1}, m, strict=True)
        members.append(high.minimized())
    return PolySet(c.roster, members)


def extrapolate(c: ConvexPolyhedron, bounds: ClockBounds) -> PolySet:
    """Apply the per-clock split for every clock with a finite bound, in roster order."""
    members = [c]
    for x in c.roster:
        if not x.is_clock:
            continue
        m = bounds[x]
        if m == INF:
            continue
        nxt = []
        for member in members:
            nxt.extend(extrapolate_clock(member, x, m))
        members = nxt
    return PolySet(c.roster, members).pruned()


def _lp_domain(a: Pta, lp: int) -> dict:
    dom = {}
    for p, (lo, hi) in a.domain.items():
        dom[p] = (-lp if lo == -INF else lo, lp if hi == INF else hi)
    return dom


def _auto(a: Pta) -> ModeReport:
    cl = classify(a)
    if cl.is_bounded:
        return ModeReport(cl.name, "vecM", clock_bounds(a))
    for side, flag in (("U", cl.is_U), ("L", cl.is_L)):
        if flag:
            inputs = compute_lp_hat(a, side)
            bounds = clock_bounds(a, _lp_domain(a, inputs.lp_hat))
            return ModeReport(
                cl.name, "Mhat", bounds, inputs.k, inputs.c, inputs.r_hat, inputs.lp_hat, side
            )
    for side, flag in (("U", cl.is_bptaU), ("L", cl.is_bptaL)):
        if flag:
            inputs = compute_lp_hat(bounded_valuation(a), side)
            bounds = clock_bounds(a, _lp_domain(a, inputs.lp_hat))
            return ModeReport(
                cl.name, "Mbar", bounds, inputs.k, inputs.c, inputs.r_hat, inputs.lp_hat, side
            )
    full = clock_bounds(a)
    partial = {x: (m if x in cl.bounded_only_clocks else INF) for x, m in full.items()}
    return ModeReport(cl.name, "partial", ClockBounds.of(partial))


def select_mode(a: Pta, requested: str = "auto") -> tuple[ClockBounds, ModeReport]:
    """Pick clock bounds for the strongest extrapolation the automaton's class allows."""
    if requested not in MODES:
        raise ValueError(f"unknown mode {requested!r}; expected one of {', '.join(MODES)}")
    if requested == "none":
        report = ModeReport(classify(a).name, "none", ClockBounds.unbounded(a.clocks))
        return report.bounds, report
    report = _auto(a)
    if requested == "vecm" and report.mode == "partial":
        report.warnings.append(
            "per-clock bounds need a bounded, L/U or bPTA+L/U automaton; using partial extrapolation"
        )
    if requested == "m":
        finite = [m for m in report.bounds.values if m != INF]
        top = max(finite, default=0)
        values = tuple(INF if m == INF else top for m in report.bounds.values)
        report.bounds = ClockBounds(report.bounds.clocks, values)
        report.mode = "M" if report.mode != "partial" else "M-partial"
        if len(finite) < len(values):
            report.warnings.append("clocks compared to unbounded parameters stay unextrapolated")
    return report.bounds, report
