"""Symbolic exploration: successors, reachability synthesis, cycle synthesis, graph export."""

from __future__ import annotations

import enum
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

from .extrapolation import INF, ClockBounds, ModeReport, extrapolate
from .geometry import (
    ConvexPolyhedron,
    PolySet,
    VarId,
    add_constraint,
    closure,
    contains,
    equal,
    intersect,
    project_to_params,
    render,
    reset,
    sample_membership,
    time_elapse,
)
from .model import Edge, Pta, SimpleClockGuard

__all__ = [
    "SymbolicState",
    "ParamConstraint",
    "ExplorationStats",
    "Status",
    "Caps",
    "initial_state",
    "succ",
    "eef",
    "cycle_synth",
    "export_graph",
    "build_graph",
]


class Status(str, enum.Enum):
    COMPLETE = "Complete"
    CAP_REACHED = "CapReached"


@dataclass(frozen=True)
class SymbolicState:
    location: str
    zone: ConvexPolyhedron

    def __str__(self) -> str:
        return f"({self.location}, {render(self.zone)})"


@dataclass(frozen=True)
class Caps:
    """Exploration limits; 0 means unlimited.  ``deadline`` is a ``time.monotonic()`` value."""

    max_states: int = 0
    max_depth: int = 0
    deadline: float | None = None


@dataclass
class ExplorationStats:
    states_explored: int = 0
    states_split: int = 0
    max_depth: int = 0
    status: Status = Status.COMPLETE
    warnings: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "states_explored": self.states_explored,
            "states_split": self.states_split,
            "max_depth": self.max_depth,
            "status": self.status.value,
        }


class ParamConstraint:
    """Finite union of parameter polyhedra; empty means no valuation qualifies."""

    def __init__(self, params: Iterable[VarId], members: Iterable[ConvexPolyhedron] = ()):
        self.params = tuple(params)
        self._members: list[ConvexPolyhedron] = []
        for m in members:
            self.add(m)

    def add(self, c: ConvexPolyhedron) -> bool:
        """Union in ``c``; members swallowed by another member are dropped."""
        if c.is_empty():
            return False
        c = c.minimized()
        if any(contains(m, c) for m in self._members):
            return False
        self._members = [m for m in self._members if not contains(c, m)]
        self._members.append(c)
        return True

    @property
    def disjuncts(self) -> PolySet:
        return PolySet(self.params, self._members)

    def __iter__(self):
        return iter(self._members)

    def __len__(self) -> int:
        return len(self._members)

    def is_empty(self) -> bool:
        return not self._members

    def contains(self, valuation: Mapping[VarId, object]) -> bool:
        return any(sample_membership(m, valuation) for m in self._members)

    def set_equal(self, other: "ParamConstraint") -> bool:
        return self.disjuncts.set_equal(other.disjuncts)

    def render(self) -> list[str]:
        return [render(m) for m in self._members]

    def __str__(self) -> str:
        return " | ".join(self.render()) if self._members else "false"

    def __repr__(self) -> str:
        return f"ParamConstraint({self})"


# ---------------------------------------------------------------------------
# symbolic semantics


class _Compiled:
    """Guards and invariants of one automaton as polyhedra over its roster."""

    def __init__(self, a: Pta):
        self.a = a
        self.roster = a.roster
        self.universe = ConvexPolyhedron.universe(self.roster)
        self.inv = {loc: self.poly(a.invariant(loc)) for loc in a.locations}
        self.guard = {id(e): self.poly(e.guard) for e in a.edges}
        self.out = {loc: a.edges_from(loc) for loc in a.locations}
        box = []
        for p in a.params:
            lo, hi = a.domain[p]
            if lo != -INF:
                box.append(({p: -1}, lo))
            if hi != INF:
                box.append(({p: 1}, -hi))
        dom = self.universe
        for coeffs, k in box:
            dom = add_constraint(dom, coeffs, k)
        self.domain = dom

    def poly(self, guards: Iterable[SimpleClockGuard]) -> ConvexPolyhedron:
        ineqs = [i for g in guards for i in g.inequalities()]
        return ConvexPolyhedron.from_inequalities(self.roster, ineqs)

    def initial(self) -> SymbolicState:
        origin = self.universe
        for x in self.a.clocks:
            origin = add_constraint(origin, {x: 1}, 0)
            origin = add_constraint(origin, {x: -1}, 0)
        zone = intersect(time_elapse(origin), self.inv[self.a.initial])
        zone = intersect(zone, self.domain)
        return SymbolicState(self.a.initial, zone.minimized())

    def succ(self, s: SymbolicState, e: Edge) -> SymbolicState | None:
        inv = self.inv[e.target]
        c = intersect(s.zone, self.guard[id(e)])
        if c.is_empty():
            return None
        c = intersect(reset(c, e.resets), inv)
        if c.is_empty():
            return None
        c = intersect(time_elapse(c), inv)
        if c.is_empty():
            return None
        return SymbolicState(e.target, c.minimized())


def initial_state(a: Pta) -> SymbolicState:
    """Initial symbolic state; its zone is empty when the initial invariant cannot hold."""
    return _Compiled(a).initial()


def succ(a: Pta, s: SymbolicState, e: Edge) -> SymbolicState | None:
    if e.source != s.location:
        raise ValueError(f"edge leaves {e.source}, state is in {s.location}")
    return _Compiled(a).succ(s, e)


# ---------------------------------------------------------------------------
# depth-first search with a path-local passed list


class _Stop(Exception):
    pass


class _Search:
    def __init__(self, comp: _Compiled, bounds: ClockBounds | None, caps: Caps | None):
        self.comp = comp
        self.bounds = bounds
        self.caps = caps or Caps()
        self.stats = ExplorationStats()
        self.path: list[SymbolicState] = []
        self.index: dict[tuple, list[int]] = {}

    def children(self, s: SymbolicState) -> Iterator[tuple[Edge, SymbolicState]]:
        for e in self.comp.out[s.location]:
            nxt = self.comp.succ(s, e)
            if nxt is None:
                continue
            if self.bounds is None or self.bounds.all_infinite:
                yield e, nxt
                continue
            members = extrapolate(nxt.zone, self.bounds).members
            self.stats.states_split += len(members) - 1
            for m in members:
                yield e, SymbolicState(e.target, m)

    def on_path(self, s: SymbolicState) -> int | None:
        for j in self.index.get((s.location, s.zone.signature()), ()):
            if equal(self.path[j].zone, s.zone):
                return j
        return None

    def count(self) -> None:
        st = self.stats
        st.states_explored += 1
        caps = self.caps
        if caps.max_states and st.states_explored > caps.max_states:
            st.states_explored -= 1
            st.status = Status.CAP_REACHED
            raise _Stop
        if caps.deadline is not None and st.states_explored % 32 == 0:
            if time.monotonic() > caps.deadline:
                st.status = Status.CAP_REACHED
                raise _Stop

    def push(self, s: SymbolicState) -> bool:
        if self.caps.max_depth and len(self.path) >= self.caps.max_depth:
            self.stats.status = Status.CAP_REACHED
            return False
        key = (s.location, s.zone.signature())
        self.index.setdefault(key, []).append(len(self.path))
        self.path.append(s)
        self.stats.max_depth = max(self.stats.max_depth, len(self.path) - 1)
        return True

    def pop(self) -> None:
        s = self.path.pop()
        key = (s.location, s.zone.signature())
        bucket = self.index[key]
        bucket.pop()
        if not bucket:
            del self.index[key]

    def run(self, s0: SymbolicState, visit) -> None:
        """``visit(state)`` decides whether to expand; it sees the path before the push."""
        try:
            if s0.zone.is_empty():
                return
            self.count()
            if not visit(s0) or not self.push(s0):
                return
            stack = [self.children(s0)]
            while stack:
                child = next(stack[-1], None)
                if child is None:
                    stack.pop()
                    self.pop()
                    continue
                _, s = child
                self.count()
                if visit(s) and self.push(s):
                    stack.append(self.children(s))
        except _Stop:
            pass


def eef(
    a: Pta,
    targets: Iterable[str],
    bounds: ClockBounds | None = None,
    caps: Caps | None = None,
) -> tuple[ParamConstraint, ExplorationStats]:
    """Parameter valuations for which some location in ``targets`` is reachable."""
    targets = frozenset(targets)
    unknown = targets - set(a.locations)
    if unknown:
        raise ValueError(f"unknown location(s): {', '.join(sorted(unknown))}")
    comp = _Compiled(a)
    search = _Search(comp, bounds, caps)
    result = ParamConstraint(a.params)

    def visit(s: SymbolicState) -> bool:
        if s.location in targets:
            result.add(project_to_params(s.zone))
            return False
        return search.on_path(s) is None

    search.run(comp.initial(), visit)
    return result, search.stats


def _lp_correction(a: Pta, report: ModeReport | None, l_side: bool, warnings: list[str]):
    """Parameters to cap at the bound, and the bound, for the liveness correction."""
    if report is None or report.lp_side is None or report.lp_hat is None:
        return [], None
    if report.lp_side == "L" and not l_side:
        warnings.append(
            "lower-bound parameters are not capped for cycle synthesis; "
            "results may include spurious valuations (see --liveness-l-side)"
        )
        return [], None
    capped = [p for p in a.params if a.domain[p][1] == INF]
    return capped, report.lp_hat


def _drop_upper_bounds(c: ConvexPolyhedron, p: VarId) -> ConvexPolyhedron:
    j = c.position(p)
    rows = [r for r in c.rows if r[0][j] <= 0]
    return ConvexPolyhedron(c.roster, rows)


def cycle_synth(
    a: Pta,
    accepting: Iterable[str],
    bounds: ClockBounds | None = None,
    caps: Caps | None = None,
    *,
    report: ModeReport | None = None,
    correct: bool = True,
    l_side: bool = False,
) -> tuple[ParamConstraint, ExplorationStats]:
    """Parameter valuations admitting an infinite run through ``accepting`` infinitely often.

    When ``report`` carries a parameter bound (L/U and bPTA+L/U classes), every
    parameter without a finite upper bound is first capped at that bound, and the
    cap is lifted again on result pieces that touch it.  ``correct=False`` skips
    the cap; with extrapolation this can report cycles that do not exist.
    """
    accepting = frozenset(accepting)
    unknown = accepting - set(a.locations)
    if unknown:
        raise ValueError(f"unknown location(s): {', '.join(sorted(unknown))}")
    warnings: list[str] = []
    capped, lp = _lp_correction(a, report, l_side, warnings) if correct else ([], None)
    explored = a
    if capped:
        domain = dict(a.domain)
        for p in capped:
            domain[p] = (domain[p][0], Fraction(lp))
        explored = a.replace(domain=domain)
    comp = _Compiled(explored)
    search = _Search(comp, bounds, caps)
    search.stats.warnings.extend(warnings)
    found = ParamConstraint(a.params)

    def visit(s: SymbolicState) -> bool:
        j = search.on_path(s)
        if j is None:
            return True
        if any(t.location in accepting for t in search.path[j:]):
            found.add(project_to_params(search.path[j].zone))
        return False

    search.run(comp.initial(), visit)
    if not capped:
        return found, search.stats
    result = ParamConstraint(a.params)
    for d in found:
        for p in capped:
            at_cap = add_constraint(closure(d), {p: 1}, -lp)
            at_cap = add_constraint(at_cap, {p: -1}, lp)
            if not at_cap.is_empty():
                d = _drop_upper_bounds(d, p)
        result.add(d)
    return result, search.stats


# ---------------------------------------------------------------------------
# graph export


@dataclass
class ZoneGraph:
    nodes: list[tuple[str, str]]  # (location, rendered zone)
    edges: list[tuple[int, int, str]]
    status: Status

    def to_json(self) -> dict:
        return {
            "nodes": [{"id": i, "location": l, "zone": z} for i, (l, z) in enumerate(self.nodes)],
            "edges": [{"source": s, "target": t, "action": act} for s, t, act in self.edges],
            "termination": self.status.value,
        }

    def to_dot(self) -> str:
        lines = ["digraph zones {", f"  // termination: {self.status.value}"]
        for i, (loc, zone) in enumerate(self.nodes):
            label = json.dumps(f"{loc}\n{zone}")
            lines.append(f"  n{i} [label={label}];")
        for s, t, act in self.edges:
            lines.append(f"  n{s} -> n{t} [label={json.dumps(act)}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def build_graph(
    a: Pta,
    bounds: ClockBounds | None = None,
    caps: Caps | None = None,
    targets: Iterable[str] = (),
) -> ZoneGraph:
    """Breadth-first symbolic graph with states merged globally by equal zones.

    Target states are shown by their parameter projection and not expanded, so
    target states with the same projection share one node.
    """
    targets = frozenset(targets)
    caps = caps or Caps()
    comp = _Compiled(a)
    search = _Search(comp, bounds, None)
    nodes: list[tuple[str, ConvexPolyhedron]] = []
    lookup: dict[tuple, list[int]] = {}
    edges: list[tuple[int, int, str]] = []
    status = Status.COMPLETE

    def node_of(s: SymbolicState) -> tuple[int, bool]:
        zone = project_to_params(s.zone) if s.location in targets else s.zone
        key = (s.location, zone.signature())
        for i in lookup.get(key, ()):
            if equal(nodes[i][1], zone):
                return i, False
        lookup.setdefault(key, []).append(len(nodes))
        nodes.append((s.location, zone))
        return len(nodes) - 1, True

    s0 = comp.initial()
    if not s0.zone.is_empty():
        node_of(s0)
        frontier = [(0, s0, 0)]
        while frontier:
            nxt = []
            for i, s, depth in frontier:
                if s.location in targets:
                    continue
                if caps.max_depth and depth >= caps.max_depth:
                    status = Status.CAP_REACHED
                    continue
                for e, child in search.children(s):
                    if caps.max_states and len(nodes) >= caps.max_states:
                        status = Status.CAP_REACHED
                        probe_new = all(
                            not equal(nodes[k][1], child.zone)
                            for k in lookup.get((child.location, child.zone.signature()), ())
                        )
                        if probe_new:
                            continue
                    j, new = node_of(child)
                    if (i, j, e.action) not in edges:
                        edges.append((i, j, e.action))
                    if new:
                        nxt.append((j, child, depth + 1))
            frontier = nxt
    return ZoneGraph([(l, render(z)) for l, z in nodes], edges, status)


def export_graph(
    a: Pta,
    bounds: ClockBounds | None = None,
    caps: Caps | None = None,
    format: str = "dot",
    targets: Iterable[str] = (),
):
    """The explored symbolic graph as DOT text or a JSON-ready dict."""
    g = build_graph(a, bounds, caps, targets)
    if format == "dot":
        return g.to_dot()
    if format == "json":
        return g.to_json()
    raise ValueError(f"unknown graph format {format!r}")
