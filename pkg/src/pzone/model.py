"""Parametric timed automata: syntax tree, text format, classification, instantiation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from ._syntax import (
    SyntaxProblem,
    Token,
    TokenStream,
    describe,
    parse_comparison_chain,
    parse_number,
    tokenize,
)
from .geometry import LinearInequality, VarId, clock, param

INF = math.inf

__all__ = [
    "Rel",
    "SimpleClockGuard",
    "Edge",
    "Pta",
    "Classification",
    "ConcreteTa",
    "ModelError",
    "SyntaxProblem",
    "parse_model",
    "render_model",
    "classify",
    "guard_set",
    "guard_set_for_clock",
    "instantiate",
]


class ModelError(ValueError):
    """A well-formed request that the model cannot satisfy."""


class Rel(enum.Enum):
    LT = "<"
    LE = "<="
    EQ = "="
    GE = ">="
    GT = ">"

    @property
    def flipped(self) -> "Rel":
        return _FLIP[self]

    def holds(self, left, right) -> bool:
        if self is Rel.LT:
            return left < right
        if self is Rel.LE:
            return left <= right
        if self is Rel.EQ:
            return left == right
        if self is Rel.GE:
            return left >= right
        return left > right


_FLIP = {Rel.LT: Rel.GT, Rel.LE: Rel.GE, Rel.EQ: Rel.EQ, Rel.GE: Rel.LE, Rel.GT: Rel.LT}


@dataclass(frozen=True)
class SimpleClockGuard:
    """``clock rel sum(alpha_i * p_i) + constant``."""

    clock: VarId
    relation: Rel
    param_coeffs: tuple[tuple[VarId, int], ...] = ()
    constant: Fraction = Fraction(0)

    @property
    def coeffs(self) -> dict[VarId, int]:
        return dict(self.param_coeffs)

    @property
    def is_parametric(self) -> bool:
        return bool(self.param_coeffs)

    def rhs(self, valuation: Mapping[VarId, object]) -> Fraction:
        return self.constant + sum(
            (a * Fraction(valuation[p]) for p, a in self.param_coeffs), Fraction(0)
        )

    def inequalities(self) -> list[LinearInequality]:
        """The guard as ``lt < 0`` / ``lt <= 0`` rows (two rows for ``=``)."""
        le = {self.clock: 1}
        for p, a in self.param_coeffs:
            le[p] = -a
        ge = {v: -a for v, a in le.items()}
        rel = self.relation
        out = []
        if rel in (Rel.LT, Rel.LE, Rel.EQ):
            out.append(LinearInequality.build(le, -self.constant, rel is Rel.LT))
        if rel in (Rel.GT, Rel.GE, Rel.EQ):
            out.append(LinearInequality.build(ge, self.constant, rel is Rel.GT))
        return out

    def __str__(self) -> str:
        return f"{self.clock} {self.relation.value} {_render_expr(self.param_coeffs, self.constant)}"


@dataclass(frozen=True)
class Edge:
    source: str
    guard: tuple[SimpleClockGuard, ...]
    action: str
    resets: frozenset
    target: str


@dataclass(frozen=True)
class Pta:
    actions: tuple[str, ...]
    locations: tuple[str, ...]
    initial: str
    accepting: frozenset
    clocks: tuple[VarId, ...]
    params: tuple[VarId, ...]
    # parameter -> (lower, upper); math.inf marks an unbounded side
    domain: Mapping[VarId, tuple]
    invariants: Mapping[str, tuple[SimpleClockGuard, ...]]
    edges: tuple[Edge, ...]

    @property
    def roster(self) -> tuple[VarId, ...]:
        return self.clocks + self.params

    def invariant(self, location: str) -> tuple[SimpleClockGuard, ...]:
        return self.invariants.get(location, ())

    def edges_from(self, location: str) -> list[Edge]:
        return [e for e in self.edges if e.source == location]

    def var(self, name: str) -> VarId:
        for v in self.roster:
            if v.name == name:
                return v
        raise ModelError(f"unknown variable {name!r}")

    def is_bounded_param(self, p: VarId) -> bool:
        lo, hi = self.domain[p]
        return lo != -INF and hi != INF

    def replace(self, **changes) -> "Pta":
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return Pta(**fields)


@dataclass(frozen=True)
class Classification:
    is_bounded: bool
    is_L: bool
    is_U: bool
    is_bptaL: bool
    is_bptaU: bool
    parametric_clocks: frozenset
    bounded_only_clocks: frozenset

    @property
    def name(self) -> str:
        if self.is_bounded:
            return "bounded"
        if self.is_U:
            return "U-PTA"
        if self.is_L:
            return "L-PTA"
        if self.is_bptaU:
            return "bPTA+U"
        if self.is_bptaL:
            return "bPTA+L"
        return "general"


# ---------------------------------------------------------------------------
# guard sets and classification


def guard_set(a: Pta) -> list[SimpleClockGuard]:
    """Every simple clock guard of invariants and edges, without duplicates."""
    seen = {}
    for loc in a.locations:
        for g in a.invariant(loc):
            seen.setdefault(g, None)
    for e in a.edges:
        for g in e.guard:
            seen.setdefault(g, None)
    return list(seen)


def guard_set_for_clock(a: Pta, x: VarId) -> list[SimpleClockGuard]:
    return [g for g in guard_set(a) if g.clock == x]


def _sign_pattern(g: SimpleClockGuard, alpha: int) -> tuple[bool, bool]:
    """(acts as lower bound, acts as upper bound) for one parameter occurrence."""
    rel = g.relation
    ge = rel in (Rel.GE, Rel.GT)
    le = rel in (Rel.LE, Rel.LT)
    if alpha > 0:
        return ge, le
    return le, ge


def classify(a: Pta) -> Classification:
    lower_only = {p: True for p in a.params}
    upper_only = {p: True for p in a.params}
    parametric = set()
    bounded_only = set(a.clocks)
    for g in guard_set(a):
        for p, alpha in g.param_coeffs:
            lo_ok, up_ok = _sign_pattern(g, alpha)
            lower_only[p] &= lo_ok
            upper_only[p] &= up_ok
            parametric.add(g.clock)
            if not a.is_bounded_param(p):
                bounded_only.discard(g.clock)
    bounded = {p: a.is_bounded_param(p) for p in a.params}
    return Classification(
        is_bounded=all(bounded.values()),
        is_L=all(lower_only.values()),
        is_U=all(upper_only.values()),
        is_bptaL=all(bounded[p] or lower_only[p] for p in a.params),
        is_bptaU=all(bounded[p] or upper_only[p] for p in a.params),
        parametric_clocks=frozenset(parametric),
        bounded_only_clocks=frozenset(bounded_only),
    )


# ---------------------------------------------------------------------------
# text format


def _fmt(q) -> str:
    if q == INF:
        return "inf"
    if q == -INF:
        return "-inf"
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _render_expr(coeffs: Iterable[tuple[VarId, int]], constant: Fraction) -> str:
    parts: list[str] = []
    for p, a in coeffs:
        mag = "" if abs(a) == 1 else f"{abs(a)}*"
        if not parts:
            parts.append(("-" if a < 0 else "") + mag + str(p))
        else:
            parts.append(("- " if a < 0 else "+ ") + mag + str(p))
    if constant or not parts:
        if not parts:
            parts.append(_fmt(constant))
        else:
            parts.append(("- " if constant < 0 else "+ ") + _fmt(abs(constant)))
    return " ".join(parts)


def render_model(a: Pta) -> str:
    """Text that :func:`parse_model` reads back into an equal automaton."""
    lines = []
    if a.clocks:
        lines.append("clocks " + ", ".join(str(x) for x in a.clocks) + ";")
    if a.params:
        decls = []
        for p in a.params:
            lo, hi = a.domain[p]
            left = "(" if lo == -INF else "["
            right = ")" if hi == INF else "]"
            decls.append(f"{p} in {left}{_fmt(lo)},{_fmt(hi)}{right}")
        lines.append("params " + ", ".join(decls) + ";")
    for loc in a.locations:
        head = f"loc {loc}"
        inv = a.invariant(loc)
        if inv:
            head += " [inv: " + " && ".join(str(g) for g in inv) + "]"
        if loc in a.accepting:
            head += " [accepting]"
        body = []
        for e in a.edges_from(loc):
            text = f"  on {e.action}"
            if e.guard:
                text += " when " + " && ".join(str(g) for g in e.guard)
            if e.resets:
                names = [str(x) for x in a.clocks if x in e.resets]
                text += " reset {" + ", ".join(names) + "}"
            body.append(text + f" goto {e.target};")
        if body:
            lines.append(head + " {")
            lines.extend(body)
            lines.append("}")
        else:
            lines.append(head + " {}")
    lines.append(f"init {a.initial};")
    return "\n".join(lines) + "\n"


@dataclass
class _RawGuard:
    chain: list
    tok: Token


@dataclass
class _RawEdge:
    source: str
    action: str
    guards: list
    resets: list[Token]
    target: Token


@dataclass
class _Raw:
    clocks: list[Token] = field(default_factory=list)
    params: list = field(default_factory=list)  # (tok, lo, hi, lo_tok)
    locations: list[Token] = field(default_factory=list)
    invariants: dict = field(default_factory=dict)
    accepting: set = field(default_factory=set)
    edges: list[_RawEdge] = field(default_factory=list)
    init: Token | None = None


def _read_bound(ts: TokenStream):
    tok = ts.peek()
    neg = bool(ts.accept("-"))
    tok2 = ts.peek()
    if tok2.kind == "ident" and tok2.text == "inf":
        ts.next()
        return (-INF if neg else INF), tok
    if tok2.kind != "num":
        raise ts.error(f"expected a bound, found {describe(tok2)}", tok2)
    ts.next()
    value = parse_number(tok2.text)
    return (-value if neg else value), tok


def _read_param_decl(ts: TokenStream, raw: _Raw) -> None:
    name = ts.expect_ident("parameter name")
    if not ts.accept("in"):
        raw.params.append((name, Fraction(0), INF, name))
        return
    open_tok = ts.peek()
    if not (ts.accept("[") or ts.accept("(")):
        raise ts.error(f"expected '[' or '(', found {describe(open_tok)}", open_tok)
    lo, lo_tok = _read_bound(ts)
    ts.expect(",")
    hi, hi_tok = _read_bound(ts)
    close_tok = ts.peek()
    if not (ts.accept("]") or ts.accept(")")):
        raise ts.error(f"expected ']' or ')', found {describe(close_tok)}", close_tok)
    if open_tok.text == "(" and lo != -INF:
        raise ts.error("finite bounds are closed; use '['", open_tok)
    if close_tok.text == ")" and hi != INF:
        raise ts.error("finite bounds are closed; use ']'", close_tok)
    if lo == INF or hi == -INF:
        raise ts.error("bound points the wrong way", lo_tok if lo == INF else hi_tok)
    if lo > hi:
        raise ts.error(f"empty domain for {name.text}: lower bound exceeds upper", lo_tok)
    raw.params.append((name, lo, hi, lo_tok))


def _read_guards(ts: TokenStream, stop: tuple[str, ...]) -> list[_RawGuard]:
    out = []
    if ts.accept("true"):
        return out
    while True:
        tok = ts.peek()
        out.append(_RawGuard(parse_comparison_chain(ts), tok))
        if ts.accept("&&") or ts.accept("&") or ts.accept("and"):
            continue
        if ts.at(*stop):
            return out
        nxt = ts.peek()
        raise ts.error(f"expected '&&' or one of {', '.join(stop)}, found {describe(nxt)}", nxt)


def _read_location(ts: TokenStream, raw: _Raw) -> None:
    name = ts.expect_ident("location name")
    raw.locations.append(name)
    raw.invariants.setdefault(name.text, [])
    while ts.accept("["):
        tok = ts.peek()
        if ts.accept("inv"):
            ts.expect(":")
            raw.invariants[name.text].extend(_read_guards(ts, ("]",)))
        elif ts.accept("accepting"):
            raw.accepting.add(name.text)
        else:
            raise ts.error(f"expected 'inv:' or 'accepting', found {describe(tok)}", tok)
        ts.expect("]")
    ts.expect("{")
    while not ts.accept("}"):
        ts.expect("on")
        action = ts.expect_ident("action name").text
        guards: list = []
        resets: list[Token] = []
        if ts.accept("when"):
            guards = _read_guards(ts, ("reset", "goto"))
        if ts.accept("reset"):
            ts.expect("{")
            if not ts.at("}"):
                resets.append(ts.expect_ident("clock name"))
                while ts.accept(","):
                    resets.append(ts.expect_ident("clock name"))
            ts.expect("}")
        ts.expect("goto")
        target = ts.expect_ident("target location")
        ts.expect(";")
        raw.edges.append(_RawEdge(name.text, action, guards, resets, target))


def _read(text: str) -> _Raw:
    ts = TokenStream(tokenize(text))
    raw = _Raw()
    while ts.peek().kind != "eof":
        tok = ts.peek()
        if ts.accept("clocks"):
            if not ts.at(";"):
                raw.clocks.append(ts.expect_ident("clock name"))
                while ts.accept(","):
                    raw.clocks.append(ts.expect_ident("clock name"))
            ts.expect(";")
        elif ts.accept("params"):
            if not ts.at(";"):
                _read_param_decl(ts, raw)
                while ts.accept(","):
                    _read_param_decl(ts, raw)
            ts.expect(";")
        elif ts.accept("loc"):
            _read_location(ts, raw)
        elif ts.accept("init"):
            if raw.init is not None:
                raise ts.error("duplicate 'init'", tok)
            raw.init = ts.expect_ident("initial location")
            ts.expect(";")
        else:
            raise ts.error(f"expected 'clocks', 'params', 'loc' or 'init', found {describe(tok)}", tok)
    if raw.init is None:
        eof = ts.peek()
        raise SyntaxProblem("missing 'init <location>;'", eof.line, eof.col)
    return raw


def _err(message: str, tok: Token) -> SyntaxProblem:
    return SyntaxProblem(message, tok.line, tok.col)


def _build_guard(raw: _RawGuard, names: Mapping[str, VarId]) -> list[SimpleClockGuard]:
    out = []
    for left, rel, right, rel_tok in raw.chain:
        diff = left - right  # diff rel 0
        for name, tok in diff.where.items():
            if name not in names:
                raise _err(f"undeclared variable {name!r}", tok)
        clocks = [(names[n], a) for n, a in diff.terms.items() if names[n].is_clock]
        if len(clocks) != 1:
            what = "no clock" if not clocks else "more than one clock"
            raise _err(f"a guard compares exactly one clock, found {what}", raw.tok)
        x, a = clocks[0]
        if abs(a) != 1:
            raise _err(f"clock {x} must have coefficient 1", diff.where[x.name])
        relation = Rel(rel)
        # a*x + sum(b_i p_i) + k rel 0  ->  x rel' -a*(sum(b_i p_i) + k)
        if a < 0:
            relation = relation.flipped
        coeffs = []
        for n, b in diff.terms.items():
            v = names[n]
            if v.is_clock:
                continue
            alpha = -a * b
            if alpha.denominator != 1:
                raise _err(f"parameter {n} needs an integer coefficient", diff.where[n])
            coeffs.append((v, int(alpha)))
        coeffs.sort()
        out.append(SimpleClockGuard(x, relation, tuple(coeffs), -a * diff.constant))
    return out


def parse_model(text: str) -> Pta:
    raw = _read(text)
    names: dict[str, VarId] = {}
    declared: dict[str, Token] = {}

    def declare(tok: Token, kind: str) -> None:
        if tok.text in declared:
            raise _err(f"{tok.text!r} is declared twice", tok)
        declared[tok.text] = tok

    clocks = []
    for i, tok in enumerate(raw.clocks):
        declare(tok, "clock")
        names[tok.text] = clock(i, tok.text)
        clocks.append(names[tok.text])
    params = []
    domain = {}
    for i, (tok, lo, hi, _) in enumerate(raw.params):
        declare(tok, "param")
        p = param(i, tok.text)
        names[tok.text] = p
        params.append(p)
        domain[p] = (lo, hi)
    locations = []
    for tok in raw.locations:
        if tok.text in locations:
            raise _err(f"location {tok.text!r} is declared twice", tok)
        if tok.text in names:
            raise _err(f"{tok.text!r} is already a variable", tok)
        locations.append(tok.text)
    invariants = {}
    for loc in locations:
        gs = []
        for rg in raw.invariants.get(loc, []):
            gs.extend(_build_guard(rg, names))
        if gs:
            invariants[loc] = tuple(gs)
    edges = []
    actions: dict[str, None] = {}
    for re_ in raw.edges:
        if re_.target.text not in locations:
            raise _err(f"undeclared location {re_.target.text!r}", re_.target)
        gs = []
        for rg in re_.guards:
            gs.extend(_build_guard(rg, names))
        resets = set()
        for tok in re_.resets:
            v = names.get(tok.text)
            if v is None or not v.is_clock:
                raise _err(f"{tok.text!r} is not a declared clock", tok)
            resets.add(v)
        actions.setdefault(re_.action, None)
        edges.append(Edge(re_.source, tuple(gs), re_.action, frozenset(resets), re_.target.text))
    if raw.init.text not in locations:
        raise _err(f"undeclared initial location {raw.init.text!r}", raw.init)
    return Pta(
        actions=tuple(actions),
        locations=tuple(locations),
        initial=raw.init.text,
        accepting=frozenset(raw.accepting),
        clocks=tuple(clocks),
        params=tuple(params),
        domain=domain,
        invariants=invariants,
        edges=tuple(edges),
    )


# ---------------------------------------------------------------------------
# concrete instantiation


@dataclass(frozen=True)
class ConcreteTa:
    """A parameter-free automaton; constants are integers after scaling by ``scale``.

    Guards are ``(clock_index, Rel, int)`` triples.
    """

    locations: tuple[str, ...]
    initial: str
    accepting: frozenset
    clock_names: tuple[str, ...]
    invariants: Mapping[str, tuple]
    edges: tuple  # (source, guards, action, reset indices, target)
    scale: int

    def max_constants(self) -> list[int]:
        """Largest constant compared against each clock (0 when unused)."""
        m = [0] * len(self.clock_names)
        for gs in list(self.invariants.values()) + [e[1] for e in self.edges]:
            for x, _, c in gs:
                m[x] = max(m[x], c)
        return m


def _in_domain(value: Fraction, bounds) -> bool:
    lo, hi = bounds
    return (lo == -INF or value >= lo) and (hi == INF or value <= hi)


def instantiate(a: Pta, valuation: Mapping[VarId, object]) -> ConcreteTa:
    """Substitute parameter values and rescale every constant to an integer."""
    values = {}
    for p in a.params:
        if p not in valuation:
            raise ModelError(f"no value for parameter {p}")
        v = Fraction(valuation[p])
        if not _in_domain(v, a.domain[p]):
            raise ModelError(f"{p} = {_fmt(v)} lies outside its domain")
        values[p] = v
    inv_rhs = {loc: [(g, g.rhs(values)) for g in gs] for loc, gs in a.invariants.items()}
    edge_rhs = [[(g, g.rhs(values)) for g in e.guard] for e in a.edges]
    scale = 1
    for pairs in list(inv_rhs.values()) + edge_rhs:
        for _, r in pairs:
            scale = math.lcm(scale, r.denominator)
    index = {x: i for i, x in enumerate(a.clocks)}

    def conv(pairs):
        return tuple((index[g.clock], g.relation, int(r * scale)) for g, r in pairs)

    return ConcreteTa(
        locations=a.locations,
        initial=a.initial,
        accepting=a.accepting,
        clock_names=tuple(str(x) for x in a.clocks),
        invariants={loc: conv(p) for loc, p in inv_rhs.items()},
        edges=tuple(
            (e.source, conv(pairs), e.action, frozenset(index[x] for x in e.resets), e.target)
            for e, pairs in zip(a.edges, edge_rhs)
        ),
        scale=scale,
    )
