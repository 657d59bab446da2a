"""Exact convex polyhedra over clocks and parameters.

A polyhedron is a conjunction of linear inequalities ``lt < 0`` or ``lt <= 0``
over an ordered roster of variables.  Every decision (emptiness, inclusion,
projection) is reduced to Fourier-Motzkin elimination over the rationals, so
no rounding ever happens.

Internally each inequality is a *row* ``(coeffs, const, strict)`` whose
coefficients line up with the roster.  Rows are scaled to coprime integers,
which makes them canonical: two rows describe the same half-space exactly when
they are equal tuples.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache, reduce
from typing import Iterable, Mapping, Sequence

from ._syntax import SyntaxProblem, TokenStream, parse_comparison_chain, tokenize

Rational = Fraction

__all__ = [
    "Rational",
    "VarKind",
    "VarId",
    "clock",
    "param",
    "LinearInequality",
    "ConvexPolyhedron",
    "PolySet",
    "GeometryError",
    "intersect",
    "is_empty",
    "eliminate",
    "project_to_params",
    "time_elapse",
    "reset",
    "cylindrify",
    "contains",
    "equal",
    "valuate_params",
    "sample_membership",
    "closure",
    "render",
    "parse_polyhedron",
]


class GeometryError(ValueError):
    """Structural misuse: mismatched rosters, unknown variables, missing coordinates."""


class VarKind(enum.IntEnum):
    CLOCK = 0
    PARAM = 1


@dataclass(frozen=True, order=True)
class VarId:
    kind: VarKind
    index: int
    name: str = field(default="", compare=False)

    @property
    def is_clock(self) -> bool:
        return self.kind == VarKind.CLOCK

    def __str__(self) -> str:
        if self.name:
            return self.name
        return ("x" if self.is_clock else "p") + str(self.index)

    def __repr__(self) -> str:
        return f"VarId({self.kind.name}, {self.index}, {self.name!r})"


def clock(index: int, name: str = "") -> VarId:
    return VarId(VarKind.CLOCK, index, name)


def param(index: int, name: str = "") -> VarId:
    return VarId(VarKind.PARAM, index, name)


@dataclass(frozen=True)
class LinearInequality:
    """``sum(coef * var) + constant < 0`` (strict) or ``<= 0``.

    ``terms`` never holds a zero coefficient.  An equality is two of these.
    """

    terms: tuple[tuple[VarId, Fraction], ...]
    constant: Fraction
    strict: bool = False

    @classmethod
    def build(cls, coefficients: Mapping[VarId, object], constant: object = 0, strict: bool = False):
        terms = tuple(sorted((v, Fraction(c)) for v, c in coefficients.items() if c))
        return cls(terms, Fraction(constant), strict)

    @property
    def coefficients(self) -> dict[VarId, Fraction]:
        return dict(self.terms)

    def negated(self) -> "LinearInequality":
        return LinearInequality(tuple((v, -c) for v, c in self.terms), -self.constant, not self.strict)

    def holds_at(self, point: Mapping[VarId, object]) -> bool:
        total = self.constant
        for v, c in self.terms:
            total += c * Fraction(point[v])
        return total < 0 if self.strict else total <= 0


# ---------------------------------------------------------------------------
# row algebra

Row = tuple  # (coeffs: tuple[int, ...], const: int, strict: bool)


def _normalize(coeffs: Sequence, const, strict: bool):
    """Scale a row to coprime integers.

    Returns the row, ``True`` for a trivially satisfied row, or ``False`` for a
    trivially violated one.
    """
    if any(isinstance(c, Fraction) and c.denominator != 1 for c in coeffs) or (
        isinstance(const, Fraction) and const.denominator != 1
    ):
        den = reduce(math.lcm, (Fraction(c).denominator for c in coeffs), Fraction(const).denominator)
        coeffs = [int(Fraction(c) * den) for c in coeffs]
        const = int(Fraction(const) * den)
    else:
        coeffs = [int(c) for c in coeffs]
        const = int(const)
    g = 0
    for c in coeffs:
        if c:
            g = math.gcd(g, c)
    if g == 0:
        if const < 0 or (const == 0 and not strict):
            return True
        return False
    g = math.gcd(g, const)
    if g != 1:
        coeffs = [c // g for c in coeffs]
        const //= g
    return (tuple(coeffs), const, strict)


def _clean(rows: Iterable[Row]):
    """Normalize, drop trivial rows, keep the tightest row per direction.

    Returns a sorted tuple of rows, or ``None`` when a row is contradictory.
    """
    best: dict[tuple, tuple[int, bool]] = {}
    for coeffs, const, strict in rows:
        key = best.get(coeffs)
        if key is None or (const, strict) > key:
            best[coeffs] = (const, strict)
    # a pair of opposite rows can already be contradictory: a.v <= -c and a.v >= c'
    out = []
    for coeffs, (const, strict) in best.items():
        if not any(coeffs):
            if const > 0 or (const == 0 and strict):
                return None
            continue
        neg = tuple(-c for c in coeffs)
        other = best.get(neg)
        if other is not None:
            total = const + other[0]
            if total > 0 or (total == 0 and (strict or other[1])):
                return None
        out.append((coeffs, const, strict))
    out.sort()
    return tuple(out)


def _negate(row: Row) -> Row:
    coeffs, const, strict = row
    return (tuple(-c for c in coeffs), -const, not strict)


def _combine(a: Row, ma: int, b: Row, mb: int):
    coeffs = [ma * x + mb * y for x, y in zip(a[0], b[0])]
    return _normalize(coeffs, ma * a[1] + mb * b[1], a[2] or b[2])


def _equality_for(rows: Sequence[Row], j: int):
    index = {r[0]: r for r in rows}
    for r in rows:
        if r[0][j] and not r[2]:
            other = index.get(tuple(-c for c in r[0]))
            if other is not None and other[1] == -r[1] and not other[2]:
                return r, other
    return None


def _fm(rows: Sequence[Row], j: int):
    """Eliminate column ``j``; the column stays in place with zero coefficients."""
    eq = _equality_for(rows, j)
    out = []
    if eq is not None:
        r, r_neg = eq
        aj = r[0][j]
        sgn = 1 if aj > 0 else -1
        for s in rows:
            if s is r or s is r_neg:
                continue
            bj = s[0][j]
            if bj == 0:
                out.append(s)
                continue
            new = _combine(s, abs(aj), r, -bj * sgn)
            if new is False:
                return None
            if new is not True:
                out.append(new)
        return _clean(out)
    pos, neg = [], []
    for r in rows:
        c = r[0][j]
        if c > 0:
            pos.append(r)
        elif c < 0:
            neg.append(r)
        else:
            out.append(r)
    for p in pos:
        pj = p[0][j]
        for n in neg:
            new = _combine(p, -n[0][j], n, pj)
            if new is False:
                return None
            if new is not True:
                out.append(new)
    return _clean(out)


def _fm_cost(rows: Sequence[Row], j: int) -> int:
    pos = neg = 0
    for r in rows:
        c = r[0][j]
        if c > 0:
            pos += 1
        elif c < 0:
            neg += 1
    if pos == 0 and neg == 0:
        return None
    return pos * neg - pos - neg


@lru_cache(maxsize=400_000)
def _rows_empty(rows: tuple) -> bool:
    cur = rows
    while True:
        if cur is None:
            return True
        if not cur:
            return False
        width = len(cur[0][0])
        best_j, best_cost = -1, None
        for j in range(width):
            cost = _fm_cost(cur, j)
            if cost is not None and (best_cost is None or cost < best_cost):
                best_j, best_cost = j, cost
        if best_j < 0:
            return False
        cur = _fm(cur, best_j)


def _eliminate_all(rows, cols: Iterable[int]):
    for j in cols:
        if rows is None:
            return None
        rows = _fm(rows, j)
        if rows is not None:
            rows = _prune(rows)
    return rows


def _prune(rows: tuple):
    """Drop every row implied by the remaining ones (``rows`` is known satisfiable)."""
    if rows is None or len(rows) <= 1:
        return rows
    kept = list(rows)
    i = 0
    while i < len(kept):
        rest = kept[:i] + kept[i + 1:]
        test = _clean(rest + [_negate(kept[i])])
        if test is None or _rows_empty(test):
            kept = rest
        else:
            i += 1
    return tuple(kept)


def _zero_rows(width: int, j: int) -> list[Row]:
    e = [0] * width
    e[j] = 1
    coeffs = tuple(e)
    return [(coeffs, 0, False), (tuple(-c for c in coeffs), 0, False)]


def _lower_zero_row(width: int, j: int) -> Row:
    e = [0] * width
    e[j] = -1
    return (tuple(e), 0, False)


# ---------------------------------------------------------------------------
# polyhedra


class ConvexPolyhedron:
    """Immutable conjunction of linear inequalities over ``roster``.

    ``rows`` is ``None`` for a polyhedron already known to be empty.
    Python equality is structural; use :func:`equal` for set equality.
    """

    __slots__ = ("roster", "rows", "_empty", "_sig", "_pos")

    def __init__(self, roster: Sequence[VarId], rows, *, _clean_rows: bool = False):
        self.roster = tuple(roster)
        if rows is not None and not _clean_rows:
            width = len(self.roster)
            normalized = []
            for r in rows:
                if len(r[0]) != width:
                    raise GeometryError("row width does not match roster")
                n = _normalize(r[0], r[1], r[2])
                if n is False:
                    rows = None
                    break
                if n is not True:
                    normalized.append(n)
            else:
                rows = _clean(normalized)
        self.rows = rows
        self._empty = True if rows is None else None
        self._sig = None
        self._pos = None

    # constructors ---------------------------------------------------------

    @classmethod
    def universe(cls, roster: Sequence[VarId]) -> "ConvexPolyhedron":
        return cls(roster, (), _clean_rows=True)

    @classmethod
    def empty(cls, roster: Sequence[VarId]) -> "ConvexPolyhedron":
        return cls(roster, None, _clean_rows=True)

    @classmethod
    def from_inequalities(cls, roster: Sequence[VarId], inequalities: Iterable[LinearInequality]):
        roster = tuple(roster)
        pos = {v: i for i, v in enumerate(roster)}
        rows = []
        for ineq in inequalities:
            coeffs = [Fraction(0)] * len(roster)
            for v, c in ineq.terms:
                if v not in pos:
                    raise GeometryError(f"variable {v} is not in the roster")
                coeffs[pos[v]] += c
            rows.append((coeffs, ineq.constant, ineq.strict))
        return cls(roster, rows)

    # views ----------------------------------------------------------------

    def position(self, v: VarId) -> int:
        if self._pos is None:
            self._pos = {u: i for i, u in enumerate(self.roster)}
        try:
            return self._pos[v]
        except KeyError:
            raise GeometryError(f"variable {v} is not in the roster") from None

    @property
    def clocks(self) -> tuple[VarId, ...]:
        return tuple(v for v in self.roster if v.is_clock)

    @property
    def params(self) -> tuple[VarId, ...]:
        return tuple(v for v in self.roster if not v.is_clock)

    @property
    def inequalities(self) -> tuple[LinearInequality, ...]:
        if self.rows is None:
            return (LinearInequality((), Fraction(1), False),)
        out = []
        for coeffs, const, strict in self.rows:
            terms = tuple((v, Fraction(c)) for v, c in zip(self.roster, coeffs) if c)
            out.append(LinearInequality(terms, Fraction(const), strict))
        return tuple(out)

    def is_empty(self) -> bool:
        if self._empty is None:
            self._empty = _rows_empty(self.rows)
        return self._empty

    def minimized(self) -> "ConvexPolyhedron":
        """Same set with every redundant inequality removed."""
        if self.is_empty():
            return ConvexPolyhedron.empty(self.roster)
        out = ConvexPolyhedron(self.roster, _prune(self.rows), _clean_rows=True)
        out._empty = False
        return out

    def with_rows(self, extra: Iterable[Row]) -> "ConvexPolyhedron":
        if self.rows is None:
            return self
        return ConvexPolyhedron(self.roster, list(self.rows) + list(extra))

    def embed(self, roster: Sequence[VarId]) -> "ConvexPolyhedron":
        """Re-express over a roster that contains every current variable."""
        roster = tuple(roster)
        if roster == self.roster:
            return self
        if self.rows is None:
            return ConvexPolyhedron.empty(roster)
        target = {v: i for i, v in enumerate(roster)}
        missing = [v for v in self.roster if v not in target]
        if missing:
            raise GeometryError(f"roster lacks {missing[0]}")
        idx = [target[v] for v in self.roster]
        rows = []
        for coeffs, const, strict in self.rows:
            new = [0] * len(roster)
            for i, c in zip(idx, coeffs):
                new[i] = c
            rows.append((tuple(new), const, strict))
        return ConvexPolyhedron(roster, rows)

    def signature(self):
        """Per-variable projected bounds: equal sets always share a signature."""
        if self._sig is None:
            if self.is_empty():
                self._sig = ("empty",)
            else:
                width = len(self.roster)
                sig = []
                for j in range(width):
                    rows = self.rows
                    for k in range(width):
                        if k != j and rows:
                            rows = _fm(rows, k)
                    sig.append(_interval_of(rows, j))
                self._sig = tuple(sig)
        return self._sig

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ConvexPolyhedron)
            and self.roster == other.roster
            and self.rows == other.rows
        )

    def __hash__(self) -> int:
        return hash((self.roster, self.rows))

    def __repr__(self) -> str:
        return f"ConvexPolyhedron({render(self)!r})"

    def __str__(self) -> str:
        return render(self)


def _interval_of(rows, j: int):
    lo = hi = None
    for coeffs, const, strict in rows:
        c = coeffs[j]
        bound = Fraction(-const, c)
        if c > 0:
            if hi is None or bound < hi[0] or (bound == hi[0] and strict):
                hi = (bound, strict)
        elif lo is None or bound > lo[0] or (bound == lo[0] and strict):
            lo = (bound, strict)
    return (lo, hi)


def _same_roster(a: ConvexPolyhedron, b: ConvexPolyhedron) -> None:
    if a.roster != b.roster:
        raise GeometryError(
            f"roster mismatch: {[str(v) for v in a.roster]} vs {[str(v) for v in b.roster]}"
        )


def intersect(a: ConvexPolyhedron, b: ConvexPolyhedron) -> ConvexPolyhedron:
    _same_roster(a, b)
    if a.rows is None or b.rows is None:
        return ConvexPolyhedron.empty(a.roster)
    if not b.rows:
        return a
    if not a.rows:
        return b
    rows = _clean(a.rows + b.rows)
    return ConvexPolyhedron(a.roster, rows, _clean_rows=True)


def is_empty(c: ConvexPolyhedron) -> bool:
    return c.is_empty()


def _drop_columns(c: ConvexPolyhedron, rows, cols: set[int]) -> ConvexPolyhedron:
    roster = tuple(v for i, v in enumerate(c.roster) if i not in cols)
    if rows is None:
        return ConvexPolyhedron.empty(roster)
    keep = [i for i in range(len(c.roster)) if i not in cols]
    new = tuple((tuple(r[0][i] for i in keep), r[1], r[2]) for r in rows)
    out = ConvexPolyhedron(roster, _clean(new), _clean_rows=True)
    out._empty = False
    return out


def eliminate(c: ConvexPolyhedron, v: VarId) -> ConvexPolyhedron:
    """Exact shadow of ``c`` along ``v``; ``v`` leaves the roster."""
    j = c.position(v)
    if c.is_empty():
        return ConvexPolyhedron.empty(tuple(u for u in c.roster if u != v))
    return _drop_columns(c, _eliminate_all(c.rows, [j]), {j})


def project_to_params(c: ConvexPolyhedron) -> ConvexPolyhedron:
    cols = [i for i, v in enumerate(c.roster) if v.is_clock]
    if c.is_empty():
        return ConvexPolyhedron.empty(c.params)
    return _drop_columns(c, _eliminate_all(c.rows, _elimination_order(c.rows, cols)), set(cols))


def _elimination_order(rows, cols: list[int]) -> list[int]:
    # cheapest column first; good enough for a handful of variables
    return sorted(cols, key=lambda j: _fm_cost(rows, j) or 0)


def _eliminate_in_place(c: ConvexPolyhedron, cols: Sequence[int]):
    """FM over ``cols`` keeping the roster; returns rows or ``None`` if empty."""
    if c.is_empty():
        return None
    return _eliminate_all(c.rows, cols)


def time_elapse(c: ConvexPolyhedron, clocks: Iterable[VarId] | None = None) -> ConvexPolyhedron:
    """All points reachable from ``c`` by letting the given clocks grow together."""
    if c.is_empty():
        return c
    if clocks is None:
        cols = [i for i, v in enumerate(c.roster) if v.is_clock]
    else:
        cols = [c.position(v) for v in clocks]
    if not cols:
        return c
    width = len(c.roster)
    rows = []
    # substitute x -> x - d, with d a fresh last column
    for coeffs, const, strict in c.rows:
        d = -sum(coeffs[j] for j in cols)
        rows.append((coeffs + (d,), const, strict))
    rows.append(((0,) * width + (-1,), 0, False))
    rows = _clean(rows)
    if rows is None:
        return ConvexPolyhedron.empty(c.roster)
    rows = _eliminate_all(rows, [width])
    if rows is None:
        return ConvexPolyhedron.empty(c.roster)
    out = tuple((r[0][:width], r[1], r[2]) for r in rows)
    res = ConvexPolyhedron(c.roster, _clean(out), _clean_rows=True)
    res._empty = False
    return res


def reset(c: ConvexPolyhedron, clocks: Iterable[VarId]) -> ConvexPolyhedron:
    cols = sorted({c.position(v) for v in clocks})
    for j in cols:
        if not c.roster[j].is_clock:
            raise GeometryError(f"{c.roster[j]} is not a clock")
    if not cols:
        return c
    rows = _eliminate_in_place(c, cols)
    if rows is None:
        return ConvexPolyhedron.empty(c.roster)
    extra = []
    for j in cols:
        extra.extend(_zero_rows(len(c.roster), j))
    out = ConvexPolyhedron(c.roster, _clean(rows + tuple(extra)), _clean_rows=True)
    out._empty = False
    return out


def cylindrify(c: ConvexPolyhedron, x: VarId) -> ConvexPolyhedron:
    """Forget every constraint on clock ``x`` except ``x >= 0``."""
    j = c.position(x)
    if not x.is_clock:
        raise GeometryError(f"{x} is not a clock")
    rows = _eliminate_in_place(c, [j])
    if rows is None:
        return ConvexPolyhedron.empty(c.roster)
    out = ConvexPolyhedron(
        c.roster, _clean(rows + (_lower_zero_row(len(c.roster), j),)), _clean_rows=True
    )
    out._empty = False
    return out


def contains(a: ConvexPolyhedron, b: ConvexPolyhedron) -> bool:
    """True iff ``b`` is a subset of ``a``."""
    _same_roster(a, b)
    if b.is_empty():
        return True
    if a.rows is None:
        return False
    brows = b.rows
    for row in a.rows:
        if row in brows:
            continue
        test = _clean(brows + (_negate(row),))
        if not (test is None or _rows_empty(test)):
            return False
    return True


def equal(a: ConvexPolyhedron, b: ConvexPolyhedron) -> bool:
    _same_roster(a, b)
    if a.rows == b.rows:
        return True
    if a.signature() != b.signature():
        return False
    return contains(a, b) and contains(b, a)


def valuate_params(c: ConvexPolyhedron, valuation: Mapping[VarId, object]) -> ConvexPolyhedron:
    """Substitute parameter values; the result ranges over clocks only."""
    pcols = [i for i, v in enumerate(c.roster) if not v.is_clock]
    ccols = [i for i, v in enumerate(c.roster) if v.is_clock]
    roster = tuple(c.roster[i] for i in ccols)
    for i in pcols:
        if c.roster[i] not in valuation:
            raise GeometryError(f"no value for parameter {c.roster[i]}")
    if c.rows is None:
        return ConvexPolyhedron.empty(roster)
    values = {i: Fraction(valuation[c.roster[i]]) for i in pcols}
    rows = []
    for coeffs, const, strict in c.rows:
        k = Fraction(const) + sum((coeffs[i] * values[i] for i in pcols), Fraction(0))
        rows.append(([coeffs[i] for i in ccols], k, strict))
    return ConvexPolyhedron(roster, rows)


def sample_membership(c: ConvexPolyhedron, point: Mapping[VarId, object]) -> bool:
    for v in c.roster:
        if v not in point:
            raise GeometryError(f"point has no coordinate for {v}")
    if c.rows is None:
        return False
    values = [Fraction(point[v]) for v in c.roster]
    for coeffs, const, strict in c.rows:
        total = const + sum((a * x for a, x in zip(coeffs, values) if a), Fraction(0))
        if total > 0 or (strict and total == 0):
            return False
    return True


def closure(c: ConvexPolyhedron) -> ConvexPolyhedron:
    """Topological closure: every strict inequality made non-strict."""
    if c.rows is None:
        return c
    return ConvexPolyhedron(c.roster, [(r[0], r[1], False) for r in c.rows])


def constraint_row(c: ConvexPolyhedron, coefficients: Mapping[VarId, object], constant=0, strict=False):
    """Row for ``sum(coef*var) + constant (<|<=) 0`` over ``c``'s roster."""
    coeffs = [Fraction(0)] * len(c.roster)
    for v, a in coefficients.items():
        coeffs[c.position(v)] += Fraction(a)
    n = _normalize(coeffs, Fraction(constant), strict)
    if n is True:
        return None
    if n is False:
        return ((0,) * len(c.roster), 1, False)
    return n


def add_constraint(c: ConvexPolyhedron, coefficients: Mapping[VarId, object], constant=0, strict=False):
    row = constraint_row(c, coefficients, constant, strict)
    if row is None:
        return c
    return c.with_rows([row])


# ---------------------------------------------------------------------------
# unions


class PolySet:
    """Finite union of non-empty convex polyhedra over one roster."""

    __slots__ = ("roster", "members")

    def __init__(self, roster: Sequence[VarId], members: Iterable[ConvexPolyhedron] = ()):
        self.roster = tuple(roster)
        kept = []
        for m in members:
            if m.roster != self.roster:
                raise GeometryError("PolySet member over a different roster")
            if not m.is_empty():
                kept.append(m)
        self.members = tuple(kept)

    def __iter__(self):
        return iter(self.members)

    def __len__(self) -> int:
        return len(self.members)

    def is_empty(self) -> bool:
        return not self.members

    def pruned(self) -> "PolySet":
        """Drop members contained in another member (first of equals is kept)."""
        out: list[ConvexPolyhedron] = []
        for m in self.members:
            if any(contains(o, m) for o in out):
                continue
            out = [o for o in out if not contains(m, o)]
            out.append(m)
        return PolySet(self.roster, out)

    def contains_point(self, point: Mapping[VarId, object]) -> bool:
        return any(sample_membership(m, point) for m in self.members)

    def covers(self, c: ConvexPolyhedron) -> bool:
        """True iff ``c`` is a subset of the union."""
        return _covered(c, self.members)

    def set_equal(self, other: "PolySet") -> bool:
        return all(other.covers(m) for m in self.members) and all(
            self.covers(m) for m in other.members
        )

    def union(self, other: "PolySet") -> "PolySet":
        return PolySet(self.roster, self.members + other.members)

    def map(self, fn) -> "PolySet":
        members = [fn(m) for m in self.members]
        roster = members[0].roster if members else self.roster
        return PolySet(roster, members)

    def render(self) -> list[str]:
        return [render(m) for m in self.members]

    def __repr__(self) -> str:
        return "PolySet(" + " | ".join(self.render()) + ")"


def _covered(c: ConvexPolyhedron, members: Sequence[ConvexPolyhedron]) -> bool:
    if c.is_empty():
        return True
    if not members:
        return False
    first, rest = members[0], members[1:]
    if first.rows is None:
        return _covered(c, rest)
    # c minus first is the union of c & not(row) over first's rows
    for row in first.rows:
        piece = c.with_rows([_negate(row)])
        if not piece.is_empty() and not _covered(piece, rest):
            return False
    return True


# ---------------------------------------------------------------------------
# text


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _side(terms: list[tuple[VarId, int]], const: Fraction | None) -> str:
    parts = []
    for v, a in terms:
        name = str(v)
        coef = "" if a == 1 else f"{a}*"
        parts.append(f"{coef}{name}")
    text = " + ".join(parts)
    if const is not None and const != 0:
        if not text:
            return _fmt(const)
        sign = "+" if const > 0 else "-"
        text += f" {sign} {_fmt(abs(const))}"
    return text or "0"


def _render_row(roster, coeffs, const, strict, equality: bool) -> str:
    terms = [(v, a) for v, a in zip(roster, coeffs) if a]
    op = "=" if equality else ("<" if strict else "<=")
    if len(terms) == 1:
        v, a = terms[0]
        bound = Fraction(-const, a)
        if a > 0 or equality:
            return f"{v} {op} {_fmt(bound)}"
        return f"{_fmt(bound)} {op} {v}"
    pos = [(v, a) for v, a in terms if a > 0]
    neg = [(v, -a) for v, a in terms if a < 0]
    if equality and not pos:
        pos, neg, const = neg, [], -const
    # pos + const (op) neg
    if not neg:
        return f"{_side(pos, None)} {op} {_fmt(Fraction(-const))}"
    if not pos:
        return f"{_fmt(Fraction(const))} {op} {_side(neg, None)}"
    return f"{_side(pos, None)} {op} {_side(neg, Fraction(-const))}"


def _row_key(roster, row):
    coeffs = row[0]
    nz = [i for i, a in enumerate(coeffs) if a]
    first = nz[0]
    lower_first = 0 if coeffs[first] < 0 else 1
    return (len(nz), nz, lower_first, tuple(abs(a) for a in coeffs), row[1])


def render(c: ConvexPolyhedron) -> str:
    """``"0 < p & p <= 5"``-style text; ``false`` when empty, ``true`` for the universe."""
    if c.rows is None or c.is_empty():
        return "false"
    if not c.rows:
        return "true"
    index = {r[0]: r for r in c.rows}
    done = set()
    pieces = []
    for row in sorted(c.rows, key=lambda r: _row_key(c.roster, r)):
        if row[0] in done:
            continue
        neg = index.get(tuple(-a for a in row[0]))
        is_eq = (
            neg is not None and not row[2] and not neg[2] and neg[1] == -row[1]
        )
        if is_eq:
            done.add(neg[0])
            # orient so the constant lands on the right with a non-negative sign
            first = next(a for a in row[0] if a)
            base = row if first > 0 else neg
            other = neg if base is row else row
            if base[1] > 0 and other[1] <= 0:
                base = other
            pieces.append(_render_row(c.roster, base[0], base[1], False, True))
        else:
            pieces.append(_render_row(c.roster, row[0], row[1], row[2], False))
        done.add(row[0])
    return " & ".join(pieces)


def parse_polyhedron(text: str, roster: Sequence[VarId]) -> ConvexPolyhedron:
    """Inverse of :func:`render`: ``&``-separated (chained) comparisons."""
    roster = tuple(roster)
    names = {str(v): v for v in roster}
    stripped = text.strip()
    if stripped == "false":
        return ConvexPolyhedron.empty(roster)
    if stripped in ("true", ""):
        return ConvexPolyhedron.universe(roster)
    ts = TokenStream(tokenize(text))
    ineqs: list[LinearInequality] = []
    while True:
        for left, rel, right, tok in parse_comparison_chain(ts):
            diff = left - right  # diff rel 0
            for name, t in diff.where.items():
                if name not in names:
                    raise SyntaxProblem(f"unknown variable {name!r}", t.line, t.col)
            coeffs = {names[n]: a for n, a in diff.terms.items()}
            neg = {v: -a for v, a in coeffs.items()}
            k = diff.constant
            if rel in ("<", "<="):
                ineqs.append(LinearInequality.build(coeffs, k, rel == "<"))
            elif rel in (">", ">="):
                ineqs.append(LinearInequality.build(neg, -k, rel == ">"))
            else:
                ineqs.append(LinearInequality.build(coeffs, k))
                ineqs.append(LinearInequality.build(neg, -k))
        if not (ts.accept("&") or ts.accept("&&")):
            break
    tok = ts.peek()
    if tok.kind != "eof":
        raise ts.error(f"unexpected {tok.text!r}", tok)
    return ConvexPolyhedron.from_inequalities(roster, ineqs)
