import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pzone.geometry import (
    ConvexPolyhedron,
    GeometryError,
    LinearInequality,
    PolySet,
    contains,
    cylindrify,
    eliminate,
    equal,
    intersect,
    is_empty,
    parse_polyhedron,
    project_to_params,
    render,
    reset,
    sample_membership,
    time_elapse,
    valuate_params,
)
from support import P, Q, X, Y, exists_extension, random_polyhedron

R2 = (X, Y)
R3 = (X, Y, P)


def poly(text, roster=R3):
    return parse_polyhedron(text, roster)


def grid(roster, lo=-2, hi=6, step=Fraction(1, 2)):
    n = int((hi - lo) / step) + 1
    values = [lo + i * step for i in range(n)]
    for combo in itertools.product(values, repeat=len(roster)):
        yield dict(zip(roster, combo))


def same_points(a, b, roster):
    return all(sample_membership(a, w) == sample_membership(b, w) for w in grid(roster))


# -- intersect ---------------------------------------------------------------


def test_intersect_disjoint_intervals_is_empty():
    assert is_empty(intersect(poly("x <= 1"), poly("x >= 2")))


def test_intersect_with_universe_is_identity():
    c = poly("x <= y & y <= 3")
    assert intersect(c, ConvexPolyhedron.universe(R3)) == c


def test_intersect_membership():
    c = intersect(poly("x <= y"), poly("y <= 3"))
    assert sample_membership(c, {X: 1, Y: 2, P: 0})
    assert not sample_membership(c, {X: 4, Y: 5, P: 0})


def test_intersect_roster_mismatch():
    with pytest.raises(GeometryError):
        intersect(poly("x <= 1", R2), poly("x <= 1", R3))


# -- emptiness ---------------------------------------------------------------


def test_strict_self_comparison_is_empty():
    assert is_empty(poly("x < x"))


def test_universe_not_empty():
    assert not is_empty(ConvexPolyhedron.universe(R3))


def test_empty_through_parameter():
    assert is_empty(poly("x <= p & p <= 2 & x >= 3"))


def test_strictness_matters_for_emptiness():
    assert not is_empty(poly("x <= 1 & x >= 1"))
    assert is_empty(poly("x < 1 & x >= 1"))
    assert is_empty(poly("x <= y & y < p & p <= x"))
    assert not is_empty(poly("x <= y & y <= p & p <= x"))


# -- elimination ---------------------------------------------------------------


def test_eliminate_chain():
    out = eliminate(poly("x <= y & y <= 3", R2), Y)
    assert out.roster == (X,)
    assert equal(out, parse_polyhedron("x <= 3", (X,)))


def test_eliminate_unconstrained_variable():
    out = eliminate(poly("x >= 0", R2), Y)
    assert equal(out, parse_polyhedron("x >= 0", (X,)))


def test_eliminate_strict_pair_empty():
    assert is_empty(eliminate(poly("x < p & p < x"), P))


def test_eliminate_prunes_redundant_rows():
    out = eliminate(poly("x <= y & y <= 3 & x <= 5 & x <= 7", R2), Y)
    assert len(out.rows) == 1


def test_project_to_params_drops_clocks():
    out = project_to_params(poly("x = y & x <= 1 & 0 <= p & p <= 5"))
    assert out.roster == (P,)
    assert render(out) == "0 <= p & p <= 5"


def test_project_to_params_empty():
    assert is_empty(project_to_params(ConvexPolyhedron.empty(R3)))


def test_project_target_zone():
    c = poly("1 < y & x < p & x <= 1 & x <= y & 0 <= p & p <= 5 & x >= 0 & y >= 0")
    assert render(project_to_params(c)) == "0 < p & p <= 5"


# -- time elapse, reset, cylindrification -----------------------------------


def test_time_elapse_from_origin():
    out = time_elapse(poly("x = 0 & y = 0"))
    assert equal(out, poly("x = y & x >= 0"))


def test_time_elapse_idempotent_on_diagonal():
    c = poly("x = y & x >= 0")
    assert equal(time_elapse(c), c)


def test_time_elapse_offset():
    out = time_elapse(poly("x = 0 & y = 1"))
    assert equal(out, poly("y = x + 1 & x >= 0"))
    assert sample_membership(out, {X: Fraction(5, 2), Y: Fraction(7, 2), P: 0})


def test_time_elapse_keeps_parameters():
    out = time_elapse(poly("x = 0 & y = p & p <= 2"))
    assert equal(out, poly("y = x + p & x >= 0 & p <= 2"))


def test_reset_empty_set_is_identity():
    c = poly("x <= y & y <= 3")
    assert reset(c, []) == c


def test_reset_one_clock():
    assert equal(reset(poly("x = 2 & y = 2"), [X]), poly("x = 0 & y = 2"))


def test_reset_after_elimination():
    out = reset(poly("x <= y & y <= x + 1 & x <= 1 & x >= 0"), [X])
    assert equal(out, poly("x = 0 & 0 <= y & y <= 2"))


def test_reset_rejects_parameters():
    with pytest.raises(GeometryError):
        reset(poly("x <= p"), [P])


def test_cylindrify_forgets_clock():
    assert equal(cylindrify(poly("x = 3 & y = 1"), X), poly("x >= 0 & y = 1"))


def test_cylindrify_identity_on_free_clock():
    c = poly("x >= 0")
    assert equal(cylindrify(c, X), c)


# -- inclusion and equality --------------------------------------------------


def test_contains_empty():
    assert contains(poly("x <= 1"), ConvexPolyhedron.empty(R3))


def test_contains_intervals():
    assert contains(poly("x <= 5"), poly("x <= 3"))
    assert not contains(poly("x <= 3"), poly("x <= 5"))


def test_contains_diagonal():
    assert contains(poly("x <= y"), poly("x <= 1 & y >= 2"))


def test_equal_cases():
    c = poly("x <= y & y < p")
    assert equal(c, c)
    assert equal(poly("x <= 1 & x <= 2"), poly("x <= 1"))
    assert not equal(poly("x = y"), poly("x <= y"))


def test_equal_detects_differently_written_sets():
    assert equal(poly("x <= y & y <= x"), poly("x = y"))
    assert equal(poly("2*x <= 2 & x + y <= 3 & y <= 1"), poly("x <= 1 & y <= 1"))


# -- valuation and sampling --------------------------------------------------


def test_valuate_simple():
    out = valuate_params(poly("x < p"), {P: 2})
    assert out.roster == (X, Y)
    assert equal(out, poly("x < 2", R2))


def test_valuate_linear_expression():
    roster = (X, P, Q)
    c = parse_polyhedron("x <= 2*p - q + 1", roster)
    out = valuate_params(c, {P: 5, Q: -3})
    assert equal(out, parse_polyhedron("x <= 14", (X,)))


def test_valuate_empty():
    assert is_empty(valuate_params(ConvexPolyhedron.empty(R3), {P: 1}))


def test_valuate_missing_parameter():
    with pytest.raises(GeometryError):
        valuate_params(poly("x <= p"), {})


def test_sample_membership_strictness():
    assert sample_membership(poly("x <= 1"), {X: 1, Y: 0, P: 0})
    assert not sample_membership(poly("x < 1"), {X: 1, Y: 0, P: 0})
    assert not sample_membership(ConvexPolyhedron.empty(R3), {X: 0, Y: 0, P: 0})
    assert sample_membership(poly("x <= p"), {X: 3, Y: 0, P: 3})


def test_sample_membership_missing_coordinate():
    with pytest.raises(GeometryError):
        sample_membership(poly("x <= 1"), {X: 0})


# -- text --------------------------------------------------------------------


@pytest.mark.parametrize(
    "text",
    [
        "0 < p & p <= 5",
        "x <= y",
        "y = x + 1",
        "x + y <= 3/2",
        "true",
        "false",
        "2*x <= y + 1",
    ],
)
def test_render_parse_round_trip(text):
    c = poly(text)
    again = poly(render(c))
    assert equal(c, again)


def test_render_shapes():
    assert render(poly("p > 0 & p <= 5")) == "0 < p & p <= 5"
    assert render(poly("x <= 3/2")) == "x <= 3/2"
    assert render(poly("x = 0 & y = 0")) == "x = 0 & y = 0"
    assert render(ConvexPolyhedron.universe(R3)) == "true"
    assert render(ConvexPolyhedron.empty(R3)) == "false"


def test_parse_rejects_unknown_variable():
    with pytest.raises(ValueError):
        poly("z <= 1")


def test_inequality_negation():
    ineq = LinearInequality.build({X: 1}, -1)
    point = {X: 1}
    assert ineq.holds_at(point)
    assert not ineq.negated().holds_at(point)


# -- unions ------------------------------------------------------------------


def test_polyset_prunes_contained_members():
    s = PolySet(R3, [poly("x <= 1"), poly("x <= 3"), poly("x >= 5"), poly("x < 0 & x > 0")]).pruned()
    assert len(s) == 2


def test_polyset_equality_with_different_cuts():
    a = PolySet(R3, [poly("x <= 2"), poly("x >= 2")])
    b = PolySet(R3, [poly("x < 1"), poly("x >= 1")])
    assert a.set_equal(b)
    c = PolySet(R3, [poly("x < 1"), poly("x > 1")])
    assert not a.set_equal(c)


# -- properties on random systems ---------------------------------------------

coef = st.integers(-3, 3)
ROSTER4 = (X, Y, P, Q)


@st.composite
def systems(draw, roster=ROSTER4, max_rows=8):
    n = draw(st.integers(1, max_rows))
    ineqs = []
    for _ in range(n):
        coeffs = {v: draw(coef) for v in roster}
        ineqs.append(LinearInequality.build(coeffs, draw(st.integers(-6, 6)), draw(st.booleans())))
    return ConvexPolyhedron.from_inequalities(roster, ineqs)


rationals = st.builds(Fraction, st.integers(-12, 12), st.integers(1, 4))


@settings(max_examples=60, deadline=None)
@given(systems(), st.sampled_from(ROSTER4), st.lists(st.tuples(rationals, rationals, rationals), min_size=20, max_size=20))
def test_elimination_matches_interval_check(c, v, points):
    out = eliminate(c, v)
    rest = out.roster
    for pt in points:
        w = dict(zip(rest, pt))
        assert sample_membership(out, w) == exists_extension(c, v, w)


@settings(max_examples=60, deadline=None)
@given(systems(), st.sampled_from(ROSTER4), st.sampled_from(ROSTER4))
def test_elimination_order_irrelevant(c, u, v):
    if u == v:
        return
    a = eliminate(eliminate(c, u), v)
    b = eliminate(eliminate(c, v), u)
    assert a.roster == b.roster or set(a.roster) == set(b.roster)
    assert equal(a, b.embed(a.roster))


@settings(max_examples=60, deadline=None)
@given(systems())
def test_time_elapse_idempotent(c):
    once = time_elapse(c)
    assert equal(time_elapse(once), once)


@settings(max_examples=60, deadline=None)
@given(systems())
def test_reset_idempotent(c):
    once = reset(c, [X])
    assert equal(reset(once, [X]), once)


@settings(max_examples=40, deadline=None)
@given(systems(), systems(), systems())
def test_contains_is_a_preorder(a, b, c):
    assert contains(a, a)
    if contains(a, b) and contains(b, c):
        assert contains(a, c)
    # the cheap chain a ⊇ a∧b ⊇ a∧b∧c always holds
    ab = intersect(a, b)
    assert contains(a, ab) and contains(ab, intersect(ab, c))


@settings(max_examples=50, deadline=None)
@given(systems(), systems(), rationals, rationals)
def test_valuation_commutes(a, b, p, q):
    v = {P: p, Q: q}
    assert equal(valuate_params(intersect(a, b), v), intersect(valuate_params(a, v), valuate_params(b, v)))
    assert equal(valuate_params(time_elapse(a), v), time_elapse(valuate_params(a, v)))
    assert equal(valuate_params(reset(a, [Y]), v), reset(valuate_params(a, v), [Y]))
    assert equal(valuate_params(cylindrify(a, X), v), cylindrify(valuate_params(a, v), X))
    assert equal(valuate_params(eliminate(a, X), v), eliminate(valuate_params(a, v), X))


def test_empty_flag_matches_fresh_check():
    rng = random.Random(7)
    for _ in range(100):
        c = random_polyhedron(rng, ROSTER4, rng.randint(1, 8))
        flag = c.is_empty()
        fresh = ConvexPolyhedron(c.roster, c.rows)
        assert fresh.is_empty() == flag
