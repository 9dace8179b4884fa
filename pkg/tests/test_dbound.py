import itertools
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from probnorm.dbound import (
    AnalyticSet,
    BoundClass,
    FiniteSet,
    PairSet,
    PreconditionError,
    check_mg2pn_axioms,
    class_predicates,
    classify,
    classify_pair,
    d_bounded_via_witness,
    minkowski_sum,
    pair_radius,
    pair_sum_closure_check,
    phi,
    radius,
    scaling_closure_check,
    sum_closure_check,
    witness_G_check,
)
from probnorm.dfalgebra import (
    PiecewiseConstant,
    Scaled,
    StandardRatio,
    StepAt,
    canonical_grid,
    epsilon,
    equal,
    evaluate,
)
from probnorm.geometry import Point
from probnorm.menger2pn import indicator_space, standard_space

STD, IND = standard_space(), indicator_space()
P = Point.of
A3 = FiniteSet((P(1, 0), P(0, 1), P(2, 0)))
LINE = AnalyticSet(0, label="line")
HALF = AnalyticSet(radius_rule=Scaled(StandardRatio(1), 0.5), label="half")
HUGE = AnalyticSet(math.inf, label="unbounded")

coord = st.integers(-5, 5)
pt2 = st.tuples(coord, coord).map(Point)
finite_sets = st.lists(pt2, min_size=1, max_size=6).map(lambda ps: FiniteSet(tuple(ps)))


def oracle_max_area(points):
    best = 0
    for x, y in itertools.product(points, repeat=2):
        best = max(best, abs(np.linalg.det(np.array([x.as_floats(), y.as_floats()]))))
    return best


def test_phi_examples():
    for t in (0.5, 1, 3):
        assert phi(A3, STD, t) == pytest.approx(t / (t + 2))
        assert phi(LINE, STD, t) == 1
        assert phi(HUGE, STD, t) == 0


def test_radius_examples():
    assert equal(radius(A3, STD), StandardRatio(2))
    R = radius(A3, IND)
    assert equal(R, StepAt(2)) and evaluate(R, 3) == 1
    assert equal(radius(LINE, STD), epsilon(0))


@pytest.mark.parametrize("A, space, kind", [
    (A3, IND, BoundClass.CERTAINLY_BOUNDED),
    (AnalyticSet(2), STD, BoundClass.PERHAPS_BOUNDED),
    (HALF, STD, BoundClass.PERHAPS_UNBOUNDED),
    (HUGE, STD, BoundClass.CERTAINLY_UNBOUNDED),
])
def test_classification_fixtures(A, space, kind):
    c = classify(A, space)
    assert c.kind is kind
    preds = class_predicates(radius(A, space))
    assert [k for k, v in preds.items() if v] == [kind]


def test_certainly_bounded_x0():
    c = classify(A3, IND)
    assert c.x0 == 3
    assert evaluate(c.radius, c.x0) == 1


def test_limits():
    assert classify(HALF, STD).limit == 0.5
    assert classify(A3, STD).limit == 1
    assert classify(HUGE, STD).limit == 0


def test_witness_examples():
    assert witness_G_check(A3, STD, radius(A3, STD))
    assert witness_G_check(LINE, STD, epsilon(0))
    assert not witness_G_check(A3, STD, epsilon(0))
    with pytest.raises(PreconditionError):
        witness_G_check(A3, STD, Scaled(StandardRatio(1), 0.5))


@pytest.mark.parametrize("G", [StandardRatio(2.0 ** k) for k in (-5, 0, 10, 40)]
                         + [StepAt(2.0 ** k) for k in (-5, 0, 19)]
                         + [PiecewiseConstant(((0, 0.5), (2.0 ** 19, 1)))])
def test_unbounded_rejects_every_witness(G):
    assert not witness_G_check(HUGE, STD, G)


def test_witness_route_matches_classification():
    for A, space in [(A3, IND), (A3, STD), (LINE, STD), (HALF, STD), (HUGE, STD)]:
        assert d_bounded_via_witness(A, space) == classify(A, space).d_bounded


def test_pair_examples():
    c = classify_pair(PairSet(FiniteSet((P(1, 0),)), FiniteSet((P(0, 1),))), STD)
    assert c.kind is BoundClass.PERHAPS_BOUNDED and equal(c.radius, StandardRatio(1))
    assert classify_pair(PairSet(LINE, LINE), STD).kind is BoundClass.CERTAINLY_BOUNDED
    assert classify_pair(PairSet(A3, HUGE), STD).kind is BoundClass.CERTAINLY_UNBOUNDED


def test_scaling_examples():
    pair = PairSet(A3, FiniteSet((P(0, 1), P(1, 1))))
    for alpha in (3, 1, -1):
        assert scaling_closure_check(alpha, pair, STD)
    D = 2
    scaled = pair_radius(PairSet(FiniteSet(tuple(p * 3 for p in A3.points)), FiniteSet((P(0, 1),))), STD)
    assert equal(scaled, StandardRatio(3 * D))


def test_scaling_needs_bounded_pair():
    with pytest.raises(PreconditionError):
        scaling_closure_check(2, PairSet(A3, HUGE), STD)


def test_sum_with_origin_is_identity():
    B = FiniteSet((P(0, 1), P(2, 3)))
    rep = sum_closure_check(A3, FiniteSet((P(0, 0),)), B, STD)
    assert rep.passed and rep.split_min
    assert minkowski_sum(A3, FiniteSet((P(0, 0),))) == A3


def test_pair_sum_with_origin():
    Q = PairSet(FiniteSet((P(0, 0),)), FiniteSet((P(0, 0),)))
    rep = pair_sum_closure_check(PairSet(A3, FiniteSet((P(0, 1),))), Q, STD)
    assert rep.passed and rep.split_min


def test_pointwise_min_bound_fails_on_doubling():
    # A = C = {(1,0)}, B = {(0,1)}: the sum pair has area 2, the parts area 1,
    # so the sum radius t/(t+2) sits strictly below min(t/(t+1), t/(t+1))
    single = FiniteSet((P(1, 0),))
    rep = sum_closure_check(single, single, FiniteSet((P(0, 1),)), STD)
    assert rep.conclusion
    assert not rep.pointwise_min
    assert rep.split_min
    assert rep.counterexamples[0][0] == "pointwise"


@given(finite_sets)
def test_radius_matches_oracle(A):
    R = radius(A, STD)
    expected = StandardRatio(oracle_max_area(A.points))
    for t in canonical_grid(R, expected):
        assert evaluate(R, t) == pytest.approx(evaluate(expected, t), abs=1e-12)


@given(finite_sets, st.sampled_from([STD, IND]))
def test_classification_total(A, space):
    preds = class_predicates(radius(A, space))
    assert sum(preds.values()) == 1
    assert classify(A, space).d_bounded


@given(finite_sets, finite_sets, finite_sets, st.sampled_from([STD, IND]))
def test_split_min_bound_holds(A, C, B, space):
    rep = sum_closure_check(A, C, B, space)
    assert rep.conclusion and rep.split_min


@given(finite_sets, finite_sets, finite_sets, finite_sets)
def test_pair_sum_split_bound_holds(A, B, C, D):
    rep = pair_sum_closure_check(PairSet(A, B), PairSet(C, D), STD)
    assert rep.conclusion and rep.split_min


@given(finite_sets, finite_sets,
       st.floats(-10, 10, allow_nan=False).filter(lambda a: abs(a) > 1e-6))
def test_scaling_property(A, B, alpha):
    assert scaling_closure_check(alpha, PairSet(A, B), STD)


def test_mg2pn_split_reading_passes():
    reports = check_mg2pn_axioms(STD, trials=300, seed=5)
    assert all(r.passed for r in reports), [(r.axiom, r.failure_count) for r in reports]
    reports = check_mg2pn_axioms(IND, trials=300, seed=5)
    assert all(r.passed for r in reports)


def test_mg2pn_pointwise_reading_fails():
    reports = {r.axiom: r for r in check_mg2pn_axioms(STD, trials=300, seed=5, min_form="pointwise")}
    for k in ("N1", "N2", "N3", "N4"):
        assert reports[k].passed
    assert not reports["N5"].passed and not reports["N6"].passed
