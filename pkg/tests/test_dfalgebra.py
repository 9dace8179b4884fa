import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from probnorm.dfalgebra import (
    MinOf,
    PiecewiseConstant,
    Scaled,
    StandardRatio,
    StepAt,
    canonical_grid,
    classify_df,
    epsilon,
    equal,
    evaluate,
    exact_leq,
    left_limit,
    leq,
    min_of,
    pointwise_min,
)

INF = math.inf

finite = st.floats(-50, 50, allow_nan=False)
nonneg = st.floats(0, 50, allow_nan=False)


@st.composite
def piecewise(draw):
    ts = sorted(set(draw(st.lists(finite, min_size=1, max_size=5))))
    vs = sorted(draw(st.lists(st.floats(0, 1), min_size=len(ts), max_size=len(ts))))
    return PiecewiseConstant(tuple(zip(ts, vs)))


base_dfs = st.one_of(
    finite.map(StepAt),
    nonneg.map(StandardRatio),
    piecewise(),
)
dfs = st.one_of(
    base_dfs,
    st.builds(Scaled, base_dfs, st.floats(0, 1)),
    st.lists(base_dfs, min_size=1, max_size=3).map(min_of),
)
delta_plus = st.one_of(
    nonneg.map(StepAt),
    nonneg.map(StandardRatio),
    st.lists(nonneg.map(StandardRatio), min_size=1, max_size=3).map(min_of),
)


# -- oracle examples ---------------------------------------------------------

def test_step_values():
    assert evaluate(StepAt(0), 1) == 1
    assert evaluate(StepAt(0), 0) == 0
    assert evaluate(epsilon(0), 0.001) == 1
    assert evaluate(epsilon(5), 5) == 0


def test_ratio_values():
    assert evaluate(StandardRatio(1), 1) == 0.5
    assert evaluate(StandardRatio(2), INF) == 1
    assert evaluate(StandardRatio(2), -INF) == 0
    assert evaluate(StandardRatio(3), 0) == 0
    assert evaluate(StandardRatio(0), 1e-300) == 1


def test_exact_arguments_stay_exact():
    assert evaluate(StandardRatio(2), Fraction(1)) == Fraction(1, 3)


def test_left_limits():
    assert left_limit(StepAt(2), 2) == 0
    assert left_limit(StepAt(2), 3) == 1
    assert left_limit(StandardRatio(2), INF) == 1
    assert left_limit(PiecewiseConstant(((1, 0.5),)), INF) == 0.5
    with pytest.raises(ValueError):
        left_limit(StepAt(0), -INF)


def test_min_examples():
    assert equal(pointwise_min(epsilon(1), epsilon(2)), epsilon(2))
    assert pointwise_min(StandardRatio(1), StandardRatio(2)) == StandardRatio(2)
    F = PiecewiseConstant(((0, 0.2), (3, 0.9)))
    assert equal(pointwise_min(F, F), F)


def test_min_keeps_mixed_variants():
    H = pointwise_min(StandardRatio(1), StepAt(3))
    assert isinstance(H, MinOf)
    assert evaluate(H, 2) == 0
    assert evaluate(H, 4) == pytest.approx(0.8)


def test_leq_examples():
    assert leq(StandardRatio(2), StandardRatio(1))
    assert not leq(epsilon(0), StandardRatio(1), [1.0])
    assert not leq(epsilon(0), StandardRatio(1))
    assert exact_leq(StandardRatio(2), StandardRatio(1)) is True
    assert exact_leq(epsilon(0), StandardRatio(1)) is False


def test_classify_examples():
    m = classify_df(epsilon(0))
    assert (m.in_delta, m.in_delta_plus, m.in_d, m.in_d_plus) == (True, True, True, True)
    m = classify_df(StandardRatio(3))
    assert m.in_delta_plus and m.in_d_plus
    m = classify_df(PiecewiseConstant(((0, 0.5),)))
    assert m.in_delta_plus and not m.in_d_plus
    m = classify_df(StepAt(-1))
    assert m.in_d and not m.in_delta_plus


def test_piecewise_validation():
    with pytest.raises(ValueError):
        PiecewiseConstant(((1, 0.5), (0, 0.7)))
    with pytest.raises(ValueError):
        PiecewiseConstant(((0, 0.7), (1, 0.5)))
    with pytest.raises(ValueError):
        PiecewiseConstant(((0, 1.5),))


def test_canonical_grid_includes_landmarks():
    g = canonical_grid(StepAt(3), PiecewiseConstant(((7, 0.5),)))
    assert 3 in g and 7 in g and 5.5 in g
    assert g == sorted(g)


# -- invariants ---------------------------------------------------------------

@given(dfs, st.lists(finite, min_size=2, max_size=20))
def test_monotone(F, ts):
    ts = sorted(ts)
    vals = [evaluate(F, t) for t in ts]
    assert all(a <= b + 1e-15 for a, b in zip(vals, vals[1:]))
    assert all(0 <= v <= 1 for v in vals)


@given(dfs)
def test_extended_real_contract(F):
    assert evaluate(F, -INF) == 0
    assert evaluate(F, INF) == 1
    assert left_limit(F, INF) == F.upper_limit()


@given(dfs, st.lists(finite, min_size=1, max_size=20))
def test_vectorised_matches_scalar(F, ts):
    np.testing.assert_allclose(F.values(ts), [evaluate(F, t) for t in ts], atol=1e-15)


@given(dfs, finite)
def test_left_limit_at_finite_points(F, t):
    # every variant is left-continuous, so the left limit is the value itself
    assert left_limit(F, t) == evaluate(F, t)
    assert evaluate(F, t - 1e-9 * max(1, abs(t))) <= left_limit(F, t)


@given(dfs, dfs, dfs)
def test_min_algebra(F, G, H):
    assert equal(pointwise_min(F, G), pointwise_min(G, F))
    assert equal(pointwise_min(pointwise_min(F, G), H), pointwise_min(F, pointwise_min(G, H)))
    assert equal(pointwise_min(F, F), F)


@given(dfs, dfs, st.lists(finite, min_size=1, max_size=10))
def test_min_is_pointwise(F, G, ts):
    H = pointwise_min(F, G)
    for t in ts:
        assert evaluate(H, t) == pytest.approx(min(evaluate(F, t), evaluate(G, t)), abs=1e-15)


@given(delta_plus, delta_plus)
def test_min_stays_in_delta_plus(F, G):
    m = classify_df(pointwise_min(F, G))
    assert m.in_delta_plus
    assert m.in_d_plus


@given(delta_plus)
def test_epsilon_zero_is_maximal(F):
    assert leq(F, epsilon(0))


@given(dfs)
def test_leq_reflexive(F):
    assert leq(F, F)


@given(dfs, dfs)
def test_exact_leq_is_sound(F, G):
    verdict = exact_leq(F, G)
    if verdict is None:
        return
    grid = canonical_grid(F, G)
    sampled = all(evaluate(F, t) <= evaluate(G, t) + 1e-12 for t in grid)
    if verdict:
        assert sampled
