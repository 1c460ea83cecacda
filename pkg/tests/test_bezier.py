import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bezopt.bezier import (
    BezierSolutionSet,
    ControlPolygon,
    bernstein,
    bezier_eval,
    constraint,
    constraint_value,
    nav_order_from_objectives,
    navigational_order,
    sample_curve,
    sample_parameters,
    sample_set,
    standardize_direction,
)
from bezopt.core import EvaluationCounter, nondominated_mask
from bezopt.benchmarks import curveps

from oracles import all_valid_nav_subsequences, brute_nav_order

R11 = (11.0, 11.0)


# --- bernstein / curve evaluation -------------------------------------------------

def test_bernstein_examples():
    assert bernstein(0, 1, 0.3) == pytest.approx(0.7)
    assert bernstein(1, 2, 0.5) == 0.5


@given(st.integers(1, 20), st.floats(0, 1))
def test_bernstein_partition_of_unity(q_deg, t):
    total = sum(bernstein(j, q_deg, t) for j in range(q_deg + 1))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_bernstein_domain_errors():
    with pytest.raises(ValueError):
        bernstein(0, 1, 1.5)
    with pytest.raises(ValueError):
        bernstein(3, 2, 0.5)


def test_bezier_eval_examples():
    C = ControlPolygon(np.array([[0.0, 0.0], [1.0, 1.0]]))
    assert bezier_eval(C, 0.5).tolist() == [0.5, 0.5]
    C3 = ControlPolygon(np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0]]))
    assert bezier_eval(C3, 0.5).tolist() == [0.75, 0.25]


def test_bezier_endpoint_interpolation_exact(rng):
    for _ in range(20):
        q = rng.integers(2, 8)
        C = ControlPolygon(rng.uniform(-5, 5, (q, 6)))
        assert np.array_equal(bezier_eval(C, 0.0), C.points[0])
        assert np.array_equal(bezier_eval(C, 1.0), C.points[-1])


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 8), st.floats(0, 1))
def test_bezier_convex_hull_property(seed, q, t):
    rng = np.random.default_rng(seed)
    C = ControlPolygon(rng.uniform(-3, 3, (q, 4)))
    x = bezier_eval(C, t)
    assert np.all(x >= C.points.min(axis=0) - 1e-12)
    assert np.all(x <= C.points.max(axis=0) + 1e-12)


def test_bezier_reversal_symmetry(rng):
    for _ in range(20):
        q = rng.integers(2, 9)
        C = ControlPolygon(rng.uniform(-5, 5, (q, 5)))
        ts = sample_parameters(11)
        fwd = np.stack([bezier_eval(C, t) for t in ts])
        rev = np.stack([bezier_eval(C.reversed(), 1.0 - t) for t in ts])
        assert np.allclose(fwd, rev, atol=1e-12, rtol=0)


# --- sampling ---------------------------------------------------------------------

def test_sample_parameters():
    assert sample_parameters(2).tolist() == [0.0, 1.0]
    assert sample_parameters(3).tolist() == [0.0, 0.5, 1.0]
    with pytest.raises(ValueError):
        sample_parameters(1)


def test_sample_set_counts_and_matches_eval():
    prob = curveps()
    C = ControlPolygon(np.array([[1.0, 0.0], [0.0, 1.0]]))
    counter = EvaluationCounter()
    S = sample_set(C, 10, prob, counter)
    assert counter.count == 10
    assert isinstance(S, BezierSolutionSet)
    for i, t in enumerate(S.ts):
        assert np.array_equal(S.X[i], bezier_eval(C, t))
    assert np.array_equal(S.X[0], C.points[0])
    assert np.array_equal(S.X[-1], C.points[-1])


def test_sample_set_budget_exhaustion():
    from bezopt.core import BudgetExhausted
    prob = curveps()
    C = ControlPolygon(np.array([[1.0, 0.0], [0.0, 1.0]]))
    with pytest.raises(BudgetExhausted):
        sample_set(C, 10, prob, EvaluationCounter(budget=9))


# --- direction standardization -----------------------------------------------------

def test_standardize_direction():
    C = ControlPolygon(np.array([[0.0, 0.0], [1.0, 1.0]]))
    f1 = lambda x: float(x[0])
    assert standardize_direction(C, f1) is C  # already ascending
    rev = standardize_direction(ControlPolygon(np.array([[1.0, 1.0], [0.0, 0.0]])), f1)
    assert rev.points.tolist() == [[0.0, 0.0], [1.0, 1.0]]
    tie = ControlPolygon(np.array([[2.0, 0.0], [2.0, 5.0]]))
    assert standardize_direction(tie, f1) is tie  # ties keep orientation


def test_standardize_direction_idempotent(rng):
    f1 = lambda x: float(x[0] ** 2)
    for _ in range(20):
        C = ControlPolygon(rng.uniform(-4, 4, (3, 3)))
        once = standardize_direction(C, f1)
        twice = standardize_direction(once, f1)
        assert np.array_equal(once.points, twice.points)


# --- navigational order --------------------------------------------------------------

def test_nav_order_examples():
    assert nav_order_from_objectives(np.array([[1., 3.], [2., 4.], [3., 1.]])) == [0, 2]
    assert nav_order_from_objectives(np.array([[1., 3.], [2., 2.], [3., 1.]])) == [0, 1, 2]
    # scanning starts at the f1-argmin: earlier curve positions are skipped
    assert nav_order_from_objectives(np.array([[2., 2.], [1., 3.], [3., 1.]])) == [1, 2]


def test_nav_result_structure():
    prob = curveps()
    C = ControlPolygon(np.array([[1.0, 0.0], [0.0, 1.0]]))
    S = sample_set(C, 10, prob, EvaluationCounter())
    res = navigational_order(S)
    assert res.order == list(range(10))  # monotone front along the curve
    assert np.array_equal(res.subset.F, S.F)
    f = res.subset.F
    assert np.all(np.diff(f[:, 0]) > 0)
    assert np.all(np.diff(f[:, 1]) < 0)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**31 - 1), st.integers(2, 8))
def test_nav_order_matches_brute_force(seed, p):
    rng = np.random.default_rng(seed)
    F = rng.uniform(0, 5, (p, 2))
    order = nav_order_from_objectives(F)
    assert order == brute_nav_order(F)
    # the order is one of the valid monotone subsequences, and no valid
    # subsequence strictly contains it
    valid = all_valid_nav_subsequences(F)
    assert order in valid
    oset = set(order)
    assert not any(oset < set(v) for v in valid)
    nd = nondominated_mask(F)
    assert all(nd[i] for i in order[1:])
    f = F[order]
    assert np.all(np.diff(f[:, 0]) > 0)
    assert np.all(np.diff(f[:, 1]) < 0)


# --- constraint -----------------------------------------------------------------------

def test_constraint_examples():
    F = np.array([[1.0, 3.0], [2.0, 4.0], [3.0, 1.0]])
    expected = 1.0 / 3.0 + math.sqrt(2.0) + math.sqrt(10.0)
    assert constraint_value(F, nav_order_from_objectives(F), R11) == pytest.approx(expected, abs=1e-12)
    Ffront = np.array([[1.0, 3.0], [2.0, 2.0], [3.0, 1.0]])
    assert constraint_value(Ffront, nav_order_from_objectives(Ffront), R11) == 0.0
    F2 = np.array([[1.0, 3.0], [3.0, 1.0]])
    assert constraint_value(F2, nav_order_from_objectives(F2), R11) == 0.0


def test_constraint_collapsed_polygon_inside_box():
    prob = curveps()
    C = ControlPolygon(np.array([[0.4, 0.4], [0.4, 0.4]]))
    S = sample_set(C, 10, prob, EvaluationCounter())
    order = nav_order_from_objectives(S.F)
    assert len(order) <= 2  # curve collapsed up to float noise
    assert constraint(S, R11) == pytest.approx(0.0, abs=1e-12)


def test_constraint_collapsed_polygon_outside_box():
    prob = curveps()
    C = ControlPolygon(np.array([[9.0, 9.0], [9.0, 9.0]]))
    S = sample_set(C, 10, prob, EvaluationCounter())
    f = S.F[0]
    d = math.hypot(max(0.0, f[0] - 11.0), max(0.0, f[1] - 11.0))
    assert constraint(S, R11) == pytest.approx(d * d, rel=1e-9)


def test_constraint_zero_iff_full_nav_order(rng):
    prob = curveps()
    p = 8
    hits = 0
    for _ in range(200):
        C = ControlPolygon(rng.uniform(-1, 2, (rng.integers(2, 5), 2)))
        ts, X = sample_curve(C, p)
        F = prob.evaluate_batch(X)
        order = nav_order_from_objectives(F)
        c = constraint_value(F, order, R11)
        if len(order) == p:
            hits += 1
            assert c == 0.0
        else:
            assert c > 0.0
    assert 0 < hits < 200  # both branches exercised
