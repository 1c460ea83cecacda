"""Bezier-curve parameterization of solution sets.

A control polygon of q >= 2 points defines a curve in decision space; p
points sampled at evenly spread parameter values form the candidate solution
set.  The navigational order walks the samples along the curve keeping only
the monotone front subsequence; the constraint value measures how far the
sampled curve is from being fully unfolded in objective space.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import (
    EvaluationCounter,
    MOProblem,
    SolutionSet,
    ApproximationSet,
    evaluate_batch,
    nondominated_mask,
)
from .indicators import (
    NavigationOrder,
    _check_ref,
    _clipped_pieces,
    _front_and_mask,
    _hv_front,
    _pieces_distance,
    _w_dominated,
)


def bernstein(j: int, q_deg: int, t: float) -> float:
    """Bernstein basis polynomial b_{j,q}(t) = C(q, j) (1-t)^(q-j) t^j."""
    if not 0 <= j <= q_deg:
        raise ValueError(f"need 0 <= j <= degree, got j={j}, degree={q_deg}")
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must be in [0, 1], got {t}")
    return math.comb(q_deg, j) * (1.0 - t) ** (q_deg - j) * t**j


def bernstein_weights(q: int, t: float) -> np.ndarray:
    """All q Bernstein weights of degree q-1 at parameter t."""
    return np.array([bernstein(j, q - 1, t) for j in range(q)])


@dataclass(frozen=True)
class ControlPolygon:
    """Ordered control points, shape (q, n)."""

    points: np.ndarray

    def __post_init__(self):
        P = np.asarray(self.points, dtype=float)
        if P.ndim != 2 or P.shape[0] < 2:
            raise ValueError("a control polygon needs >= 2 points of equal dimension")
        object.__setattr__(self, "points", P)

    @property
    def q(self) -> int:
        return self.points.shape[0]

    @property
    def n(self) -> int:
        return self.points.shape[1]

    def reversed(self) -> "ControlPolygon":
        return ControlPolygon(self.points[::-1].copy())


def bezier_eval(C: ControlPolygon, t: float) -> np.ndarray:
    """Point on the curve at parameter t; endpoints interpolate c_1 and c_q exactly."""
    return bernstein_weights(C.q, t) @ C.points


def sample_parameters(p: int) -> np.ndarray:
    """The p evenly spread parameter values (i-1)/(p-1), i = 1..p."""
    if p < 2:
        raise ValueError("need p >= 2 samples")
    return np.array([i / (p - 1) for i in range(p)])


class BezierSolutionSet(SolutionSet):
    """Solution set of p curve samples in intrinsic order (t ascending)."""

    def __init__(self, polygon: ControlPolygon, ts: np.ndarray, X, F):
        super().__init__(X, F)
        self.polygon = polygon
        self.ts = np.asarray(ts, dtype=float)
        if self.ts.shape != (self.p,):
            raise ValueError("one parameter value per sample required")


def sample_curve(C: ControlPolygon, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Decision vectors of p evenly spread curve samples (no evaluation)."""
    ts = sample_parameters(p)
    X = np.stack([bezier_eval(C, t) for t in ts])
    return ts, X


def sample_set(
    C: ControlPolygon, p: int, problem: MOProblem, counter: EvaluationCounter
) -> BezierSolutionSet:
    """Sample p points along the curve and evaluate them (p MO-fevals)."""
    ts, X = sample_curve(C, p)
    F = evaluate_batch(problem, X, counter)
    return BezierSolutionSet(C, ts, X, F)


def standardize_direction(C: ControlPolygon, f1_of) -> ControlPolygon:
    """Orient the polygon so f1 does not decrease from c_1 to c_q.

    ``f1_of`` maps a decision vector to its first objective value.  The
    polygon is reversed only on a strict f1 decrease; ties keep the current
    orientation so repeated standardization is stable.  The curve as a point
    set is unchanged by reversal.
    """
    if f1_of(C.points[0]) > f1_of(C.points[-1]):
        return C.reversed()
    return C


@dataclass(frozen=True)
class NavResult:
    """Navigational order o_nb and the corresponding approximation subset."""

    order: NavigationOrder
    subset: ApproximationSet


def _nav_order_core(pts: list) -> list[int]:
    _, in_a = _front_and_mask(pts)
    eta = 0  # first index attaining the minimal f1
    best = pts[0][0]
    for j in range(1, len(pts)):
        if pts[j][0] < best:
            best = pts[j][0]
            eta = j
    order = [eta]
    end_f2 = pts[eta][1]
    for j in range(eta + 1, len(pts)):
        if in_a[j] and pts[j][1] < end_f2:
            order.append(j)
            end_f2 = pts[j][1]
    return order


def nav_order_from_objectives(F: np.ndarray) -> list[int]:
    """Navigational order over curve samples given their objectives, in curve order.

    Starts at the first sample attaining the minimal f1, then walks the
    remaining samples in curve order, appending a sample iff it is
    non-dominated within the whole sample set and strictly improves f2 over
    the current endpoint.  Samples before the start index are never included.
    """
    F = np.asarray(F, dtype=float)
    return _nav_order_core(F.tolist())


def navigational_order(S: BezierSolutionSet) -> NavResult:
    """Alg.-style navigational order for a sampled curve."""
    order = nav_order_from_objectives(S.F)
    subset = ApproximationSet(S.X[order], S.F[order])
    return NavResult(order=order, subset=subset)


def _constraint_core(pts: list, order: list[int], r1: float, r2: float) -> float:
    p = len(pts)
    # the staircase of the navigable subset; reducing to its non-dominated,
    # sorted unique points leaves the dominated region unchanged and keeps
    # the lookup structure valid under degenerate objective ties
    nav, _ = _front_and_mask([pts[i] for i in order])
    pen = 0.0
    pieces = None
    for u, v in pts:
        w1 = u if u < r1 else r1
        w2 = v if v < r2 else r2
        if _w_dominated(nav, w1, w2):
            if pieces is None:
                pieces = _clipped_pieces(nav, r1, r2)
            d = _pieces_distance(pieces, u, v)
            pen += d * d
        else:
            dx = u - w1
            dy = v - w2
            pen += dx * dx + dy * dy
    c = pen / p

    in_order = [False] * p
    for i in order:
        in_order[i] = True
    for j in range(p - 1):
        if not (in_order[j] and in_order[j + 1]):
            du = pts[j][0] - pts[j + 1][0]
            dv = pts[j][1] - pts[j + 1][1]
            c += math.sqrt(du * du + dv * dv)
    return c


def constraint_value(F: np.ndarray, order: list[int], r) -> float:
    """Constraint violation of a sampled curve given its navigational order.

    Mean squared uncrowded distance of all samples to the navigable subset,
    plus the objective-space length of every consecutive curve pair with an
    endpoint missing from the order.  Zero iff the whole curve is an
    unfolded front (up to coincident-sample degeneracies).
    """
    F = np.asarray(F, dtype=float)
    r1, r2 = _check_ref(r)
    return _constraint_core(F.tolist(), order, r1, r2)


def constraint(S: BezierSolutionSet, r) -> float:
    """Constraint violation of a Bezier solution set."""
    order = nav_order_from_objectives(S.F)
    return constraint_value(S.F, order, r)
