"""Quality indicators for bi-objective sets.

Hypervolume, uncrowded distance, uncrowded hypervolume (UHV), navigational
smoothness, left-to-right navigation order, greedy hypervolume subset
selection and the hypervolume gap metric, all specialized to m = 2.
"""
from __future__ import annotations

import math

import numpy as np

from .core import SolutionSet, ApproximationSet, nondominated_mask

# A navigation order is a list of unique indices into a solution set.
NavigationOrder = list

# Per-term snap threshold: consecutive-triple ratios this close to 1 are
# floating-point noise of an exactly collinear traversal and must score 1.0.
_COLLINEAR_SNAP = 1e-12


class SmoothnessUndefined(ValueError):
    """Smoothness requires a navigation order of at least 3 solutions."""


def _as_points(points) -> np.ndarray:
    P = np.asarray(points, dtype=float)
    if P.size == 0:
        return P.reshape(0, 2)
    if P.ndim != 2 or P.shape[1] != 2:
        raise ValueError(f"expected (k, 2) objective points, got shape {P.shape}")
    if not np.all(np.isfinite(P)):
        raise ValueError("objective points must be finite")
    return P


def _check_ref(r) -> tuple[float, float]:
    r = np.asarray(r, dtype=float)
    if r.shape != (2,) or not np.all(np.isfinite(r)):
        raise ValueError("reference point must be a finite 2-vector")
    return float(r[0]), float(r[1])


def hv2d(points, r) -> float:
    """Area dominated by ``points`` and bounded by reference point ``r``.

    Standard staircase sweep over the f1-sorted points, O(k log k).  Points
    that do not strictly dominate r contribute nothing; dominated points
    contribute nothing; the empty set has hypervolume 0.
    """
    P = _as_points(points)
    r1, r2 = _check_ref(r)
    if P.shape[0] == 0:
        return 0.0
    keep = (P[:, 0] < r1) & (P[:, 1] < r2)
    if not np.any(keep):
        return 0.0
    P = P[keep]
    order = np.lexsort((P[:, 1], P[:, 0]))
    f1 = P[order, 0]
    f2 = np.minimum.accumulate(P[order, 1])
    prev = np.concatenate(([r2], f2[:-1]))
    widths = r1 - f1
    heights = prev - f2
    return float(np.sum(widths[heights > 0.0] * heights[heights > 0.0]))


class Staircase2D:
    """Attainment boundary of a mutually non-dominated front.

    The boundary consists of the vertical/horizontal segments of the sorted
    staircase plus the half-lines extending from the extreme points.  With a
    reference point given, the pieces are clipped to the region weakly
    dominating it, so distances measure the gap to where a solution would
    start contributing hypervolume; points can then never hide at small
    distance behind boundary pieces that lie beyond the reference box.
    """

    __slots__ = ("vx", "vylo", "vyhi", "hy", "hxlo", "hxhi")

    def __init__(self, front, clip_r=None):
        F = _as_points(front)
        if F.shape[0] == 0:
            raise ValueError("staircase requires a non-empty front")
        # sort and drop exact duplicates; mixed f1/f2 ties cannot occur in a
        # mutually non-dominated front
        order = np.lexsort((F[:, 1], F[:, 0]))
        F = F[order]
        keep = np.ones(F.shape[0], dtype=bool)
        keep[1:] = np.any(F[1:] != F[:-1], axis=1)
        F = F[keep]
        xs = F[:, 0]
        ys = F[:, 1]
        # vertical pieces: x = xs[i], y from ys[i] up to ys[i-1] (ray at i=0)
        vx, vylo = xs, ys
        vyhi = np.concatenate(([np.inf], ys[:-1]))
        # horizontal pieces: y = ys[i], x from xs[i] to xs[i+1] (ray at i=k-1)
        hy, hxlo = ys, xs
        hxhi = np.concatenate((xs[1:], [np.inf]))
        if clip_r is not None:
            r1, r2 = float(clip_r[0]), float(clip_r[1])
            vyhi = np.minimum(vyhi, r2)
            kv = (vx <= r1) & (vylo <= vyhi)
            vx, vylo, vyhi = vx[kv], vylo[kv], vyhi[kv]
            hxhi = np.minimum(hxhi, r1)
            kh = (hy <= r2) & (hxlo <= hxhi)
            hy, hxlo, hxhi = hy[kh], hxlo[kh], hxhi[kh]
            if vx.size == 0 and hy.size == 0:
                raise ValueError("staircase boundary lies entirely beyond the reference point")
        self.vx, self.vylo, self.vyhi = vx, vylo, vyhi
        self.hy, self.hxlo, self.hxhi = hy, hxlo, hxhi

    def distance(self, u: float, v: float) -> float:
        """Euclidean distance from (u, v) to the boundary."""
        best = math.inf
        if self.vx.size:
            dxv = u - self.vx
            dyv = v - np.clip(v, self.vylo, self.vyhi)
            best = float((dxv * dxv + dyv * dyv).min())
        if self.hy.size:
            dxh = u - np.clip(u, self.hxlo, self.hxhi)
            dyh = v - self.hy
            best = min(best, float((dxh * dxh + dyh * dyh).min()))
        return math.sqrt(best)

    def distances(self, Q: np.ndarray) -> np.ndarray:
        """Distances from each query row of Q (shape (q, 2)) to the boundary."""
        u = Q[:, 0:1]
        v = Q[:, 1:2]
        best = np.full(Q.shape[0], np.inf)
        if self.vx.size:
            dxv = u - self.vx[None, :]
            dyv = v - np.clip(v, self.vylo[None, :], self.vyhi[None, :])
            best = (dxv * dxv + dyv * dyv).min(axis=1)
        if self.hy.size:
            dxh = u - np.clip(u, self.hxlo[None, :], self.hxhi[None, :])
            dyh = v - self.hy[None, :]
            best = np.minimum(best, (dxh * dxh + dyh * dyh).min(axis=1))
        return np.sqrt(best)


def _box_distance(f1: float, f2: float, r1: float, r2: float) -> float:
    """Distance to the boundary of the region strictly dominating r."""
    return math.hypot(max(0.0, f1 - r1), max(0.0, f2 - r2))


def _strictly_dominated_by(F: np.ndarray, u: float, v: float) -> bool:
    return bool(
        np.any((F[:, 0] <= u) & (F[:, 1] <= v) & ((F[:, 0] < u) | (F[:, 1] < v)))
    )


# --- list-based cores --------------------------------------------------------
# The solvers recompute set indicators once per evaluation on small sets
# (p <= ~100); plain-float sweeps beat array ops by an order of magnitude
# there.  The public array functions validate and delegate.


def _front_and_mask(pts: list) -> tuple[list, list]:
    """Sorted strict-domination front and per-point non-dominated flags.

    ``front`` is sorted by ascending f1 with strictly descending f2 and
    holds unique objective vectors; duplicates in ``pts`` are all flagged
    non-dominated.
    """
    p = len(pts)
    order = sorted(range(p), key=lambda i: pts[i])
    nd = [False] * p
    front: list = []
    best_b = math.inf
    i = 0
    while i < p:
        j = i
        a = pts[order[i]][0]
        gmin = pts[order[i]][1]
        while j < p and pts[order[j]][0] == a:
            b = pts[order[j]][1]
            if b == gmin and gmin < best_b:
                nd[order[j]] = True
            j += 1
        if gmin < best_b:
            front.append((a, gmin))
            best_b = gmin
        i = j
    return front, nd


def _hv_front(front: list, r1: float, r2: float) -> float:
    """Hypervolume of a sorted front (ascending f1, descending f2)."""
    hv = 0.0
    prev = r2
    for a, b in front:
        if a < r1 and b < prev:
            hv += (r1 - a) * (prev - b)
            prev = b
    return hv


def _w_dominated(front: list, w1: float, w2: float) -> bool:
    """Is (w1, w2) strictly dominated by the sorted front?"""
    lo, hi = 0, len(front)
    while lo < hi:  # rightmost front index with a <= w1
        mid = (lo + hi) // 2
        if front[mid][0] <= w1:
            lo = mid + 1
        else:
            hi = mid
    if lo == 0:
        return False
    a, b = front[lo - 1]  # smallest f2 among points with f1 <= w1
    return b <= w2 and (a < w1 or b < w2)


def _clipped_pieces(front: list, r1: float, r2: float) -> list:
    """Staircase boundary pieces clipped to the reference box.

    Returns (x0, y0, x1, y1) axis-parallel segments; the outward half-lines
    end at the box.
    """
    pieces = []
    k = len(front)
    for i in range(k):
        a, b = front[i]
        if a <= r1:
            yhi = front[i - 1][1] if i > 0 else math.inf
            yhi = yhi if yhi < r2 else r2
            if b <= yhi:
                pieces.append((a, b, a, yhi))
        if b <= r2:
            xhi = front[i + 1][0] if i < k - 1 else math.inf
            xhi = xhi if xhi < r1 else r1
            if a <= xhi:
                pieces.append((a, b, xhi, b))
    return pieces


def _pieces_distance(pieces: list, u: float, v: float) -> float:
    best = math.inf
    for x0, y0, x1, y1 in pieces:
        cx = x0 if u < x0 else (x1 if u > x1 else u)
        cy = y0 if v < y0 else (y1 if v > y1 else v)
        dx = u - cx
        dy = v - cy
        d2 = dx * dx + dy * dy
        if d2 < best:
            best = d2
    return math.sqrt(best)


def _uhv_core(pts: list, r1: float, r2: float) -> float:
    front, nd = _front_and_mask(pts)
    hv = _hv_front(front, r1, r2)
    pen = 0.0
    pieces = None
    for i, (u, v) in enumerate(pts):
        if nd[i]:
            if u < r1 and v < r2:
                continue
            dx = u - r1 if u > r1 else 0.0
            dy = v - r2 if v > r2 else 0.0
            pen += dx * dx + dy * dy
        else:
            w1 = u if u < r1 else r1
            w2 = v if v < r2 else r2
            if _w_dominated(front, w1, w2):
                if pieces is None:
                    pieces = _clipped_pieces(front, r1, r2)
                d = _pieces_distance(pieces, u, v)
                pen += d * d
            else:
                dx = u - w1
                dy = v - w2
                pen += dx * dx + dy * dy
    return hv - pen / len(pts)


def uncrowded_distance(fx, front, r) -> float:
    """Distance from an objective point to the approximation boundary.

    Zero exactly when ``fx`` is non-dominated with respect to ``front`` and
    strictly dominates ``r``; otherwise the distance to the closure of the
    region where it would contribute hypervolume.  Concretely: project onto
    the reference box; if the projection is still strictly dominated, measure
    to the box-clipped staircase boundary of the front, else the projection
    distance itself (the distance to the box's dominating quadrant, which
    also covers the empty front).
    """
    fx = np.asarray(fx, dtype=float)
    if fx.shape != (2,) or not np.all(np.isfinite(fx)):
        raise ValueError("fx must be a finite 2-vector")
    F = _as_points(front)
    r1, r2 = _check_ref(r)
    u, v = float(fx[0]), float(fx[1])
    w1, w2 = min(u, r1), min(v, r2)
    if _strictly_dominated_by(F, w1, w2):
        return Staircase2D(F, clip_r=(r1, r2)).distance(u, v)
    return _box_distance(u, v, r1, r2)


def uhv_of_objectives(F: np.ndarray, r) -> float:
    """Uncrowded hypervolume of raw objective vectors (shape (p, 2)).

    HV of the non-dominated subset minus the mean squared uncrowded distance
    of all members to that subset's boundary (m = 2 squares the distances).
    """
    F = _as_points(F)
    r1, r2 = _check_ref(r)
    if F.shape[0] == 0:
        raise ValueError("UHV of an empty set is undefined")
    return _uhv_core(F.tolist(), r1, r2)


def uhv(S: SolutionSet, r) -> float:
    """Uncrowded hypervolume of a solution set (Eq.-style: HV minus mean ud^m)."""
    return uhv_of_objectives(S.F, r)


def smoothness(S: SolutionSet, order) -> float:
    """Navigational smoothness of S traversed in the given order.

    Mean over interior solutions of direct distance divided by detour
    distance, measured in decision space.  1.0 exactly for a collinear
    equally-ordered traversal; coincident triples count as detour-free.
    """
    o = list(order)
    if len(o) < 3:
        raise SmoothnessUndefined(
            f"smoothness needs a navigation order of >= 3 solutions, got {len(o)}"
        )
    if len(set(o)) != len(o):
        raise ValueError("navigation order must not repeat indices")
    X = S.X
    total = 0.0
    for i in range(1, len(o) - 1):
        a = X[o[i - 1]]
        b = X[o[i]]
        c = X[o[i + 1]]
        num = float(np.linalg.norm(a - c))
        den = float(np.linalg.norm(a - b)) + float(np.linalg.norm(b - c))
        if den == 0.0:
            term = 1.0  # coincident triple: no detour
        else:
            term = num / den
            if term > 1.0 - _COLLINEAR_SNAP:
                term = 1.0
        total += term
    return total / (len(o) - 2)


def left_to_right_order(A: ApproximationSet) -> NavigationOrder:
    """Indices of A sorted by ascending f1; ties by ascending f2, then index."""
    F = A.F
    idx = np.arange(F.shape[0])
    return list(np.lexsort((idx, F[:, 1], F[:, 0])))


def ghss(points, r, p: int) -> list[int]:
    """Greedy hypervolume subset selection.

    Repeatedly adds the point with maximal marginal hypervolume until p
    points are chosen or no strictly positive gain remains; ties break to the
    lowest index.  If p >= len(points) all indices are returned.
    """
    if p < 1:
        raise ValueError("p must be >= 1")
    P = _as_points(points)
    k = P.shape[0]
    if p >= k:
        return list(range(k))
    selected: list[int] = []
    current = 0.0
    remaining = list(range(k))
    while len(selected) < p and remaining:
        best_gain = 0.0
        best_idx = None
        for i in remaining:
            gain = hv2d(P[selected + [i]], r) - current
            if gain > best_gain:
                best_gain = gain
                best_idx = i
        if best_idx is None:
            break
        selected.append(best_idx)
        remaining.remove(best_idx)
        current = hv2d(P[selected], r)  # recompute: keeps gains drift-free
    return selected


def delta_hv(hv_star: float, A: ApproximationSet, r) -> float:
    """Gap between a reference hypervolume and the set's hypervolume.

    May be negative when a run beats the stored reference; reported as-is.
    """
    if not np.isfinite(hv_star):
        raise ValueError("hv_star must be finite")
    return float(hv_star) - hv2d(A.F, r)
