"""Independent reference implementations used as test oracles.

These deliberately use different algorithms (Monte Carlo, grids, exhaustive
enumeration, generic optimizers) from the library code they check.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy import optimize

from bezopt.indicators import hv2d


def mc_hypervolume(points, r, n_samples=10**6, rng=None):
    """Monte Carlo estimate of dominated area and its standard error."""
    P = np.asarray(points, dtype=float)
    r1, r2 = float(r[0]), float(r[1])
    rng = rng or np.random.default_rng(0)
    lo1 = min(P[:, 0].min(), r1)
    lo2 = min(P[:, 1].min(), r2)
    box_area = (r1 - lo1) * (r2 - lo2)
    if box_area <= 0:
        return 0.0, 0.0
    u = rng.uniform(lo1, r1, n_samples)
    v = rng.uniform(lo2, r2, n_samples)
    order = np.argsort(P[:, 0], kind="stable")
    f1 = P[order, 0]
    f2min = np.minimum.accumulate(P[order, 1])
    idx = np.searchsorted(f1, u, side="right") - 1
    dominated = (idx >= 0) & (f2min[np.clip(idx, 0, None)] <= v)
    frac = dominated.mean()
    est = frac * box_area
    se = box_area * math.sqrt(max(frac * (1 - frac), 1e-12) / n_samples)
    return est, se


def grid_ud_oracle(fx, front, r, grid_n=2000):
    """Distance from fx to the hypervolume-contributing region, on a grid.

    The region is {z <= r, z not strictly dominated by front}; the oracle
    returns the distance from fx to its grid-sampled boundary (0 when the
    query cell itself is in the region).  Accuracy: about one cell diagonal.
    """
    F = np.asarray(front, dtype=float)
    r1, r2 = float(r[0]), float(r[1])
    u, v = float(fx[0]), float(fx[1])
    lo1 = min(F[:, 0].min() if len(F) else r1, u, 0.0) - 0.5
    lo2 = min(F[:, 1].min() if len(F) else r2, v, 0.0) - 0.5
    hi1 = max(r1, u) + 0.5
    hi2 = max(r2, v) + 0.5
    gx = np.linspace(lo1, hi1, grid_n)
    gy = np.linspace(lo2, hi2, grid_n)
    cell = math.hypot(gx[1] - gx[0], gy[1] - gy[0])

    dominated = np.zeros((grid_n, grid_n), dtype=bool)  # [ix, iy]
    if len(F):
        order = np.argsort(F[:, 0], kind="stable")
        f1 = F[order, 0]
        f2min = np.minimum.accumulate(F[order, 1])
        idx = np.searchsorted(f1, gx, side="right") - 1
        best = np.where(idx >= 0, f2min[np.clip(idx, 0, None)], np.inf)
        dominated = best[:, None] <= gy[None, :]
        # exclude weak-equality-only cells is below grid resolution; ignore
    good = (~dominated) & (gx[:, None] <= r1) & (gy[None, :] <= r2)
    if not good.any():
        raise ValueError("window contains no contributing region")
    ix = int(np.clip(np.searchsorted(gx, u), 0, grid_n - 1))
    iy = int(np.clip(np.searchsorted(gy, v), 0, grid_n - 1))
    if good[ix, iy]:
        return 0.0, cell
    # boundary cells: good with a bad 4-neighbour
    bad = ~good
    nb = np.zeros_like(good)
    nb[1:, :] |= bad[:-1, :]
    nb[:-1, :] |= bad[1:, :]
    nb[:, 1:] |= bad[:, :-1]
    nb[:, :-1] |= bad[:, 1:]
    edge = good & nb
    exi, eyi = np.nonzero(edge)
    d = np.hypot(gx[exi] - u, gy[eyi] - v)
    return float(d.min()), cell


def exhaustive_best_subset_hv(points, r, p):
    """Best hypervolume over all subsets of size <= p (exhaustive)."""
    P = np.asarray(points, dtype=float)
    best = 0.0
    for subset in itertools.combinations(range(len(P)), min(p, len(P))):
        best = max(best, hv2d(P[list(subset)], r))
    return best


def brute_force_nondominated(F):
    """O(p^2) strict-domination filter."""
    F = np.asarray(F, dtype=float)
    p = len(F)
    mask = np.ones(p, dtype=bool)
    for i in range(p):
        for j in range(p):
            if i == j:
                continue
            if (F[j, 0] <= F[i, 0] and F[j, 1] <= F[i, 1]
                    and (F[j, 0] < F[i, 0] or F[j, 1] < F[i, 1])):
                mask[i] = False
                break
    return mask


def brute_nav_order(F):
    """Independent reimplementation of the navigational-order scan."""
    F = np.asarray(F, dtype=float)
    mask = brute_force_nondominated(F)
    eta = 0
    for j in range(1, len(F)):
        if F[j, 0] < F[eta, 0]:
            eta = j
    order = [eta]
    for j in range(eta, len(F)):
        if mask[j] and F[j, 1] < F[order[-1], 1] and j != order[-1]:
            order.append(j)
    return order


def all_valid_nav_subsequences(F):
    """All subsequences starting at the first f1-argmin that walk the curve
    order with strictly increasing f1, strictly decreasing f2, members
    non-dominated."""
    F = np.asarray(F, dtype=float)
    mask = brute_force_nondominated(F)
    eta = int(np.argmin(F[:, 0]))
    rest = [j for j in range(eta + 1, len(F)) if mask[j]]
    valid = []
    for k in range(len(rest) + 1):
        for combo in itertools.combinations(rest, k):
            seq = [eta] + list(combo)
            ok = all(
                F[a, 0] < F[b, 0] and F[a, 1] > F[b, 1]
                for a, b in zip(seq, seq[1:])
            )
            if ok:
                valid.append(seq)
    return valid


def front_hv_star(front_point_fn, p, r, n_starts=6, seed=0):
    """Best p-point hypervolume on a parameterized front via direct search.

    ``front_point_fn`` maps a parameter in [0, 1] to an objective vector.
    """
    def neg_hv(ts):
        ts = np.clip(ts, 0.0, 1.0)
        F = np.stack([front_point_fn(t) for t in ts])
        return -hv2d(F, r)

    best = None
    for s in range(n_starts):
        rng = np.random.default_rng(seed + s)
        x0 = np.sort(rng.uniform(0, 1, p))
        res = optimize.minimize(neg_hv, x0, method="Nelder-Mead",
                                options={"maxiter": 40000, "xatol": 1e-13, "fatol": 1e-15})
        res = optimize.minimize(neg_hv, res.x, method="Powell",
                                options={"maxiter": 40000, "xtol": 1e-13, "ftol": 1e-15})
        if best is None or res.fun < best:
            best = res.fun
    return -best


def bisphere_front_point(t):
    return np.array([t * t, (1.0 - t) * (1.0 - t)])


def curveps_front_point(w):
    x1 = w
    x2 = (1.0 - w) / (1.0 - 0.99 * w)
    return np.array([(x1 - 1.0) ** 2 + 0.01 * x2 * x2,
                     x1 * x1 + (x2 - 1.0) ** 2])


def wfg3_front_point(t):
    return np.array([2.0 * t, 4.0 * (1.0 - t)])
