"""Bi-objective WFG test problems (WFG1-WFG9).

Vectorized implementation of the WFG toolkit transformation pipelines for
m = 2 objectives with k position variables and n - k distance variables.
Variable i lives in [0, 2i]; objectives are scaled so the front spans
f1 in [0, 2] and f2 in [0, 4].  Inputs are clamped to the domain before the
transformations (the genotype itself is never touched).
"""
from __future__ import annotations

import math

import numpy as np

def _correct_to_01(y):
    # transformations map [0, 1] into [0, 1] up to floating-point noise;
    # clipping keeps the pipeline's domain assumption exact
    return np.clip(y, 0.0, 1.0)


# --- transformations --------------------------------------------------------


def _s_linear(y, A):
    return _correct_to_01(np.abs(y - A) / np.where(y > A, 1.0 - A, A))


def _s_decept(y, A, B, C):
    tmp1 = np.floor(y - A + B) * (1.0 - C + (A - B) / B) / (A - B)
    tmp2 = np.floor(A + B - y) * (1.0 - C + (1.0 - A - B) / B) / (1.0 - A - B)
    return _correct_to_01(1.0 + (np.fabs(y - A) - B) * (tmp1 + tmp2 + 1.0 / B))


def _s_multi(y, A, B, C):
    tmp1 = np.fabs(y - C) / (2.0 * (np.floor(C - y) + C))
    tmp2 = (4.0 * A + 2.0) * np.pi * (0.5 - tmp1)
    return _correct_to_01((1.0 + np.cos(tmp2) + 4.0 * B * tmp1 * tmp1) / (B + 2.0))


def _b_flat(y, A, B, C):
    ret = (
        A
        + np.minimum(0.0, np.floor(y - B)) * (A * (B - y) / B)
        - np.minimum(0.0, np.floor(C - y)) * ((1.0 - A) * (y - C) / (1.0 - C))
    )
    return _correct_to_01(ret)


def _b_poly(y, alpha):
    return _correct_to_01(y**alpha)


def _b_param(y, u, A, B, C):
    aux = A - (1.0 - 2.0 * u) * np.fabs(np.floor(0.5 - u) + A)
    return _correct_to_01(np.power(y, B + (C - B) * aux))


# --- reductions -------------------------------------------------------------


def _r_sum(Y, w):
    return _correct_to_01(Y @ w / np.sum(w))


def _r_sum_uniform(Y):
    return _correct_to_01(Y.mean(axis=1))


def _nonsep_mask(m, A):
    mask = np.zeros((m, m), dtype=bool)
    for j in range(m):
        for kk in range(A - 1):
            mask[j, (1 + j + kk) % m] = True
    return mask


def _r_nonsep(Y, A, mask):
    m = Y.shape[1]
    D = np.abs(Y[:, :, None] - Y[:, None, :])
    num = Y.sum(axis=1) + (D * mask).sum(axis=(1, 2))
    val = np.ceil(A / 2.0)
    denom = m * val * (1.0 + 2.0 * A - 2.0 * val) / A
    return _correct_to_01(num / denom)


# --- shapes (m = 2) ---------------------------------------------------------


def _shape_convex1(x1):
    return _correct_to_01(1.0 - np.cos(0.5 * x1 * np.pi))


def _shape_mixed(x1, alpha, A):
    aux = 2.0 * A * np.pi
    return _correct_to_01(np.power(1.0 - x1 - np.cos(aux * x1 + 0.5 * np.pi) / aux, alpha))


def _shape_disconnected(x1, alpha, beta, A):
    aux = np.cos(A * np.pi * np.power(x1, beta))
    return _correct_to_01(1.0 - np.power(x1, alpha) * aux * aux)


def _shape_concave1(x1):
    return _correct_to_01(np.sin(0.5 * x1 * np.pi))


def _shape_concave2(x1):
    return _correct_to_01(np.cos(0.5 * x1 * np.pi))


class WFGEvaluator:
    """Batched evaluator for one bi-objective WFG problem."""

    def __init__(self, which: int, n: int = 24, k: int = 4):
        if not 1 <= which <= 9:
            raise ValueError("which must be in 1..9")
        if not 1 <= k < n:
            raise ValueError("need 1 <= k < n")
        if which in (2, 3) and (n - k) % 2 != 0:
            raise ValueError("WFG2/WFG3 need an even number of distance variables")
        self.which = which
        self.n = n
        self.k = k
        self.zmax = 2.0 * np.arange(1, n + 1, dtype=float)
        self.weights = 2.0 * np.arange(1, n + 1, dtype=float)
        self.clamped_evals = 0
        l = n - k
        self._mask_pos = _nonsep_mask(k, k)
        self._mask_dist = _nonsep_mask(l, l)
        self._mask_pair = _nonsep_mask(2, 2)

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=float)
        squeeze = X.ndim == 1
        if squeeze:
            X = X[None, :]
        Xc = np.clip(X, 0.0, self.zmax)
        if Xc is not X and not np.array_equal(Xc, X):
            self.clamped_evals += X.shape[0]
        y = Xc / self.zmax
        t1, t2 = getattr(self, f"_t_wfg{self.which}")(y)
        # degeneracy parameter A_1 = 1 for every bi-objective WFG problem
        x1 = np.maximum(t2, 1.0) * (t1 - 0.5) + 0.5
        x2 = t2
        h1, h2 = self._shapes(x1)
        F = np.stack((x2 + 2.0 * h1, x2 + 4.0 * h2), axis=1)
        return F[0] if squeeze else F

    # shape pairs -------------------------------------------------------
    def _shapes(self, x1):
        w = self.which
        if w == 1:
            return _shape_convex1(x1), _shape_mixed(x1, alpha=1.0, A=5.0)
        if w == 2:
            return _shape_convex1(x1), _shape_disconnected(x1, alpha=1.0, beta=1.0, A=5.0)
        if w == 3:
            return _correct_to_01(x1), _correct_to_01(1.0 - x1)
        return _shape_concave1(x1), _shape_concave2(x1)

    # transformation pipelines ------------------------------------------
    def _t_wfg1(self, y):
        k, n = self.k, self.n
        y = y.copy()
        y[:, k:] = _s_linear(y[:, k:], 0.35)
        y[:, k:] = _b_flat(y[:, k:], 0.8, 0.75, 0.85)
        y = _b_poly(y, 0.02)
        w = self.weights
        return _r_sum(y[:, :k], w[:k]), _r_sum(y[:, k:], w[k:])

    def _t_pair_nonsep(self, y):
        # shared by WFG2/WFG3: shift distance, then pairwise non-separable
        # reduction of the distance half; the pair reduction collapses to
        # (y0 + y1 + 2|y0 - y1|) / 3
        k = self.k
        y = y.copy()
        y[:, k:] = _s_linear(y[:, k:], 0.35)
        y0 = y[:, k::2]
        y1 = y[:, k + 1 :: 2]
        dist = _correct_to_01((y0 + y1 + 2.0 * np.abs(y0 - y1)) / 3.0)
        return _r_sum_uniform(y[:, :k]), _r_sum_uniform(dist)

    _t_wfg2 = _t_pair_nonsep
    _t_wfg3 = _t_pair_nonsep

    def _t_wfg4(self, y):
        k = self.k
        y = _s_multi(y, 30.0, 10.0, 0.35)
        return _r_sum_uniform(y[:, :k]), _r_sum_uniform(y[:, k:])

    def _t_wfg5(self, y):
        k = self.k
        y = _s_decept(y, 0.35, 0.001, 0.05)
        return _r_sum_uniform(y[:, :k]), _r_sum_uniform(y[:, k:])

    def _t_wfg6(self, y):
        k, n = self.k, self.n
        y = y.copy()
        y[:, k:] = _s_linear(y[:, k:], 0.35)
        t1 = _r_nonsep(y[:, :k], k, self._mask_pos)
        t2 = _r_nonsep(y[:, k:], n - k, self._mask_dist)
        return t1, t2

    def _suffix_means(self, y):
        # mean of y[:, i+1:] for each i < n-1
        cs = np.cumsum(y, axis=1)
        total = cs[:, -1:]
        counts = self.n - 1.0 - np.arange(self.n - 1)
        return (total - cs[:, : self.n - 1]) / counts

    def _prefix_means(self, y):
        # mean of y[:, :i] for each i >= 1
        cs = np.cumsum(y, axis=1)
        counts = np.arange(1, self.n, dtype=float)
        return cs[:, :-1] / counts

    def _t_wfg7(self, y):
        k = self.k
        u = self._suffix_means(y)[:, :k]
        y = y.copy()
        y[:, :k] = _b_param(y[:, :k], u, 0.98 / 49.98, 0.02, 50.0)
        y[:, k:] = _s_linear(y[:, k:], 0.35)
        return _r_sum_uniform(y[:, :k]), _r_sum_uniform(y[:, k:])

    def _t_wfg8(self, y):
        k = self.k
        u = self._prefix_means(y)[:, k - 1 :]
        y = y.copy()
        y[:, k:] = _b_param(y[:, k:], u, 0.98 / 49.98, 0.02, 50.0)
        y[:, k:] = _s_linear(y[:, k:], 0.35)
        return _r_sum_uniform(y[:, :k]), _r_sum_uniform(y[:, k:])

    def _t_wfg9(self, y):
        k, n = self.k, self.n
        u = self._suffix_means(y)
        y = y.copy()
        y[:, : n - 1] = _b_param(y[:, : n - 1], u, 0.98 / 49.98, 0.02, 50.0)
        y[:, :k] = _s_decept(y[:, :k], 0.35, 0.001, 0.05)
        y[:, k:] = _s_multi(y[:, k:], 30.0, 95.0, 0.35)
        t1 = _r_nonsep(y[:, :k], k, self._mask_pos)
        t2 = _r_nonsep(y[:, k:], n - k, self._mask_dist)
        return t1, t2


def _exact_scale(y: float, z: float) -> float:
    """x with fl(x / z) == y exactly (the evaluator divides by the domain bound).

    Plain y * z can be an ulp off after the round trip, which transformations
    like the 0.02-power bias amplify catastrophically near y = 0.
    """
    x = y * z
    for _ in range(4):
        q = x / z
        if q == y:
            return x
        x = math.nextafter(x, math.inf if q < y else -math.inf)
    return x


def wfg_optimal_point(which: int, position01, n: int = 24, k: int = 4) -> np.ndarray:
    """A Pareto-surface decision vector from normalized position values.

    ``position01`` holds the k position variables on [0, 1]; the distance
    variables are set to their optimal values (0.35 after normalization for
    WFG1-7; WFG8/WFG9 use the parameter-dependent recursions).  For shapes
    with non-monotone segments (WFG1, WFG2) not every surface point is
    Pareto optimal.
    """
    pos = np.asarray(position01, dtype=float)
    if pos.shape != (k,):
        raise ValueError(f"position01 must have shape ({k},)")
    if np.any(pos < 0.0) or np.any(pos > 1.0):
        raise ValueError("position01 must lie in [0, 1]")
    zmax = 2.0 * np.arange(1, n + 1, dtype=float)
    y = np.empty(n)
    y[:k] = pos
    if which == 8:
        for i in range(k, n):
            u = y[:i].mean()
            tmp1 = np.fabs(np.floor(0.5 - u) + 0.98 / 49.98)
            exponent = 0.02 + 49.98 * (0.98 / 49.98 - (1.0 - 2.0 * u) * tmp1)
            y[i] = 0.35 ** (1.0 / exponent)
    elif which == 9:
        y[n - 1] = 0.35
        for i in range(n - 2, k - 1, -1):
            u = y[i + 1 :].mean()
            y[i] = 0.35 ** (1.0 / (0.02 + 1.96 * u))
    else:
        y[k:] = 0.35
    return np.array([_exact_scale(y[i], zmax[i]) for i in range(n)])
