"""Foundation types for bi-objective minimization problems.

All objective vectors are length-2 and minimized.  Objective values are
cached on solutions at evaluation time; indicator code reads the caches and
never re-evaluates, so MO-feval accounting stays exact.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import numpy as np


class BudgetExhausted(Exception):
    """An evaluation was requested beyond the MO-feval budget."""


class EvaluationCounter:
    """Counts evaluations of the bi-objective function, one per decision vector.

    A counter belongs to exactly one run.  ``charge`` is atomic: a batch that
    does not fit in the remaining budget raises before anything is evaluated,
    so the count never exceeds the budget.
    """

    __slots__ = ("count", "budget")

    def __init__(self, budget: int | None = None):
        if budget is not None and budget < 0:
            raise ValueError("budget must be non-negative")
        self.count = 0
        self.budget = budget

    def charge(self, k: int = 1) -> None:
        if self.budget is not None and self.count + k > self.budget:
            raise BudgetExhausted(
                f"budget {self.budget} cannot cover {k} more evaluation(s) "
                f"(used {self.count})"
            )
        self.count += k

    @property
    def remaining(self) -> int | None:
        if self.budget is None:
            return None
        return self.budget - self.count

    def __repr__(self):
        return f"EvaluationCounter(count={self.count}, budget={self.budget})"


@dataclass(frozen=True)
class MOProblem:
    """A bi-objective minimization problem.

    ``evaluate_batch`` maps an array of decision vectors with shape (B, n) to
    objective values with shape (B, 2).  ``lower_init``/``upper_init`` bound
    initialization only; the search space itself is unbounded unless the
    problem clamps internally (the WFG problems do).
    """

    name: str
    n: int
    lower_init: np.ndarray
    upper_init: np.ndarray
    evaluate_batch: Callable[[np.ndarray], np.ndarray]
    separable: bool = True
    m: int = 2

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.m != 2:
            raise ValueError("only bi-objective problems are supported (m = 2)")
        lo = np.asarray(self.lower_init, dtype=float)
        hi = np.asarray(self.upper_init, dtype=float)
        if lo.shape != (self.n,) or hi.shape != (self.n,):
            raise ValueError("init ranges must have shape (n,)")
        if not np.all(lo < hi):
            raise ValueError("lower_init must be strictly below upper_init")
        object.__setattr__(self, "lower_init", lo)
        object.__setattr__(self, "upper_init", hi)


def evaluate(problem: MOProblem, x: np.ndarray, counter: EvaluationCounter) -> np.ndarray:
    """Evaluate one decision vector, charging exactly one MO-feval."""
    x = np.asarray(x, dtype=float)
    if x.shape != (problem.n,):
        raise ValueError(f"expected decision vector of length {problem.n}, got {x.shape}")
    counter.charge(1)
    return problem.evaluate_batch(x[None, :])[0]


def evaluate_batch(problem: MOProblem, X: np.ndarray, counter: EvaluationCounter) -> np.ndarray:
    """Evaluate B decision vectors, charging B MO-fevals atomically."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] != problem.n:
        raise ValueError(f"expected shape (B, {problem.n}), got {X.shape}")
    counter.charge(X.shape[0])
    return problem.evaluate_batch(X)


class Domination(Enum):
    """Outcome of comparing two objective vectors under Pareto domination.

    Weak domination without strict domination implies componentwise equality,
    so the classifier only ever returns the four outcomes below; use
    ``weakly_dominates`` for the relation itself.
    """

    A_DOMINATES = "a-dominates"
    B_DOMINATES = "b-dominates"
    EQUAL = "equal"
    INCOMPARABLE = "incomparable"


def weakly_dominates(a, b) -> bool:
    """a <= b in every objective."""
    return a[0] <= b[0] and a[1] <= b[1]


def dominates(a, b) -> bool:
    """a <= b in every objective and a < b in at least one."""
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


def compare_domination(a, b) -> Domination:
    """Classify the domination relation between two finite objective vectors."""
    a0, a1 = float(a[0]), float(a[1])
    b0, b1 = float(b[0]), float(b[1])
    if not (np.isfinite(a0) and np.isfinite(a1) and np.isfinite(b0) and np.isfinite(b1)):
        raise ValueError("objective values must be finite")
    if a0 == b0 and a1 == b1:
        return Domination.EQUAL
    if a0 <= b0 and a1 <= b1:
        return Domination.A_DOMINATES
    if b0 <= a0 and b1 <= a1:
        return Domination.B_DOMINATES
    return Domination.INCOMPARABLE


@dataclass(frozen=True)
class Solution:
    """A decision vector with its cached objective vector."""

    x: np.ndarray
    f: np.ndarray | None = None

    @property
    def is_evaluated(self) -> bool:
        return self.f is not None


class SolutionSet:
    """Ordered, array-backed collection of evaluated solutions."""

    def __init__(self, X: np.ndarray, F: np.ndarray):
        X = np.asarray(X, dtype=float)
        F = np.asarray(F, dtype=float)
        if X.ndim != 2 or F.ndim != 2 or F.shape != (X.shape[0], 2):
            raise ValueError("X must be (p, n) and F must be (p, 2)")
        if X.shape[0] < 1:
            raise ValueError("a solution set holds at least one solution")
        self.X = X
        self.F = F

    @property
    def p(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    def __len__(self) -> int:
        return self.p

    def __getitem__(self, i: int) -> Solution:
        return Solution(x=self.X[i], f=self.F[i])

    def subset(self, indices) -> "SolutionSet":
        idx = np.asarray(indices, dtype=int)
        return type(self)(self.X[idx], self.F[idx])

    def __repr__(self):
        return f"{type(self).__name__}(p={self.p}, n={self.n})"


class ApproximationSet(SolutionSet):
    """A solution set whose members are mutually non-dominated."""


def evaluate_set(problem: MOProblem, X: np.ndarray, counter: EvaluationCounter) -> SolutionSet:
    """Evaluate a batch of decision vectors into a SolutionSet."""
    F = evaluate_batch(problem, X, counter)
    return SolutionSet(np.asarray(X, dtype=float), F)


def nondominated_mask(F: np.ndarray) -> np.ndarray:
    """Boolean mask of members not strictly dominated within F.

    Duplicate objective vectors weakly dominate each other and are all kept.
    O(p log p) sweep over the f1-sorted points.
    """
    F = np.asarray(F, dtype=float)
    p = F.shape[0]
    mask = np.ones(p, dtype=bool)
    order = np.lexsort((F[:, 1], F[:, 0]))
    best_f2_strictly_left = np.inf  # min f2 among points with strictly smaller f1
    i = 0
    while i < p:
        j = i
        f1 = F[order[i], 0]
        # points sharing this f1, sorted by f2: only the lowest-f2 group survives
        group_min_f2 = F[order[i], 1]
        while j < p and F[order[j], 0] == f1:
            fj2 = F[order[j], 1]
            if fj2 >= best_f2_strictly_left or fj2 > group_min_f2:
                mask[order[j]] = False
            j += 1
        if group_min_f2 < best_f2_strictly_left:
            best_f2_strictly_left = group_min_f2
        i = j
    return mask


def approximation_set(S: SolutionSet) -> ApproximationSet:
    """Exactly the non-dominated members of S, original order preserved."""
    mask = nondominated_mask(S.F)
    idx = np.flatnonzero(mask)
    return ApproximationSet(S.X[idx], S.F[idx])
