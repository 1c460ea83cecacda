"""Benchmark problem definitions and the string-id problem registry."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import MOProblem
from .wfg import WFGEvaluator, wfg_optimal_point

__all__ = [
    "curveps",
    "bisphere",
    "wfg",
    "get_problem",
    "get_problem_info",
    "ProblemInfo",
    "WFGEvaluator",
    "wfg_optimal_point",
]


def _curveps_eval(X: np.ndarray) -> np.ndarray:
    x1 = X[:, 0]
    x2 = X[:, 1]
    f1 = (x1 - 1.0) ** 2 + 0.01 * x2**2
    f2 = x1**2 + (x2 - 1.0) ** 2
    return np.stack((f1, f2), axis=1)


def curveps() -> MOProblem:
    """Two-variable problem with a curved Pareto set.

    f1 = (x1 - 1)^2 + 0.01 x2^2 and f2 = x1^2 + (x2 - 1)^2; both objectives
    are convex, so the Pareto set is the arc of weighted-sum minimizers
    x(w) = (w, (1 - w) / (1 - 0.99 w)) for w in [0, 1].
    """
    return MOProblem(
        name="curveps",
        n=2,
        lower_init=np.array([-1.0, -1.0]),
        upper_init=np.array([2.0, 2.0]),
        evaluate_batch=_curveps_eval,
        separable=True,
    )


class _BisphereEval:
    def __init__(self, n: int):
        self.e1 = np.zeros(n)
        self.e1[0] = 1.0

    def __call__(self, X: np.ndarray) -> np.ndarray:
        f1 = np.sum(X * X, axis=1)
        d = X - self.e1
        f2 = np.sum(d * d, axis=1)
        return np.stack((f1, f2), axis=1)


def bisphere(n: int = 10) -> MOProblem:
    """Two sphere functions, the second translated to e_1; linear Pareto set."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return MOProblem(
        name=f"bisphere:n={n}",
        n=n,
        lower_init=np.full(n, -5.0),
        upper_init=np.full(n, 5.0),
        evaluate_batch=_BisphereEval(n),
        separable=True,
    )


def wfg(which: int, n: int = 24, k: int = 4) -> MOProblem:
    """Bi-objective WFG problem; init range equals the true domain [0, 2i]."""
    ev = WFGEvaluator(which, n=n, k=k)
    return MOProblem(
        name=f"wfg{which}" if (n, k) == (24, 4) else f"wfg{which}:n={n},k={k}",
        n=n,
        lower_init=np.zeros(n),
        upper_init=ev.zmax.copy(),
        evaluate_batch=ev,
        separable=which not in (6, 9),
    )


@dataclass(frozen=True)
class ProblemInfo:
    """Registry record: the problem plus benchmark metadata."""

    problem: MOProblem
    kind: str
    k_position: int | None = None
    domain_lower: np.ndarray | None = None
    domain_upper: np.ndarray | None = None


def _parse_args(argstr: str) -> dict:
    out = {}
    for part in argstr.split(","):
        part = part.strip()
        if not part:
            continue
        key, _, val = part.partition("=")
        out[key.strip()] = int(val)
    return out


def get_problem_info(spec: str) -> ProblemInfo:
    """Resolve a problem id like ``curveps``, ``bisphere:n=10`` or ``wfg7``."""
    spec = spec.strip().lower()
    base, _, argstr = spec.partition(":")
    args = _parse_args(argstr)
    if base == "curveps":
        return ProblemInfo(problem=curveps(), kind="curveps")
    if base == "bisphere":
        return ProblemInfo(problem=bisphere(**args), kind="bisphere")
    if base.startswith("wfg"):
        which = int(base[3:])
        prob = wfg(which, **args)
        ev: WFGEvaluator = prob.evaluate_batch
        return ProblemInfo(
            problem=prob,
            kind="wfg",
            k_position=ev.k,
            domain_lower=np.zeros(ev.n),
            domain_upper=ev.zmax.copy(),
        )
    raise ValueError(f"unknown problem id: {spec!r}")


def get_problem(spec: str) -> MOProblem:
    return get_problem_info(spec).problem
