"""UHV-based solver: concatenated solution-set genotypes optimized by GOMEA.

A genotype concatenates p decision vectors; fitness is the uncrowded
hypervolume of the decoded set.  The grey-box variant re-evaluates only the
solutions whose variables changed (one FOS element per solution), the
black-box variant treats the whole genotype as one element.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import (
    ApproximationSet,
    EvaluationCounter,
    MOProblem,
    SolutionSet,
    evaluate_batch,
    nondominated_mask,
)
from .gomea import (
    Evaluation,
    FitnessFunction,
    GomeaConfig,
    Individual,
    TraceRow,
    guideline_population_size,
    run as gomea_run,
)
from .indicators import (
    SmoothnessUndefined,
    _uhv_core,
    hv2d,
    left_to_right_order,
    smoothness,
    uhv_of_objectives,
)


class UhvCache(NamedTuple):
    """Per-genotype cache: objective vectors and a debug snapshot of X."""

    F: np.ndarray
    snapshot: np.ndarray | None


class UhvFitness(FitnessFunction):
    """Uncrowded hypervolume of a concatenated solution set (maximized)."""

    def __init__(self, problem: MOProblem, p: int, r, counter: EvaluationCounter):
        if p < 1:
            raise ValueError("p must be >= 1")
        self.problem = problem
        self.p = p
        self.n = problem.n
        self.r = np.asarray(r, dtype=float)
        self._r1, self._r2 = float(self.r[0]), float(self.r[1])
        self.counter = counter
        self.l = p * problem.n
        self.lower_init = np.tile(problem.lower_init, p)
        self.upper_init = np.tile(problem.upper_init, p)

    def decode(self, genotype: np.ndarray) -> np.ndarray:
        return genotype.reshape(self.p, self.n)

    def evaluate(self, genotype: np.ndarray) -> Evaluation:
        X = self.decode(genotype)
        F = evaluate_batch(self.problem, X, self.counter)
        snapshot = X.copy() if __debug__ else None
        fit = _uhv_core(F.tolist(), self._r1, self._r2)
        return Evaluation(fit, 0.0, UhvCache(F, snapshot), genotype)

    def evaluate_partial(self, genotype: np.ndarray, changed: np.ndarray,
                         prev: Evaluation) -> Evaluation:
        X = self.decode(genotype)
        changed_sols = np.unique(np.asarray(changed, dtype=int) // self.n)
        if __debug__ and prev.cache.snapshot is not None:
            keep = np.ones(self.p, dtype=bool)
            keep[changed_sols] = False
            assert np.array_equal(X[keep], prev.cache.snapshot[keep]), \
                "stale UHV cache: unchanged solutions were modified"
        F = prev.cache.F.copy()
        if changed_sols.size:
            F[changed_sols] = evaluate_batch(self.problem, X[changed_sols], self.counter)
        snapshot = X.copy() if __debug__ else None
        fit = _uhv_core(F.tolist(), self._r1, self._r2)
        return Evaluation(fit, 0.0, UhvCache(F, snapshot), genotype)


def uhv_fitness(genotype, problem: MOProblem, p: int, r,
                counter: EvaluationCounter) -> float:
    """UHV of the decoded solution set; evaluates all p solutions."""
    fn = UhvFitness(problem, p, r, counter)
    return fn.evaluate(np.asarray(genotype, dtype=float)).fitness


def partial_uhv_fitness(genotype, changed_solutions, cache: UhvCache,
                        problem: MOProblem, p: int, r,
                        counter: EvaluationCounter) -> tuple[float, UhvCache]:
    """UHV re-using cached objectives for unchanged solutions.

    ``changed_solutions`` holds solution (not variable) indices; the result
    is bitwise equal to a full ``uhv_fitness`` of the same genotype.
    """
    fn = UhvFitness(problem, p, r, counter)
    genotype = np.asarray(genotype, dtype=float)
    changed_sols = sorted(set(int(i) for i in changed_solutions))
    changed_vars = np.concatenate(
        [np.arange(i * problem.n, (i + 1) * problem.n) for i in changed_sols]
    ) if changed_sols else np.empty(0, dtype=int)
    prev = Evaluation(0.0, 0.0, cache, genotype)
    ev = fn.evaluate_partial(genotype, changed_vars, prev)
    return ev.fitness, ev.cache


def build_fos_uhvea(p: int, n: int, variant: str) -> list[np.ndarray]:
    """Grey-box: one element per solution; black-box: one full element."""
    if variant == "gb":
        return [np.arange(i * n, (i + 1) * n) for i in range(p)]
    if variant == "bb":
        return [np.arange(p * n)]
    raise ValueError(f"variant must be 'gb' or 'bb', got {variant!r}")


class UhvTraceRow(NamedTuple):
    fevals: int
    hv: float
    uhv: float
    sm: float | None


@dataclass
class UhveaResult:
    """Final approximation set plus the raw run artifacts."""

    approximation_set: ApproximationSet
    order: list[int]
    full_set: SolutionSet
    best: Individual
    trace: list[UhvTraceRow]
    gomea_trace: list[TraceRow]
    counter: EvaluationCounter


def default_population_size(problem: MOProblem, p: int, variant: str) -> int:
    l_eff = problem.n if variant == "gb" else p * problem.n
    return guideline_population_size(l_eff, problem.separable)


def run_uhvea(problem: MOProblem, p: int, r=(11.0, 11.0), variant: str = "gb",
              budget: int | None = None, N: int | None = None, seed: int = 0,
              tau: float = 0.35, eta_cov: float = 0.1,
              avs: str | None = None, model=None,
              max_generations: int | None = None,
              vtr: float | None = None,
              max_no_improvement: int | None = None) -> UhveaResult:
    """Optimize a p-solution set under the UHV and return its approximation set.

    The variance adaptation runs in its inflation-friendly mode by default:
    UHV genotypes are never infeasible, so the feasibility-gated mode would
    never grant the travel boost the approach phase needs.
    """
    if N is None:
        N = default_population_size(problem, p, variant)
    counter = EvaluationCounter(budget)
    fitness = UhvFitness(problem, p, r, counter)
    fos = build_fos_uhvea(p, problem.n, variant)
    config = GomeaConfig(population_size=N, tau=tau, fos=fos, seed=seed, budget=budget,
                         eta_cov=eta_cov,
                         avs="aggressive" if avs is None else avs,
                         model="full" if model is None else model,
                         max_generations=max_generations, vtr=vtr,
                         max_no_improvement=max_no_improvement)
    trace: list[UhvTraceRow] = []

    def record(ev: Evaluation, fevals: int, _gen=None):
        trace.append(_metrics_row(ev, fevals, fitness))

    best, gomea_trace = gomea_run(fitness, config,
                                  on_improvement=record, on_generation=record)

    X = fitness.decode(best.genotype)
    F = best.ev.cache.F
    mask = nondominated_mask(F)
    idx = np.flatnonzero(mask)
    full_set = SolutionSet(X, F)
    nd = ApproximationSet(X[idx], F[idx])
    ltr = left_to_right_order(nd)
    approx = ApproximationSet(nd.X[ltr], nd.F[ltr])
    order = [int(idx[i]) for i in ltr]
    return UhveaResult(approximation_set=approx, order=order, full_set=full_set,
                       best=best, trace=trace, gomea_trace=gomea_trace, counter=counter)


def _metrics_row(ev: Evaluation, fevals: int, fitness: UhvFitness) -> UhvTraceRow:
    F = ev.cache.F
    mask = nondominated_mask(F)
    idx = np.flatnonzero(mask)
    hv = hv2d(F[idx], fitness.r)
    X = fitness.decode(ev.genotype)
    nd = SolutionSet(X[idx], F[idx])
    ltr = left_to_right_order(nd)
    try:
        sm = smoothness(nd, ltr)
    except SmoothnessUndefined:
        sm = None
    return UhvTraceRow(fevals=fevals, hv=hv, uhv=ev.fitness, sm=sm)
