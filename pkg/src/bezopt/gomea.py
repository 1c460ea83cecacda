"""Real-valued single-objective GOMEA.

Gene-pool optimal mixing over a family of subsets (FOS) of the genotype:
per element, a full-covariance Gaussian is estimated from the truncation
selection, new values are sampled and accepted only if the individual does
not get worse under constraint domination.  Adaptive variance scaling,
anticipated mean shift and forced improvement follow the AMaLGaM/RV-GOMEA
family defaults.  A run is strictly sequential and fully determined by its
seed; evaluation budgets are enforced by the fitness function's counter.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Sequence

import numpy as np
from scipy.linalg import solve_triangular

from .core import BudgetExhausted, EvaluationCounter


@dataclass(frozen=True)
class Evaluation:
    """Result of evaluating a genotype: fitness is maximized, constraint >= 0.

    ``genotype`` is the canonical form of the evaluated genotype (fitness
    functions may rewrite it, e.g. to a standardized orientation); ``cache``
    is an opaque payload enabling partial re-evaluation.  Both must be
    treated as immutable once returned.
    """

    fitness: float
    constraint: float
    cache: Any
    genotype: np.ndarray


class FitnessFunction:
    """Base class for set fitness functions optimized by GOMEA.

    Subclasses define ``l``, ``lower_init``, ``upper_init``, a ``counter``
    and ``evaluate``; ``evaluate_partial`` may exploit that only the given
    variables changed relative to ``prev``.  Implementations must not mutate
    the genotype array they receive.
    """

    l: int
    lower_init: np.ndarray
    upper_init: np.ndarray
    counter: EvaluationCounter

    def evaluate(self, genotype: np.ndarray) -> Evaluation:
        raise NotImplementedError

    def evaluate_partial(self, genotype: np.ndarray, changed: np.ndarray, prev: Evaluation) -> Evaluation:
        return self.evaluate(genotype)

    def align_for_model(self, genotype: np.ndarray, reference: np.ndarray) -> np.ndarray:
        """Representative of the genotype's symmetry class nearest the reference.

        Fitness functions with a canonicalization symmetry (e.g. reversible
        control polygons) override this so distribution estimation never
        mixes both representations of near-symmetric genotypes.
        """
        return genotype


class FunctionFitness(FitnessFunction):
    """Adapter wrapping a plain maximization function of one vector."""

    def __init__(self, fn: Callable[[np.ndarray], float], l: int, lower_init, upper_init,
                 counter: EvaluationCounter | None = None):
        self.fn = fn
        self.l = l
        self.lower_init = np.broadcast_to(np.asarray(lower_init, dtype=float), (l,))
        self.upper_init = np.broadcast_to(np.asarray(upper_init, dtype=float), (l,))
        self.counter = counter if counter is not None else EvaluationCounter()

    def evaluate(self, genotype: np.ndarray) -> Evaluation:
        self.counter.charge(1)
        return Evaluation(float(self.fn(genotype)), 0.0, None, genotype)


class Individual:
    """A genotype with its current evaluation and no-improvement streak."""

    __slots__ = ("genotype", "ev", "nis")

    def __init__(self, genotype: np.ndarray, ev: Evaluation, nis: int = 0):
        self.genotype = genotype
        self.ev = ev
        self.nis = nis

    @property
    def fitness(self) -> float:
        return self.ev.fitness

    @property
    def constraint(self) -> float:
        return self.ev.constraint

    def __repr__(self):
        return f"Individual(fitness={self.fitness:.6g}, constraint={self.constraint:.6g})"


def guideline_population_size(l: int, separable: bool) -> int:
    """Population-size guideline: 10*sqrt(l) if separable, else 17 + 3*l^1.5."""
    if l < 1:
        raise ValueError("l must be >= 1")
    if separable:
        return int(math.floor(10.0 * math.sqrt(l)))
    return 17 + int(math.floor(3.0 * l**1.5))


def _cd_key(fitness: float, constraint: float):
    """Total-preorder key for constraint domination (smaller is better)."""
    if constraint > 0.0:
        return (1, constraint, 0.0)
    return (0, 0.0, -fitness)


def _ev_key(ev: Evaluation):
    return _cd_key(ev.fitness, ev.constraint)


def constraint_dominated_compare(a, b) -> int:
    """-1 if a is better, +1 if b is better, 0 on a tie.

    Feasibility first; among infeasible solutions only the violation counts;
    among feasible ones the higher fitness wins.
    """
    ka = _cd_key(a.fitness, a.constraint)
    kb = _cd_key(b.fitness, b.constraint)
    if ka < kb:
        return -1
    if kb < ka:
        return 1
    return 0


def truncation_selection(pop: Sequence[Individual], tau: float) -> list[Individual]:
    """Best ceil(tau * N) individuals; stable (index) tiebreak."""
    if not pop:
        raise ValueError("population must be non-empty")
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must be in (0, 1)")
    n_sel = math.ceil(tau * len(pop))
    order = sorted(range(len(pop)), key=lambda i: _ev_key(pop[i].ev))
    return [pop[i] for i in order[:n_sel]]


# --- FOS --------------------------------------------------------------------


def build_fos(kind, l: int) -> list[np.ndarray]:
    """Resolve a FOS description into index arrays covering all l variables.

    ``kind`` is "univariate", "full", ("blocks", size) for contiguous blocks,
    or an explicit list of index collections.
    """
    if isinstance(kind, str):
        if kind == "univariate":
            fos = [np.array([i]) for i in range(l)]
        elif kind == "full":
            fos = [np.arange(l)]
        else:
            raise ValueError(f"unknown FOS kind {kind!r}")
    elif isinstance(kind, tuple) and len(kind) == 2 and kind[0] == "blocks":
        size = int(kind[1])
        if size < 1 or l % size != 0:
            raise ValueError("block size must divide l")
        fos = [np.arange(i, i + size) for i in range(0, l, size)]
    else:
        fos = [np.asarray(sorted(e), dtype=int) for e in kind]
    _validate_fos(fos, l)
    return fos


def _validate_fos(fos: list[np.ndarray], l: int) -> None:
    seen = np.zeros(l, dtype=bool)
    for e in fos:
        if e.size == 0:
            raise ValueError("FOS elements must be non-empty")
        if e.min() < 0 or e.max() >= l:
            raise ValueError("FOS element index out of range")
        seen[e] = True
    if not seen.all():
        raise ValueError("FOS must cover all variables")


# --- Gaussian element models -------------------------------------------------


@dataclass
class ElementDistribution:
    """Gaussian model of one FOS element: N(mean, (multiplier^2) L L^T)."""

    element: np.ndarray
    mean: np.ndarray
    chol: np.ndarray
    multiplier: float = 1.0
    cov: np.ndarray | None = None


def _factor_covariance(cov: np.ndarray) -> np.ndarray:
    jitter = 1e-10 * np.trace(cov)
    try:
        return np.linalg.cholesky(cov + jitter * np.eye(cov.shape[0]))
    except np.linalg.LinAlgError:
        return np.diag(np.sqrt(np.clip(np.diag(cov), 0.0, None)))


def ml_estimate(selection: np.ndarray, element: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Maximum-likelihood mean and covariance restricted to the element."""
    vals = selection[:, element]
    mean = vals.mean(axis=0)
    centered = vals - mean
    cov = centered.T @ centered / vals.shape[0]
    return mean, cov


def estimate_distribution(selection: np.ndarray, element: np.ndarray,
                          multiplier: float = 1.0,
                          prev_cov: np.ndarray | None = None,
                          eta_cov: float = 1.0,
                          model: str = "full") -> ElementDistribution:
    """Gaussian model for one element from the selected genotypes.

    Mean and covariance are the maximum-likelihood estimates; with
    ``eta_cov`` < 1 and a previous covariance, the covariance is memory
    smoothed (incremental estimation), which keeps small populations from
    collapsing the model before the search is done.  The covariance gets a
    relative diagonal jitter before factorization; if factorization still
    fails it degrades to the diagonal of the sample variances (which handles
    a fully collapsed selection).
    """
    mean, cov = ml_estimate(selection, element)
    k = element.size
    if selection.shape[0] <= k:
        # rank-deficient estimate: blend toward the isotropic average scale
        # so no direction dies with the sample subspace
        cov = 0.9 * cov + 0.1 * (np.trace(cov) / k) * np.eye(k)
    if model == "univariate":
        cov = np.diag(np.diag(cov))
    elif isinstance(model, tuple) and model[0] == "blocks":
        size = int(model[1])
        k = cov.shape[0]
        keep = np.zeros_like(cov, dtype=bool)
        for s in range(0, k, size):
            e2 = min(s + size, k)
            keep[s:e2, s:e2] = True
        cov = np.where(keep, cov, 0.0)
    elif model != "full":
        raise ValueError(f"unknown covariance model {model!r}")
    if prev_cov is not None and eta_cov < 1.0:
        cov = (1.0 - eta_cov) * prev_cov + eta_cov * cov
    chol = _factor_covariance(cov)
    return ElementDistribution(element=element, mean=mean, chol=chol,
                               multiplier=multiplier, cov=cov)


# --- configuration and run state ---------------------------------------------


@dataclass
class GomeaConfig:
    """Run parameters; the MO-feval budget is enforced via the fitness counter."""

    population_size: int
    tau: float = 0.35
    fos: Any = "full"
    seed: int = 0
    budget: int | None = None
    eta_cov: float = 0.1
    eta_cov_polish: float | None = None  # memory rate once feasible (None: eta_cov)
    eta_shift: float = 0.3
    model: Any = "full"
    avs: str = "phase"  # "phase" | "aggressive" | "standard"
    fi_threshold: int | None = None
    max_generations: int | None = None
    vtr: float | None = None
    max_no_improvement: int | None = None

    def __post_init__(self):
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if not 0.0 < self.tau < 1.0:
            raise ValueError("tau must be in (0, 1)")


@dataclass(frozen=True)
class TraceRow:
    fevals: int
    fitness: float
    constraint: float
    generation: int
    event: str  # "init" | "improvement" | "generation"


class _Elitist:
    """Best-so-far copy, safe against later in-place genotype mutation."""

    __slots__ = ("genotype", "ev", "key")

    def __init__(self, ind: Individual):
        self.update(ind)

    def update(self, ind: Individual) -> None:
        self.genotype = ind.genotype.copy()
        self.ev = Evaluation(ind.ev.fitness, ind.ev.constraint, ind.ev.cache, self.genotype)
        self.key = _ev_key(ind.ev)

    def as_individual(self) -> Individual:
        return Individual(self.genotype, self.ev)


class _GenStats:
    """Per-generation AVS bookkeeping.

    For each element the standardized positions of strictly improving
    accepted samples are averaged; the multiplier grows only when that
    average lands beyond one standard deviation from the mean (SDR rule), so
    isotropic improvements near convergence do not keep inflating the
    variance while a travelling population does.
    """

    def __init__(self, n_elements: int):
        self.improved_via = [False] * n_elements
        self.imp_sum = [None] * n_elements
        self.imp_count = [0] * n_elements
        self.elitist_improved = False

    def record_improvement(self, ei: int, dist: ElementDistribution, values: np.ndarray):
        self.improved_via[ei] = True
        self.elitist_improved = True
        delta = values - dist.mean
        try:
            z = solve_triangular(dist.chol, delta, lower=True) / dist.multiplier
        except (np.linalg.LinAlgError, ValueError):
            z = np.full(delta.shape, np.inf)  # collapsed model: force inflation
        if self.imp_sum[ei] is None:
            self.imp_sum[ei] = z
        else:
            self.imp_sum[ei] = self.imp_sum[ei] + z
        self.imp_count[ei] += 1

    def beyond_one_sd(self, ei: int, noise_corrected: bool = True) -> bool:
        m = self.imp_count[ei]
        if m == 0:
            return False
        z_mean = self.imp_sum[ei] / m
        k = z_mean.size
        if not noise_corrected:
            threshold = 1.0
        else:
            # one standard deviation, widened to the noise scale of the max
            # component of an average of m standard normal draws
            threshold = max(1.0, 0.85 * math.sqrt(2.0 * math.log(2.0 * k) / m))
        return bool(np.max(np.abs(z_mean)) > threshold)


def gom_step(ind: Individual, fos: list[np.ndarray], dists: list[ElementDistribution],
             fitness_fn: FitnessFunction, rng: np.random.Generator, *,
             ams_shifts: list[np.ndarray] | None = None,
             elitist: _Elitist | None = None,
             stats: _GenStats | None = None,
             on_improvement=None) -> bool:
    """One optimal-mixing pass over all FOS elements, in random order.

    Sampled element values are accepted on better-or-equal under constraint
    domination, otherwise reverted.  Returns True if the individual strictly
    improved at least once.  Raises BudgetExhausted with the individual left
    in a consistent (reverted) state.
    """
    improved = False
    for ei in rng.permutation(len(fos)):
        d = dists[ei]
        e = d.element
        z = rng.standard_normal(e.size)
        new_vals = d.mean + d.multiplier * (d.chol @ z)
        if ams_shifts is not None:
            new_vals = new_vals + 2.0 * ams_shifts[ei]
        old_vals = ind.genotype[e].copy()
        old_ev = ind.ev
        old_key = _ev_key(old_ev)
        ind.genotype[e] = new_vals
        try:
            ev = fitness_fn.evaluate_partial(ind.genotype, e, old_ev)
        except BudgetExhausted:
            ind.genotype[e] = old_vals
            raise
        key = _ev_key(ev)
        if key <= old_key:
            ind.ev = ev
            ind.genotype = ev.genotype
            if key < old_key:
                improved = True
            if elitist is not None and key < elitist.key:
                elitist.update(ind)
                if stats is not None:
                    stats.record_improvement(ei, d, new_vals)
                if on_improvement is not None:
                    on_improvement(elitist)
        else:
            ind.genotype[e] = old_vals
        if __debug__:
            assert _ev_key(ind.ev) <= old_key
    return improved


def _forced_improvement(ind: Individual, fos: list[np.ndarray],
                        fitness_fn: FitnessFunction, rng: np.random.Generator,
                        elitist: _Elitist, stats: _GenStats,
                        on_improvement=None) -> None:
    """Mix elements from the elitist; on total failure replace by the elitist."""
    for ei in rng.permutation(len(fos)):
        e = fos[ei]
        src = elitist.genotype[e]
        if np.array_equal(src, ind.genotype[e]):
            continue
        old_vals = ind.genotype[e].copy()
        old_ev = ind.ev
        old_key = _ev_key(old_ev)
        ind.genotype[e] = src
        try:
            ev = fitness_fn.evaluate_partial(ind.genotype, e, old_ev)
        except BudgetExhausted:
            ind.genotype[e] = old_vals
            raise
        key = _ev_key(ev)
        if key < old_key:
            ind.ev = ev
            ind.genotype = ev.genotype
            ind.nis = 0
            if key < elitist.key:
                elitist.update(ind)
                stats.elitist_improved = True
                if on_improvement is not None:
                    on_improvement(elitist)
            return
        ind.genotype[e] = old_vals
    ind.genotype = elitist.genotype.copy()
    ind.ev = Evaluation(elitist.ev.fitness, elitist.ev.constraint, elitist.ev.cache, ind.genotype)
    ind.nis = 0


def run(fitness_fn: FitnessFunction, config: GomeaConfig,
        on_improvement=None, on_generation=None) -> tuple[Individual, list[TraceRow]]:
    """Run GOMEA until the budget, a stop criterion, or generation limit hits.

    Returns the best individual found (under constraint domination) and a
    trace with one row per elitist improvement and per generation.
    ``on_improvement(elitist, fevals)`` / ``on_generation(elitist, fevals,
    gen)`` callbacks let callers enrich the trace without extra evaluations.
    """
    rng = np.random.default_rng(config.seed)
    N = config.population_size
    l = fitness_fn.l
    fos = build_fos(config.fos, l)
    counter = fitness_fn.counter
    trace: list[TraceRow] = []

    def _notify_improvement(elitist: _Elitist):
        trace.append(TraceRow(counter.count, elitist.ev.fitness, elitist.ev.constraint,
                              generation[0], "improvement"))
        if on_improvement is not None:
            on_improvement(elitist.ev, counter.count)

    generation = [0]
    G = rng.uniform(fitness_fn.lower_init, fitness_fn.upper_init, size=(N, l))
    pop: list[Individual] = []
    exhausted = False
    for i in range(N):
        try:
            ev = fitness_fn.evaluate(G[i].copy())
        except BudgetExhausted:
            exhausted = True
            break
        pop.append(Individual(ev.genotype, ev))
    if not pop:
        # nothing could be evaluated: return the first initial genotype, unranked
        placeholder = Individual(G[0].copy(), Evaluation(-math.inf, math.inf, None, G[0].copy()))
        return placeholder, trace

    elitist = _Elitist(min(pop, key=lambda ind: _ev_key(ind.ev)))
    _notify_improvement(elitist)

    if exhausted:
        return elitist.as_individual(), trace

    mults = [1.0] * len(fos)
    cov_mem: list = [None] * len(fos)
    shift_mem: list = [None] * len(fos)
    element_nis = [0] * len(fos)
    element_nis_max = 25 + l
    prev_means: list[np.ndarray] | None = None
    if config.fi_threshold is not None:
        nis_threshold = config.fi_threshold
    else:
        # a GOM pass offers one improvement opportunity per element; scale
        # the streak budget so small FOS models are not flooded with forced
        # improvements (which clone the elitist and collapse the population)
        nis_threshold = (1 + int(math.floor(math.log10(N)))) \
            * max(1, math.ceil(10 / len(fos)))
    ams_count = math.ceil(0.5 * config.tau * N)
    gens_without_improvement = 0

    while True:
        if config.max_generations is not None and generation[0] >= config.max_generations:
            break
        if config.vtr is not None and elitist.ev.constraint == 0.0 and elitist.ev.fitness >= config.vtr:
            break
        if (config.max_no_improvement is not None
                and gens_without_improvement >= config.max_no_improvement):
            break

        selection = truncation_selection(pop, config.tau)
        sel_G = np.stack([fitness_fn.align_for_model(ind.genotype, elitist.genotype)
                          for ind in selection])
        eta_cov = config.eta_cov
        if config.eta_cov_polish is not None and elitist.ev.constraint == 0.0:
            eta_cov = config.eta_cov_polish
        dists = [estimate_distribution(sel_G, e, mults[ei],
                                       prev_cov=cov_mem[ei], eta_cov=eta_cov,
                                       model=config.model)
                 for ei, e in enumerate(fos)]
        for ei, d in enumerate(dists):
            cov_mem[ei] = d.cov
        if prev_means is None:
            shifts = [np.zeros(e.size) for e in fos]
        else:
            # memory-smoothed anticipated mean shift: consistent travel
            # accumulates, estimation noise averages out
            shifts = []
            for ei, (d, pm) in enumerate(zip(dists, prev_means)):
                raw = d.mean - pm
                if shift_mem[ei] is None:
                    shift_mem[ei] = raw
                else:
                    shift_mem[ei] = (1.0 - config.eta_shift) * shift_mem[ei] \
                        + config.eta_shift * raw
                shifts.append(shift_mem[ei])
        best_index = min(range(len(pop)), key=lambda i: (_ev_key(pop[i].ev), i))
        ams_indices = set()
        for i in range(len(pop)):
            if len(ams_indices) >= ams_count:
                break
            if i != best_index:
                ams_indices.add(i)

        stats = _GenStats(len(fos))
        try:
            for i, ind in enumerate(pop):
                if ind.nis > nis_threshold:
                    _forced_improvement(ind, fos, fitness_fn, rng, elitist, stats,
                                        on_improvement=_notify_improvement)
                else:
                    improved = gom_step(
                        ind, fos, dists, fitness_fn, rng,
                        ams_shifts=shifts if i in ams_indices else None,
                        elitist=elitist, stats=stats,
                        on_improvement=_notify_improvement)
                    ind.nis = 0 if improved else ind.nis + 1
        except BudgetExhausted:
            exhausted = True

        # while the elitist is infeasible the run is unfolding/travelling:
        # inflate on any off-mean improvement and never pull the model back,
        # so the population cannot starve mid-journey; once feasible, demand
        # improvements clear of estimation noise and decay otherwise
        if config.avs == "phase":
            searching = elitist.ev.constraint > 0.0
        else:
            searching = config.avs == "aggressive"
        for ei in range(len(fos)):
            if stats.improved_via[ei]:
                element_nis[ei] = 0
                if stats.beyond_one_sd(ei, noise_corrected=not searching):
                    mults[ei] *= 1.0 / 0.9
                elif not searching:
                    mults[ei] *= 0.9  # pull an inflated model back while polishing
                if mults[ei] < 1.0:
                    mults[ei] = 1.0
            else:
                element_nis[ei] += 1
                mults[ei] *= 0.9
                # decay below 1.0 (forcing convergence) only after a long
                # streak without improvements through this element
                if element_nis[ei] <= element_nis_max and mults[ei] < 1.0:
                    mults[ei] = 1.0
            mults[ei] = min(max(mults[ei], 1e-10), 1e3)
        prev_means = [d.mean for d in dists]

        generation[0] += 1
        gens_without_improvement = 0 if stats.elitist_improved else gens_without_improvement + 1
        trace.append(TraceRow(counter.count, elitist.ev.fitness, elitist.ev.constraint,
                              generation[0], "generation"))
        if on_generation is not None:
            on_generation(elitist.ev, counter.count, generation[0])
        if exhausted:
            break

    return elitist.as_individual(), trace
