"""bezopt: bi-objective optimization of navigable approximation sets.

Solvers reformulate a two-objective problem as a single-objective
uncrowded-hypervolume problem over either concatenated solution sets
(UHVEA) or Bezier-curve parameterized sets (BezEA), optimized with a
gene-pool optimal mixing evolutionary algorithm.
"""
from .core import (
    ApproximationSet,
    BudgetExhausted,
    Domination,
    EvaluationCounter,
    MOProblem,
    Solution,
    SolutionSet,
    approximation_set,
    compare_domination,
    evaluate,
    evaluate_batch,
)
from .indicators import (
    delta_hv,
    ghss,
    hv2d,
    left_to_right_order,
    smoothness,
    uhv,
    uncrowded_distance,
)
from .bezier import (
    BezierSolutionSet,
    ControlPolygon,
    NavResult,
    bernstein,
    bezier_eval,
    constraint,
    navigational_order,
    sample_set,
    standardize_direction,
)
from .gomea import (
    GomeaConfig,
    constraint_dominated_compare,
    guideline_population_size,
)
from .benchmarks import bisphere, curveps, get_problem, wfg
from .uhvea import run_uhvea, uhv_fitness, build_fos_uhvea
from .bezea import run_bezea, bez_fitness

__version__ = "0.1.0"
