"""Experiment runner: configs, budget enforcement, result bundles, reports.

A run config is a flat key=value text file; a run produces one JSON result
bundle per repetition.  Bundles are self-contained: the final solution set,
optional control polygon and dense curve samples, metrics and the
convergence trace, so reports and the navigator UI never re-evaluate
objectives.
"""
from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
from scipy import stats as scipy_stats

from .benchmarks import get_problem
from .bezea import run_bezea
from .bezier import ControlPolygon, bezier_eval, sample_parameters
from .core import EvaluationCounter, MOProblem, SolutionSet, evaluate_batch
from .indicators import (
    SmoothnessUndefined,
    hv2d,
    smoothness,
    uhv_of_objectives,
)
from .uhvea import run_uhvea

ALGORITHMS = ("uhvea-gb", "uhvea-bb", "bezea")


@dataclass
class RunConfig:
    """Everything needed to reproduce an experiment."""

    algorithm: str
    problem: str
    p: int
    budget: int
    q: int | None = None
    N: int | None = None
    r: tuple[float, float] = (11.0, 11.0)
    seed: int = 0
    repetitions: int = 1
    trace_stride: int = 1
    output: str | None = None
    dense_samples: int = 200
    workers: int = 1
    hv_ref_store: str | None = None
    eta_cov: float = 0.1
    tau: float = 0.35
    avs: str | None = None
    model: str | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"algorithm must be one of {ALGORITHMS}, got {self.algorithm!r}")
        if self.p < 2:
            raise ValueError("p must be >= 2")
        if self.algorithm == "bezea":
            if self.q is None or self.q < 2:
                raise ValueError("bezea requires q >= 2")
        if self.budget < 1:
            raise ValueError("budget must be positive")
        if self.repetitions < 1:
            raise ValueError("repetitions must be >= 1")
        if self.trace_stride < 1:
            raise ValueError("trace_stride must be >= 1")
        r = tuple(float(v) for v in self.r)
        if len(r) != 2:
            raise ValueError("r must have two components")
        self.r = r

    def cell_label(self) -> str:
        if self.algorithm == "bezea":
            return f"bezea(q={self.q})"
        return self.algorithm


_BOOLS = {"true": True, "false": False}


def _coerce(value: str):
    value = value.strip()
    low = value.lower()
    if low in _BOOLS:
        return _BOOLS[low]
    if "," in value:
        return tuple(_coerce(v) for v in value.split(","))
    try:
        return int(value)
    except ValueError:
        pass
    try:
        return float(value)
    except ValueError:
        pass
    return value


def parse_config(text: str) -> RunConfig:
    """Parse the flat key=value config format (# starts a comment)."""
    fields: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key = value, got {raw!r}")
        key, _, value = line.partition("=")
        fields[key.strip().replace("-", "_")] = _coerce(value)
    try:
        return RunConfig(**fields)
    except TypeError as exc:
        raise ValueError(f"invalid config: {exc}") from None


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


@dataclass
class ResultBundle:
    """Serialized output of one repetition."""

    config: dict
    algorithm: str
    problem: str
    p: int
    q: int | None
    r: tuple[float, float]
    seed: int
    mo_fevals: int
    wall_clock_sec: float
    points: list  # {idx, t?, x, f, in_nav_order}
    nav_order: list
    control_points: list | None
    dense_curve: list | None  # {t, x, f}
    metrics: dict  # hv, uhv, sm, nav_count, delta_hv
    trace: list  # {fevals, hv, uhv, constraint, sm, nav_count}
    schema_version: int = 1

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    @staticmethod
    def from_json(text: str) -> "ResultBundle":
        data = json.loads(text)
        data["r"] = tuple(data["r"])
        bundle = ResultBundle(**data)
        bundle.self_check()
        return bundle

    def write(self, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.to_json())
        return path

    @staticmethod
    def load(path) -> "ResultBundle":
        return ResultBundle.from_json(Path(path).read_text())

    # -- derived views ----------------------------------------------------
    def objectives(self) -> np.ndarray:
        return np.array([pt["f"] for pt in self.points], dtype=float)

    def decisions(self) -> np.ndarray:
        return np.array([pt["x"] for pt in self.points], dtype=float)

    def front(self) -> np.ndarray:
        return self.objectives()[self.nav_order]

    def self_check(self, tol: float = 1e-9) -> None:
        """Final metrics must be recomputable from the stored set."""
        F = self.objectives()
        hv = hv2d(F[self.nav_order], self.r)
        if not math.isclose(hv, self.metrics["hv"], rel_tol=0.0, abs_tol=tol):
            raise ValueError(
                f"bundle inconsistent: stored hv={self.metrics['hv']!r}, recomputed {hv!r}"
            )
        sm = self.metrics.get("sm")
        if sm is not None and len(self.nav_order) >= 3:
            S = SolutionSet(self.decisions(), F)
            sm_re = smoothness(S, self.nav_order)
            if not math.isclose(sm_re, sm, rel_tol=0.0, abs_tol=tol):
                raise ValueError(
                    f"bundle inconsistent: stored sm={sm!r}, recomputed {sm_re!r}"
                )
        fevals = [row["fevals"] for row in self.trace]
        if any(b < a for a, b in zip(fevals, fevals[1:])):
            raise ValueError("bundle inconsistent: trace fevals not monotone")


class HvReferenceStore:
    """Best-known hypervolume values per (problem, p, r); max-merged on update."""

    def __init__(self, path=None):
        self.path = Path(path) if path is not None else None
        self.entries: dict[str, dict] = {}
        if self.path is not None and self.path.exists():
            self.entries = json.loads(self.path.read_text())

    @staticmethod
    def key(problem: str, p: int, r) -> str:
        r1, r2 = (float(v) for v in r)
        return f"{problem}|p={p}|r={r1:g},{r2:g}"

    def get(self, problem: str, p: int, r) -> float | None:
        entry = self.entries.get(self.key(problem, p, r))
        return None if entry is None else entry["hv_star"]

    def update(self, problem: str, p: int, r, hv_star: float, provenance: dict) -> bool:
        """Insert or raise the stored value; returns True if stored."""
        key = self.key(problem, p, r)
        cur = self.entries.get(key)
        if cur is not None and cur["hv_star"] >= hv_star:
            return False
        self.entries[key] = {"hv_star": float(hv_star), "provenance": provenance}
        return True

    def save(self, path=None) -> None:
        path = Path(path) if path is not None else self.path
        if path is None:
            raise ValueError("no path to save the reference store to")
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(self.entries, indent=1, sort_keys=True))


def default_store_path() -> Path:
    return Path(__file__).parent / "data" / "hv_refs.json"


def _strided(rows: list, stride: int) -> list:
    if stride <= 1 or len(rows) <= 2:
        return rows
    kept = rows[::stride]
    if kept and kept[-1] is not rows[-1]:
        kept.append(rows[-1])
    return kept


def run_single(config: RunConfig, seed: int) -> ResultBundle:
    """Run one repetition with the given seed and assemble its bundle."""
    problem = get_problem(config.problem)
    t0 = time.perf_counter()
    common = dict(budget=config.budget, N=config.N, seed=seed,
                  tau=config.tau, eta_cov=config.eta_cov,
                  avs=config.avs, model=config.model)
    if config.algorithm == "bezea":
        res = run_bezea(problem, p=config.p, q=config.q, r=config.r, **common)
        counter = res.counter
        X, F = res.samples.X, res.samples.F
        ts = res.samples.ts
        nav_order = list(res.nav.order)
        points = [
            {"idx": i, "t": float(ts[i]), "x": list(map(float, X[i])),
             "f": [float(F[i, 0]), float(F[i, 1])], "in_nav_order": i in set(nav_order)}
            for i in range(len(ts))
        ]
        control_points = [list(map(float, c)) for c in res.polygon.points]
        dense_curve = dense_curve_samples(res.polygon, problem, config.dense_samples)
        trace = [
            {"fevals": r.fevals, "hv": r.hv, "uhv": None, "constraint": r.constraint,
             "sm": r.sm, "nav_count": r.nav_count}
            for r in res.trace
        ]
    else:
        variant = config.algorithm.split("-")[1]
        res = run_uhvea(problem, p=config.p, r=config.r, variant=variant, **common)
        counter = res.counter
        X, F = res.full_set.X, res.full_set.F
        nav_order = list(res.order)
        points = [
            {"idx": i, "x": list(map(float, X[i])),
             "f": [float(F[i, 0]), float(F[i, 1])], "in_nav_order": i in set(nav_order)}
            for i in range(X.shape[0])
        ]
        control_points = None
        dense_curve = None
        trace = [
            {"fevals": r.fevals, "hv": r.hv, "uhv": r.uhv, "constraint": None,
             "sm": r.sm, "nav_count": None}
            for r in res.trace
        ]

    hv = hv2d(F[nav_order], config.r)
    uhv_val = uhv_of_objectives(F, config.r)
    try:
        sm = smoothness(SolutionSet(X, F), nav_order)
    except SmoothnessUndefined:
        sm = None
    store_path = config.hv_ref_store or default_store_path()
    store = HvReferenceStore(store_path)
    hv_star = store.get(config.problem, config.p, config.r)
    metrics = {
        "hv": hv,
        "uhv": uhv_val,
        "sm": sm,
        "nav_count": len(nav_order),
        "delta_hv": None if hv_star is None else hv_star - hv,
    }
    bundle = ResultBundle(
        config=_config_echo(config),
        algorithm=config.algorithm,
        problem=config.problem,
        p=config.p,
        q=config.q if config.algorithm == "bezea" else None,
        r=config.r,
        seed=seed,
        mo_fevals=counter.count,
        wall_clock_sec=time.perf_counter() - t0,
        points=points,
        nav_order=nav_order,
        control_points=control_points,
        dense_curve=dense_curve,
        metrics=metrics,
        trace=_strided(trace, config.trace_stride),
    )
    bundle.self_check()
    return bundle


def _config_echo(config: RunConfig) -> dict:
    echo = asdict(config)
    echo["r"] = list(config.r)
    return echo


def dense_curve_samples(polygon: ControlPolygon, problem: MOProblem, dense_p: int) -> list:
    """Dense (t, x, f) samples along a curve; evaluations are not budgeted."""
    ts = sample_parameters(dense_p)
    X = np.stack([bezier_eval(polygon, t) for t in ts])
    F = evaluate_batch(problem, X, EvaluationCounter())
    return [
        {"t": float(ts[i]), "x": list(map(float, X[i])),
         "f": [float(F[i, 0]), float(F[i, 1])]}
        for i in range(dense_p)
    ]


def _run_single_dict(args) -> ResultBundle:
    config_fields, seed = args
    return run_single(RunConfig(**config_fields), seed)


def run_experiment(config: RunConfig) -> list[ResultBundle]:
    """All repetitions of a config; returns one bundle per repetition.

    Repetition k uses seed + k.  With workers > 1 repetitions run in a
    process pool; results are identical to a sequential run.
    """
    seeds = [config.seed + k for k in range(config.repetitions)]
    fields = asdict(config)
    if config.workers > 1 and config.repetitions > 1:
        with ProcessPoolExecutor(max_workers=config.workers) as pool:
            bundles = list(pool.map(_run_single_dict, [(fields, s) for s in seeds]))
    else:
        bundles = [run_single(config, s) for s in seeds]
    if config.output:
        out = Path(config.output)
        stem = f"{config.problem}-{config.cell_label()}".replace("(", "-").replace(")", "")
        stem = stem.replace("=", "")
        for bundle in bundles:
            bundle.write(out / f"{stem}-seed{bundle.seed}.json")
    return bundles


def compute_hv_reference(problem_id: str, p: int, r, budget: int, seeds,
                         store: HvReferenceStore | None = None,
                         N: int | None = None) -> float:
    """Best hypervolume over long UHVEA-gb runs; max-merged into the store."""
    problem = get_problem(problem_id)
    best = -math.inf
    seeds = list(seeds)
    for seed in seeds:
        res = run_uhvea(problem, p=p, r=r, variant="gb", budget=budget, seed=seed, N=N)
        hv = hv2d(res.approximation_set.F, r)
        best = max(best, hv)
    if store is not None:
        store.update(problem_id, p, r, best,
                     provenance={"method": "uhvea-gb", "budget": budget,
                                 "seeds": seeds, "N": N})
    return best


# --- summaries ----------------------------------------------------------------


@dataclass
class SummaryCell:
    problem: str
    cell: str
    n_runs: int
    hv_mean: float
    hv_std: float
    sm_mean: float | None
    rank: int = 0
    p_value: float | None = None  # rank-sum vs the best cell of the problem
    best: bool = False


def _rank_sum_p(a, b) -> float:
    """Two-sided rank-sum p-value; exact for small untied samples."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    ties = len(np.unique(np.concatenate([a, b]))) < len(a) + len(b)
    method = "exact" if (not ties and max(len(a), len(b)) <= 25) else "asymptotic"
    res = scipy_stats.mannwhitneyu(a, b, alternative="two-sided", method=method,
                                   use_continuity=False)
    return float(res.pvalue)


def summarize(bundles: list[ResultBundle], alpha: float = 0.05):
    """Mean/std hypervolume per (problem, cell) with ranks and rank-sum tests.

    Cells of the same problem must share p and r.  Returns a SummaryTable.
    """
    groups: dict[tuple[str, str], list[ResultBundle]] = {}
    for b in bundles:
        groups.setdefault((b.problem, _bundle_cell(b)), []).append(b)
    for (problem, cell), bs in groups.items():
        prs = {(b.p, b.r) for b in bs}
        if len(prs) != 1:
            raise ValueError(f"cell {problem}/{cell} mixes p or r settings: {prs}")
    by_problem: dict[str, list[SummaryCell]] = {}
    hv_samples: dict[tuple[str, str], np.ndarray] = {}
    for (problem, cell), bs in sorted(groups.items()):
        hvs = np.array([b.metrics["hv"] for b in bs])
        sms = [b.metrics["sm"] for b in bs if b.metrics["sm"] is not None]
        hv_samples[(problem, cell)] = hvs
        by_problem.setdefault(problem, []).append(SummaryCell(
            problem=problem, cell=cell, n_runs=len(bs),
            hv_mean=float(hvs.mean()), hv_std=float(hvs.std(ddof=1)) if len(bs) > 1 else 0.0,
            sm_mean=float(np.mean(sms)) if sms else None,
        ))
    for problem, cells in by_problem.items():
        prs = {(groups[(problem, c.cell)][0].p, groups[(problem, c.cell)][0].r)
               for c in cells}
        if len(prs) != 1:
            raise ValueError(f"problem {problem} compares cells with different p or r: {prs}")
        cells.sort(key=lambda c: -c.hv_mean)
        for rank, cell in enumerate(cells, 1):
            cell.rank = rank
        best = cells[0]
        best.best = True
        for cell in cells:
            cell.p_value = _rank_sum_p(hv_samples[(problem, cell.cell)],
                                       hv_samples[(problem, best.cell)])
    return SummaryTable([c for cells in by_problem.values() for c in cells], alpha=alpha)


def _bundle_cell(b: ResultBundle) -> str:
    if b.algorithm == "bezea":
        return f"bezea(q={b.q})"
    return b.algorithm


class SummaryTable:
    def __init__(self, cells: list[SummaryCell], alpha: float = 0.05):
        self.cells = cells
        self.alpha = alpha

    def to_csv(self) -> str:
        lines = ["problem,cell,n_runs,hv_mean,hv_std,sm_mean,rank,p_value,best"]
        for c in self.cells:
            sm = "" if c.sm_mean is None else f"{c.sm_mean:.6f}"
            lines.append(
                f"{c.problem},{c.cell},{c.n_runs},{c.hv_mean:.6f},{c.hv_std:.6f},"
                f"{sm},{c.rank},{c.p_value:.6g},{int(c.best)}"
            )
        return "\n".join(lines) + "\n"

    def to_text(self) -> str:
        lines = [f"{'problem':<12} {'cell':<14} {'HV mean ± std (rank)':<30} {'Sm':<8} p"]
        for c in self.cells:
            mark = "*" if (c.best or (c.p_value is not None and c.p_value >= self.alpha)) else " "
            sm = "--" if c.sm_mean is None else f"{c.sm_mean:.2f}"
            lines.append(
                f"{c.problem:<12} {c.cell:<14} "
                f"{c.hv_mean:9.4f} ± {c.hv_std:6.4f} ({c.rank}){mark:<3} "
                f"{sm:<8} {c.p_value:.3g}"
            )
        return "\n".join(lines) + "\n"


# --- navigator export ----------------------------------------------------------


def export_navigator_bundle(bundle: ResultBundle, dense_p: int = 200,
                            path=None) -> dict:
    """Navigator JSON for the UI; dense curve samples come from the primary.

    Non-bezea bundles export the discrete set only ("curve": null).
    """
    curve = None
    if bundle.control_points is not None:
        polygon = ControlPolygon(np.array(bundle.control_points))
        if bundle.dense_curve is not None and len(bundle.dense_curve) == dense_p:
            dense = bundle.dense_curve
        else:
            problem = get_problem(bundle.problem)
            dense = dense_curve_samples(polygon, problem, dense_p)
        curve = {"control_points": bundle.control_points, "dense": dense}
    nav = {
        "schema_version": 1,
        "meta": {
            "problem": bundle.problem,
            "algorithm": bundle.algorithm,
            "p": bundle.p,
            "q": bundle.q,
            "r": list(bundle.r),
            "seed": bundle.seed,
        },
        "points": bundle.points,
        "nav_order": bundle.nav_order,
        "curve": curve,
        "metrics": {
            "hv": bundle.metrics["hv"],
            "uhv": bundle.metrics["uhv"],
            "sm": bundle.metrics["sm"],
            "delta_hv": bundle.metrics.get("delta_hv"),
        },
        "trace": [
            {"fevals": row["fevals"], "hv": row["hv"],
             "constraint": row["constraint"], "sm": row["sm"]}
            for row in bundle.trace
        ],
    }
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(nav, indent=1))
    return nav
