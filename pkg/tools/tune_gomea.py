"""Exploratory driver for optimizer-parameter variants on the bi-sphere protocol.

Dev tooling only; not part of the library surface.
"""
import numpy as np

from bezopt.benchmarks import bisphere
from bezopt.uhvea import UhvFitness
from bezopt.core import EvaluationCounter, nondominated_mask, SolutionSet
import bezopt.gomea as g
from bezopt.indicators import hv2d, smoothness, left_to_right_order

HV_STAR = 120.79335157401921


def run_variant(seed, eta_cov, eta_shift, sdr_thresh, N=31, budget=2 * 10**5,
                shift_thresh=None):
    prob = bisphere(10)
    counter = EvaluationCounter(budget)
    fit = UhvFitness(prob, 10, (11, 11), counter)
    fos_r = g.build_fos([np.arange(i * 10, (i + 1) * 10) for i in range(10)], fit.l)
    rng = np.random.default_rng(seed)
    G = rng.uniform(fit.lower_init, fit.upper_init, size=(N, fit.l))
    pop = [g.Individual((ev := fit.evaluate(G[i].copy())).genotype, ev) for i in range(N)]
    elitist = g._Elitist(min(pop, key=lambda ind: g._ev_key(ind.ev)))
    nfos = len(fos_r)
    mults = [1.0] * nfos
    cov_mem = [None] * nfos
    shift_mem = [None] * nfos
    element_nis = [0] * nfos
    element_nis_max = 25 + fit.l
    prev_means = None
    nis_threshold = 1 + int(np.floor(np.log10(N)))
    ams_count = int(np.ceil(0.5 * 0.35 * N))
    try:
        while True:
            sel = g.truncation_selection(pop, 0.35)
            selG = np.stack([ind.genotype for ind in sel])
            dists = [g.estimate_distribution(selG, e, mults[ei], prev_cov=cov_mem[ei],
                                             eta_cov=eta_cov)
                     for ei, e in enumerate(fos_r)]
            for ei, d in enumerate(dists):
                cov_mem[ei] = d.cov
            if prev_means is None:
                shifts = [np.zeros(e.size) for e in fos_r]
            else:
                raw = [d.mean - pm for d, pm in zip(dists, prev_means)]
                if eta_shift >= 1.0:
                    shifts = raw
                else:
                    shifts = []
                    for ei in range(nfos):
                        if shift_mem[ei] is None:
                            shift_mem[ei] = raw[ei]
                        else:
                            shift_mem[ei] = (1 - eta_shift) * shift_mem[ei] + eta_shift * raw[ei]
                        shifts.append(shift_mem[ei])
            best_index = min(range(len(pop)), key=lambda i: (g._ev_key(pop[i].ev), i))
            ams_indices = set(sorted(i for i in range(len(pop)) if i != best_index)[:ams_count])
            stats = g._GenStats(nfos)
            for i, ind in enumerate(pop):
                if ind.nis > nis_threshold:
                    g._forced_improvement(ind, fos_r, fit, rng, elitist, stats)
                else:
                    improved = g.gom_step(
                        ind, fos_r, dists, fit, rng,
                        ams_shifts=shifts if i in ams_indices else None,
                        elitist=elitist, stats=stats)
                    ind.nis = 0 if improved else ind.nis + 1
            for ei in range(nfos):
                if stats.improved_via[ei]:
                    element_nis[ei] = 0
                    zm = stats.imp_sum[ei] / stats.imp_count[ei]
                    fire = float(np.max(np.abs(zm))) > sdr_thresh
                    if not fire and shift_thresh is not None:
                        import scipy.linalg as sla
                        _, mlcov = g.ml_estimate(selG, fos_r[ei])
                        L = g._factor_covariance(mlcov)
                        try:
                            s = sla.solve_triangular(L, shifts[ei], lower=True)
                            fire = float(np.max(np.abs(s))) > shift_thresh
                        except Exception:
                            fire = True
                    if fire:
                        mults[ei] *= 1 / 0.9
                    if mults[ei] < 1:
                        mults[ei] = 1.0
                else:
                    element_nis[ei] += 1
                    mults[ei] *= 0.9
                    if element_nis[ei] <= element_nis_max and mults[ei] < 1:
                        mults[ei] = 1.0
                mults[ei] = min(max(mults[ei], 1e-10), 1e3)
            prev_means = [d.mean for d in dists]
    except g.BudgetExhausted:
        pass
    F = elitist.ev.cache.F
    X = fit.decode(elitist.genotype)
    mask = nondominated_mask(F)
    idx = np.flatnonzero(mask)
    nd = SolutionSet(X[idx], F[idx])
    ltr = left_to_right_order(nd)
    sm = smoothness(nd, ltr) if len(ltr) >= 3 else None
    return HV_STAR - hv2d(F[idx], (11, 11)), sm, int(mask.sum())


if __name__ == "__main__":
    import sys
    variants = {
        "A": dict(eta_shift=0.3, sdr_thresh=2.1, shift_thresh=None),
        "B": dict(eta_shift=0.3, sdr_thresh=2.1, shift_thresh=0.55),
        "D": dict(eta_shift=1.0, sdr_thresh=2.1, shift_thresh=None),
    }
    names = sys.argv[1:] or list(variants)
    for name in names:
        kw = variants[name]
        for seed in (1, 2, 3, 4):
            d, sm, na = run_variant(seed, 0.2, **kw)
            print(f"variant {name} seed={seed}: delta={d:.3e} sm={sm} |A|={na}", flush=True)
