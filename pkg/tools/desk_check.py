"""Single-seed desk-scale WFG checks plus bi-sphere config confirmation."""
import time

import numpy as np

from bezopt.benchmarks import get_problem, bisphere
from bezopt.bezea import run_bezea
from bezopt.uhvea import run_uhvea
from bezopt.indicators import hv2d

HVSTAR_BISPHERE = 120.79335157401923


def main():
    prob = bisphere(10)
    for q in (2, 3):
        outs = []
        for seed in (1, 2):
            res = run_bezea(prob, p=10, q=q, r=(11, 11), budget=2 * 10**5, seed=seed, N=31)
            tr = res.trace[-1]
            outs.append((HVSTAR_BISPHERE - tr.hv, tr.constraint))
        print(f"bisphere q={q} N=31: "
              + " | ".join(f"d={d:.3e} c={c:.0e}" for d, c in outs), flush=True)

    for pid, algo, q in [("wfg3", "bezea", 2), ("wfg7", "bezea", 2), ("wfg3", "uhvea", None),
                         ("wfg3", "bezea", 3), ("wfg7", "bezea", 3)]:
        p = get_problem(pid)
        t0 = time.time()
        if algo == "bezea":
            res = run_bezea(p, p=9, q=q, r=(11, 11), budget=10**6, seed=1, N=200)
            tr = res.trace[-1]
            print(f"{pid} bezea q={q}: hv={tr.hv:.4f} con={tr.constraint:.1e} "
                  f"sm={tr.sm} [{time.time()-t0:.0f}s]", flush=True)
        else:
            res = run_uhvea(p, p=9, r=(11, 11), variant="gb", budget=10**6, seed=1, N=200)
            tr = res.trace[-1]
            print(f"{pid} uhvea-gb: hv={tr.hv:.4f} sm={tr.sm} [{time.time()-t0:.0f}s]",
                  flush=True)


if __name__ == "__main__":
    main()
