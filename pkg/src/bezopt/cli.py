"""Command line interface: run experiments, manage HV references, report."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .harness import (
    HvReferenceStore,
    ResultBundle,
    compute_hv_reference,
    default_store_path,
    export_navigator_bundle,
    load_config,
    run_experiment,
    summarize,
)
from .indicators import ghss


def _parse_r(text: str):
    parts = [float(v) for v in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("reference point must be r1,r2")
    return tuple(parts)


def _cmd_run(args) -> int:
    config = load_config(args.config)
    if args.output is not None:
        config.output = args.output
    if args.workers is not None:
        config.workers = args.workers
    bundles = run_experiment(config)
    for b in bundles:
        sm = "--" if b.metrics["sm"] is None else f"{b.metrics['sm']:.4f}"
        delta = b.metrics.get("delta_hv")
        delta_txt = "" if delta is None else f" delta_hv={delta:.3e}"
        print(f"seed {b.seed}: hv={b.metrics['hv']:.6f} sm={sm} "
              f"fevals={b.mo_fevals}{delta_txt}")
    return 0


def _cmd_hv_ref(args) -> int:
    store = HvReferenceStore(args.store)
    seeds = range(args.seed, args.seed + args.seeds)
    best = compute_hv_reference(args.problem, args.p, args.r, args.budget, seeds,
                                store=store, N=args.N)
    store.save()
    print(f"{args.problem} p={args.p} r={args.r}: HV* candidate {best!r} "
          f"(stored {store.get(args.problem, args.p, args.r)!r})")
    return 0


def _cmd_subset(args) -> int:
    data = json.loads(Path(args.points).read_text())
    points = np.asarray(data, dtype=float)
    idx = ghss(points, args.r, args.p)
    print(json.dumps({"selected": idx, "points": points[idx].tolist()}))
    return 0


def _cmd_summarize(args) -> int:
    paths = sorted(set(args.bundles))
    bundles = [ResultBundle.load(p) for p in paths]
    if not bundles:
        print("no bundles given", file=sys.stderr)
        return 2
    table = summarize(bundles)
    print(table.to_text())
    if args.csv:
        Path(args.csv).write_text(table.to_csv())
        print(f"wrote {args.csv}")
    return 0


def _cmd_export_nav(args) -> int:
    bundle = ResultBundle.load(args.bundle)
    out = args.output or (Path(args.bundle).with_suffix(".nav.json"))
    export_navigator_bundle(bundle, dense_p=args.dense, path=out)
    print(f"wrote {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bezopt",
        description="Bi-objective optimization of navigable approximation sets",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run every repetition of a config file")
    p_run.add_argument("config")
    p_run.add_argument("--output", help="directory for result bundles")
    p_run.add_argument("--workers", type=int, default=None)
    p_run.set_defaults(fn=_cmd_run)

    p_ref = sub.add_parser("hv-ref", help="refresh a best-known hypervolume value")
    p_ref.add_argument("problem")
    p_ref.add_argument("p", type=int)
    p_ref.add_argument("--r", type=_parse_r, default=(11.0, 11.0))
    p_ref.add_argument("--budget", type=int, default=10**6)
    p_ref.add_argument("--seeds", type=int, default=3)
    p_ref.add_argument("--seed", type=int, default=1000)
    p_ref.add_argument("--N", type=int, default=None)
    p_ref.add_argument("--store", default=default_store_path())
    p_ref.set_defaults(fn=_cmd_hv_ref)

    p_sub = sub.add_parser("subset", help="greedy hypervolume subset selection on a point list")
    p_sub.add_argument("points", help="JSON file with an array of [f1, f2] points")
    p_sub.add_argument("-p", type=int, required=True, dest="p")
    p_sub.add_argument("--r", type=_parse_r, default=(11.0, 11.0))
    p_sub.set_defaults(fn=_cmd_subset)

    p_sum = sub.add_parser("summarize", help="tabulate bundles (mean, std, ranks, rank-sum)")
    p_sum.add_argument("bundles", nargs="+")
    p_sum.add_argument("--csv", help="also write a CSV report")
    p_sum.set_defaults(fn=_cmd_summarize)

    p_nav = sub.add_parser("export-nav", help="export the navigator JSON for a bundle")
    p_nav.add_argument("bundle")
    p_nav.add_argument("-o", "--output", default=None)
    p_nav.add_argument("--dense", type=int, default=200)
    p_nav.set_defaults(fn=_cmd_export_nav)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
