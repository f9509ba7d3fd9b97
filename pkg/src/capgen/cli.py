"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 infeasible or empty result,
3 I/O error.  With a fixed seed and --threads 1 (the default and only
mode), outputs are byte-identical across runs.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .constrained import (
    EmptyFeasibleSet,
    filter_SR,
    revised_ecg_sample,
    revised_enumerate,
    revised_irng_generate,
)
from .core import write_capacities_csv, read_capacities_csv
from .evaluate import DEFAULT_BINS, bench, kl_report, write_kl_report_json
from .extensions import ecg_sample, enumerate_linear_extensions, write_extensions_jsonl
from .markov import RankProbabilityTable, estimate_rank_table, markov_generate
from .node_gen import irng_generate, rng_generate
from .preferences import (
    ConstraintSystem,
    InfeasiblePreferences,
    PreferenceSystem,
    derive_SC,
)

USAGE_ERROR = 1
INFEASIBLE_ERROR = 2
IO_ERROR = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="capgen", description="Random generation of capacities")
    sub = p.add_subparsers(dest="cmd", required=True)

    def add_common(sp, count=True, table=False):
        sp.add_argument("--n", type=int, required=True)
        if count:
            sp.add_argument("--count", type=int, required=True)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--out", required=True)
        if table:
            sp.add_argument("--table", required=True)
        sp.add_argument("--threads", type=int, default=1)

    sp = sub.add_parser("enum", help="enumerate all linear extensions (n <= 4)")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("exact", help="exact generator over the full enumeration")
    add_common(sp)

    sp = sub.add_parser("rank-table", help="estimate the rank-probability table")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--burn-in", type=int, default=None)
    sp.add_argument("--thinning", type=int, default=None)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("rng", help="classical random-node generator")
    add_common(sp)

    sp = sub.add_parser("irng", help="improved random-node generator")
    add_common(sp, table=True)

    sp = sub.add_parser("markov", help="Markov-chain generator")
    add_common(sp)

    sp = sub.add_parser("derive", help="derive the relaxed constraint system from preferences")
    sp.add_argument("--prefs", required=True)
    sp.add_argument("--out", required=True)

    sp = sub.add_parser("gen", help="generate capacities with any method, optionally constrained/filtered")
    sp.add_argument("--method", choices=["ecg", "irng", "rng", "markov"], required=True)
    add_common(sp)
    sp.add_argument("--table", default=None)
    sp.add_argument("--constraints", default=None)
    sp.add_argument("--prefs", default=None)
    sp.add_argument("--filter", action="store_true")

    sp = sub.add_parser("kl", help="KL divergence report against a reference stream")
    sp.add_argument("--ref", required=True)
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--bins", type=int, default=DEFAULT_BINS)
    sp.add_argument("--out", required=True)
    sp.add_argument("--plot", default=None, metavar="PNG",
                    help="also render per-coefficient histogram figures to this file")

    sp = sub.add_parser("bench", help="benchmark a generator")
    sp.add_argument("--method", choices=["ecg", "irng", "rng", "markov"], required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--count", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--table", default=None)

    sp = sub.add_parser("accept-rate", help="acceptance rate of a capacity stream against preferences")
    sp.add_argument("--in", dest="inp", required=True)
    sp.add_argument("--prefs", required=True)

    return p


def _generate(args) -> np.ndarray:
    method = args.method
    if method == "ecg":
        sc = _load_constraints(args)
        rng = np.random.default_rng(args.seed)
        if sc is not None:
            exts = revised_enumerate(args.n, sc.dominance_pairs())
            if len(exts) == 0:
                raise EmptyFeasibleSet("no linear extension satisfies the constraints")
            return revised_ecg_sample(exts, args.n, args.count, rng)
        exts = enumerate_linear_extensions(args.n)
        return ecg_sample(exts, args.n, args.count, rng)
    if method == "rng":
        return rng_generate(args.n, args.count, seed=args.seed)
    if method == "markov":
        return markov_generate(args.n, args.count, seed=args.seed)
    if method == "irng":
        if args.table is None:
            raise UsageError("--table is required for method irng")
        table = RankProbabilityTable.from_json(args.table)
        sc = _load_constraints(args)
        if sc is not None:
            return revised_irng_generate(args.n, args.count, table, sc, seed=args.seed)
        return irng_generate(args.n, args.count, table, seed=args.seed)
    raise UsageError(f"unknown method {method}")


def _load_constraints(args):
    path = getattr(args, "constraints", None)
    if path is None:
        return None
    return ConstraintSystem.from_json(path)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"capgen: {exc}", file=sys.stderr)
        return USAGE_ERROR

    try:
        cmd = args.cmd
        if cmd == "enum":
            exts = enumerate_linear_extensions(args.n)
            write_extensions_jsonl(args.out, exts)
        elif cmd == "exact":
            rng = np.random.default_rng(args.seed)
            exts = enumerate_linear_extensions(args.n)
            caps = ecg_sample(exts, args.n, args.count, rng)
            write_capacities_csv(args.out, args.n, caps)
        elif cmd == "rank-table":
            table = estimate_rank_table(args.n, args.samples, seed=args.seed,
                                        burn_in=args.burn_in, thinning=args.thinning)
            table.to_json(args.out)
        elif cmd in ("rng", "markov"):
            if cmd == "rng":
                caps = rng_generate(args.n, args.count, seed=args.seed)
            else:
                caps = markov_generate(args.n, args.count, seed=args.seed)
            write_capacities_csv(args.out, args.n, caps)
        elif cmd == "irng":
            table = RankProbabilityTable.from_json(args.table)
            caps = irng_generate(args.n, args.count, table, seed=args.seed)
            write_capacities_csv(args.out, args.n, caps)
        elif cmd == "derive":
            prefs = PreferenceSystem.from_json(args.prefs)
            sc = derive_SC(prefs)
            sc.to_json(args.out)
        elif cmd == "gen":
            caps = _generate(args)
            if args.filter:
                if args.prefs is None:
                    raise UsageError("--filter requires --prefs")
                prefs = PreferenceSystem.from_json(args.prefs)
                caps, rate = filter_SR(caps, prefs)
                print(f"acceptance rate: {rate:.6f}")
                if len(caps) == 0:
                    write_capacities_csv(args.out, args.n, np.empty((0, 1 << args.n)))
                    return INFEASIBLE_ERROR
            write_capacities_csv(args.out, args.n, caps)
        elif cmd == "kl":
            n_ref, ref = read_capacities_csv(args.ref)
            n_in, caps = read_capacities_csv(args.inp)
            if n_ref != n_in:
                raise UsageError("reference and input streams have different n")
            report = kl_report(caps, ref, n_in, bins=args.bins)
            write_kl_report_json(args.out, {"input": report})
            if args.plot:
                from .plotting import plot_coefficient_histograms

                plot_coefficient_histograms(args.plot, caps, n_in, reference=ref,
                                            bins=args.bins)
        elif cmd == "bench":
            def job():
                a = argparse.Namespace(method=args.method, n=args.n, count=args.count,
                                       seed=args.seed, table=args.table, constraints=None)
                _generate(a)

            stats = bench(job)
            stats["per_capacity_seconds"] = stats["median_seconds"] / args.count
            print(json.dumps(stats))
        elif cmd == "accept-rate":
            n, caps = read_capacities_csv(args.inp)
            prefs = PreferenceSystem.from_json(args.prefs)
            _, rate = filter_SR(caps, prefs)
            print(f"{rate:.6f}")
        else:
            raise UsageError(f"unknown command {cmd}")
    except UsageError as exc:
        print(f"capgen: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ValueError as exc:
        print(f"capgen: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except (InfeasiblePreferences, EmptyFeasibleSet) as exc:
        print(f"capgen: {exc}", file=sys.stderr)
        return INFEASIBLE_ERROR
    except OSError as exc:
        print(f"capgen: {exc}", file=sys.stderr)
        return IO_ERROR
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
