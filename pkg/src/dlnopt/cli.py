"""Command line front end for the benchmark harness.

Subcommands:
  run     execute a suite and write trace/summary CSVs
  stats   multi-seed summary protocol (uniform init, 40 seeds by default)

Exit codes: 0 success, 1 configuration error, 2 numeric failure.
"""

import argparse
import json
import sys

from .experiments import ALGORITHM_TAGS, ExperimentSpec, run_suite

__all__ = ["main", "entry"]


class _Parser(argparse.ArgumentParser):
    # argparse exits with code 2 on bad flags; this harness reserves 2
    # for numeric failures, so remap usage errors to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(1)


def _add_common_flags(sub):
    sub.add_argument("--experiment", choices=("exp1", "exp2", "custom"))
    sub.add_argument("--layers", type=int, help="network depth N")
    sub.add_argument("--reg", choices=("none", "l2", "l1"))
    sub.add_argument("--lambda0", type=float, help="squared-L2 weight")
    sub.add_argument("--mu", help="L1 weights, scalar or comma list per layer")
    sub.add_argument("--algos", help="comma list of algorithm tags, or 'all'")
    sub.add_argument("--iters", type=int, help="iterations per run")
    sub.add_argument("--seed", type=int, help="single seed")
    sub.add_argument("--seeds", help="seed count K (0..K-1) or range a:b")
    sub.add_argument("--out", help="output directory")
    sub.add_argument("--config", help="JSON file with ExperimentSpec fields")


def _build_parser():
    parser = _Parser(prog="dlnopt", description=__doc__.splitlines()[0])
    parser.add_argument(
        "--list-algos", action="store_true", help="print supported algorithm tags and exit"
    )
    subs = parser.add_subparsers(dest="command")
    run_p = subs.add_parser("run", help="run a benchmark suite")
    _add_common_flags(run_p)
    stats_p = subs.add_parser("stats", help="multi-seed statistics protocol")
    _add_common_flags(stats_p)
    stats_p.add_argument(
        "--traces", action="store_true", help="also write per-iteration trace CSVs"
    )
    return parser


def _parse_seeds(text):
    if ":" in text:
        a, b = text.split(":", 1)
        lo, hi = int(a), int(b)
        if hi <= lo:
            raise ValueError("empty seed range %r" % text)
        return tuple(range(lo, hi))
    count = int(text)
    if count < 1:
        raise ValueError("seed count must be positive")
    return tuple(range(count))


def _spec_from_args(args, stats_mode):
    fields = {}
    if args.config:
        with open(args.config) as fh:
            fields.update(json.load(fh))
    if stats_mode:
        # statistics protocol defaults; explicit flags still win
        fields.setdefault("init", "uniform")
        fields.setdefault("seeds", tuple(range(40)))
        fields.setdefault("max_iters", 10000)
        fields.setdefault("write_traces", bool(args.traces))

    if args.experiment:
        fields["experiment"] = args.experiment
    if args.layers is not None:
        fields["n_layers"] = args.layers
    if args.reg:
        fields["reg"] = args.reg
    if args.lambda0 is not None:
        fields["lambda0"] = args.lambda0
    if args.mu is not None:
        fields["mu"] = tuple(float(v) for v in str(args.mu).split(","))
    if args.algos:
        fields["algorithms"] = (
            ALGORITHM_TAGS if args.algos == "all" else tuple(args.algos.split(","))
        )
    if args.iters is not None:
        fields["max_iters"] = args.iters
    if args.seeds:
        fields["seeds"] = _parse_seeds(args.seeds)
    elif args.seed is not None:
        fields["seeds"] = (args.seed,)
    if args.out:
        fields["out_dir"] = args.out
    return ExperimentSpec.from_json_dict(fields)


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.list_algos:
        for tag in ALGORITHM_TAGS:
            print(tag)
        return 0
    if not args.command:
        parser.print_usage(sys.stderr)
        sys.stderr.write("dlnopt: error: a subcommand is required\n")
        return 1

    try:
        spec = _spec_from_args(args, stats_mode=args.command == "stats")
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write("dlnopt: configuration error: %s\n" % exc)
        return 1

    try:
        traces, summary_path = run_suite(spec)
    except (ValueError, OSError) as exc:
        sys.stderr.write("dlnopt: configuration error: %s\n" % exc)
        return 1

    aborted = [key for key, t in traces.items() if t.aborted]
    for tag, seed in aborted:
        trace = traces[(tag, seed)]
        sys.stderr.write(
            "dlnopt: numeric failure in %s seed %d: %s\n" % (tag, seed, trace.abort_reason)
        )
    print("wrote %s" % summary_path)
    if aborted:
        return 2
    return 0


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
