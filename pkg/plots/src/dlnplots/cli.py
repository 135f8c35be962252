"""Command line front end: plots <mode> --in <glob> --out <path>.

Modes: convergence, time, histogram. Inputs are harness CSVs (traces
for the curve modes, the summary for the histogram). Exit codes:
0 success, 1 bad usage / missing inputs / parse error.
"""

import argparse
import glob
import sys

import matplotlib.pyplot as plt

from .figures import PlotSpec, render
from .io import ParseError

__all__ = ["main", "entry"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write("%s: error: %s\n" % (self.prog, message))
        raise SystemExit(1)


def _build_parser():
    parser = _Parser(prog="plots", description=__doc__.splitlines()[0])
    parser.add_argument("mode", choices=("convergence", "time", "histogram"))
    parser.add_argument(
        "--in",
        dest="patterns",
        action="append",
        required=True,
        help="input CSV glob (repeatable)",
    )
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--xlabel", help="x axis label override")
    parser.add_argument("--ylabel", help="y axis label override")
    parser.add_argument(
        "--offset",
        type=float,
        help="curve-mode offset override (clip floor for convergence, shift for time)",
    )
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    paths = sorted({p for pattern in args.patterns for p in glob.glob(pattern)})
    if not paths:
        sys.stderr.write("plots: no input files match %s\n" % args.patterns)
        return 1
    try:
        spec = PlotSpec(
            mode=args.mode,
            inputs=tuple(paths),
            out=args.out,
            xlabel=args.xlabel,
            ylabel=args.ylabel,
            offset=args.offset,
        )
        fig = render(spec)
    except (ParseError, ValueError, OSError) as exc:
        sys.stderr.write("plots: %s\n" % exc)
        return 1
    plt.close(fig)
    print("wrote %s" % args.out)
    return 0


def entry():
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
