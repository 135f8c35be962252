"""Walkthrough: the benchmark harness and its CSV outputs.

run_suite executes a grid of (algorithm, seed) runs on identical problem
instances and writes one per-iteration trace CSV per run plus a summary
CSV of final objectives. The same grid is reachable from the command line
via `dlnopt run` / `dlnopt stats`. This script runs a small grid across
all nine algorithm tags, prints the summary table, and shows the first
rows of one trace file.
"""

import os
import tempfile

from dlnopt import ALGORITHM_TAGS, ExperimentSpec, run_suite

out_dir = os.path.join(tempfile.mkdtemp(prefix="dlnopt_demo_"), "suite")
spec = ExperimentSpec(
    experiment="exp1",
    n_layers=3,
    reg="l2",
    algorithms=ALGORITHM_TAGS,
    seeds=(0,),
    max_iters=300,
    out_dir=out_dir,
)
traces, summary_path = run_suite(spec)

print("Ran %d algorithms for %d iterations each." % (len(ALGORITHM_TAGS), spec.max_iters))
print()
print("Summary (relative objective = final objective minus best seen anywhere):")
with open(summary_path) as fh:
    header = fh.readline().split(",")
    print("  %-12s %-5s %-22s %s" % tuple(header))
    for line in fh:
        algo, seed, final, rel = line.split(",")
        print("  %-12s %-5s %-22s %s" % (algo, seed, final, rel), end="")

print()
print("Files written to %s:" % out_dir)
for name in sorted(os.listdir(out_dir)):
    print("  %s" % name)

trace_path = os.path.join(out_dir, "cocain_seed000.csv")
print()
print("First rows of %s:" % os.path.basename(trace_path))
with open(trace_path) as fh:
    for _ in range(4):
        print("  " + fh.readline(), end="")

print()
print("Equivalent command line invocation:")
print(
    "  dlnopt run --experiment exp1 --layers 3 --reg l2 --algos all"
    " --iters 300 --seed 0 --out %s" % out_dir
)
