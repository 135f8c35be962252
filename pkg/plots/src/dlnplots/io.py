"""Readers for the benchmark harness CSV schema.

This package talks to the optimizer suite only through its files: the
per-iteration trace CSVs and the final-objective summary CSV. The
expected headers are pinned verbatim; any deviation is a parse error
naming the file and line.
"""

import os
import re

__all__ = [
    "TRACE_HEADER",
    "SUMMARY_HEADER",
    "ParseError",
    "read_trace",
    "read_summary",
    "label_for",
]

TRACE_HEADER = "iter,objective,rel_objective,elapsed_s,gamma,L_bar,L_under,backtracks"
SUMMARY_HEADER = "algorithm,seed,final_objective,rel_final_objective"


class ParseError(ValueError):
    """Malformed input CSV; message carries the file and 1-based line."""


def _float_field(text, path, lineno, name):
    try:
        return float(text)
    except ValueError:
        raise ParseError(
            "%s line %d: field %s is not a number: %r" % (path, lineno, name, text)
        ) from None


def read_trace(path):
    """Parse one trace CSV into column arrays.

    Returns a dict with keys iter, objective, rel_objective, elapsed_s
    (lists of floats; the iteration column as ints). Requires the exact
    trace header and at least one data row.
    """
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != TRACE_HEADER:
            raise ParseError(
                "%s line 1: expected trace header %r, got %r" % (path, TRACE_HEADER, header)
            )
        names = header.split(",")
        cols = {"iter": [], "objective": [], "rel_objective": [], "elapsed_s": []}
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(names):
                raise ParseError(
                    "%s line %d: expected %d fields, got %d"
                    % (path, lineno, len(names), len(parts))
                )
            row = dict(zip(names, parts))
            try:
                cols["iter"].append(int(row["iter"]))
            except ValueError:
                raise ParseError(
                    "%s line %d: field iter is not an integer: %r"
                    % (path, lineno, row["iter"])
                ) from None
            for name in ("objective", "rel_objective", "elapsed_s"):
                cols[name].append(_float_field(row[name], path, lineno, name))
    if not cols["iter"]:
        raise ParseError("%s: no data rows" % path)
    return cols


def read_summary(path):
    """Parse the summary CSV into (algorithm, seed, final, rel) tuples."""
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != SUMMARY_HEADER:
            raise ParseError(
                "%s line 1: expected summary header %r, got %r"
                % (path, SUMMARY_HEADER, header)
            )
        rows = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != 4:
                raise ParseError(
                    "%s line %d: expected 4 fields, got %d" % (path, lineno, len(parts))
                )
            algo, seed_text, final_text, rel_text = parts
            try:
                seed = int(seed_text)
            except ValueError:
                raise ParseError(
                    "%s line %d: field seed is not an integer: %r"
                    % (path, lineno, seed_text)
                ) from None
            rows.append(
                (
                    algo,
                    seed,
                    _float_field(final_text, path, lineno, "final_objective"),
                    _float_field(rel_text, path, lineno, "rel_final_objective"),
                )
            )
    if not rows:
        raise ParseError("%s: no data rows" % path)
    return rows


def label_for(path):
    """Curve label from a trace filename: drop the seed suffix, restore dots.

    The harness escapes dots in algorithm tags when building filenames
    (ipalm-0.2 -> ipalm-0_2_seed000.csv), so the inverse puts a dot back
    between digits.
    """
    stem = os.path.splitext(os.path.basename(path))[0]
    stem = re.sub(r"_seed\d+$", "", stem)
    return re.sub(r"(?<=\d)_(?=\d)", ".", stem)
