"""Figure builders for the three benchmark views.

convergence  relative objective vs iteration, log y, zeros clipped
time         relative objective plus a 1e-2 offset vs wall-clock, log y
histogram    per-algorithm histograms of final objectives over seeds

Each builder saves the figure and returns it so callers (and tests) can
inspect curve and legend counts. Output is deterministic for fixed
inputs: fixed style, fixed layout, no timestamps in the image file.
"""

import dataclasses
import math

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .io import label_for, read_summary, read_trace

__all__ = [
    "CONVERGENCE_CLIP",
    "TIME_OFFSET",
    "PlotSpec",
    "plot_convergence",
    "plot_time",
    "plot_histogram",
    "render",
]

CONVERGENCE_CLIP = 1e-16
TIME_OFFSET = 1e-2

_MODES = ("convergence", "time", "histogram")


@dataclasses.dataclass
class PlotSpec:
    """One figure request: mode, inputs, output path, axes, offset."""

    mode: str
    inputs: tuple
    out: str
    xlabel: str | None = None
    ylabel: str | None = None
    logx: bool = False
    logy: bool = True
    offset: float | None = None

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValueError("mode must be one of %s" % (_MODES,))
        if not self.inputs:
            raise ValueError("need at least one input CSV")


def _finish(fig, ax, spec_xlabel, spec_ylabel, xlabel, ylabel, logx, logy, out):
    ax.set_xlabel(spec_xlabel if spec_xlabel is not None else xlabel)
    ax.set_ylabel(spec_ylabel if spec_ylabel is not None else ylabel)
    if logx:
        ax.set_xscale("log")
    if logy:
        ax.set_yscale("log")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    return fig


def plot_convergence(
    traces, out, offset=None, xlabel=None, ylabel=None, logx=False, logy=True
):
    """One curve per trace: relative objective vs iteration, log y axis.

    Relative objectives of exactly zero (a run that attained the best
    value seen in its suite) are clipped up to the offset (default
    1e-16) so the log axis stays finite.
    """
    clip = CONVERGENCE_CLIP if offset is None else offset
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for label, cols in traces:
        y = np.maximum(np.asarray(cols["rel_objective"], dtype=float), clip)
        ax.plot(cols["iter"], y, label=label, linewidth=1.2)
    return _finish(
        fig, ax, xlabel, ylabel, "iteration", "objective minus suite best", logx, logy, out
    )


def plot_time(traces, out, offset=None, xlabel=None, ylabel=None, logx=False, logy=True):
    """One curve per trace: offset relative objective vs elapsed seconds.

    The additive offset (default 1e-2) keeps runs that hit the suite
    best visible on the log axis.
    """
    shift = TIME_OFFSET if offset is None else offset
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    for label, cols in traces:
        y = np.asarray(cols["rel_objective"], dtype=float) + shift
        ax.plot(cols["elapsed_s"], y, label=label, linewidth=1.2)
    return _finish(
        fig,
        ax,
        xlabel,
        ylabel,
        "elapsed seconds",
        "objective minus suite best + %g" % shift,
        logx,
        logy,
        out,
    )


def plot_histogram(summary_rows, out, xlabel=None, ylabel=None, bins=10):
    """One panel per algorithm: histogram of final objectives across seeds."""
    by_algo = {}
    for algo, _seed, final, _rel in summary_rows:
        by_algo.setdefault(algo, []).append(final)
    n = len(by_algo)
    ncols = min(3, n)
    nrows = math.ceil(n / ncols)
    fig, axes = plt.subplots(
        nrows, ncols, figsize=(4.0 * ncols, 3.0 * nrows), squeeze=False
    )
    flat = [ax for row in axes for ax in row]
    for ax, (algo, finals) in zip(flat, by_algo.items()):
        ax.hist(finals, bins=bins)
        ax.set_title(algo)
        ax.set_xlabel(xlabel if xlabel is not None else "final objective")
        ax.set_ylabel(ylabel if ylabel is not None else "runs")
    for ax in flat[n:]:
        ax.set_axis_off()
    fig.tight_layout()
    fig.savefig(out, dpi=120)
    return fig


def render(spec):
    """Read the spec's inputs and build its figure; returns the Figure."""
    if spec.mode == "histogram":
        rows = []
        for path in spec.inputs:
            rows.extend(read_summary(path))
        return plot_histogram(rows, spec.out, xlabel=spec.xlabel, ylabel=spec.ylabel)
    traces = [(label_for(path), read_trace(path)) for path in spec.inputs]
    builder = plot_convergence if spec.mode == "convergence" else plot_time
    return builder(
        traces,
        spec.out,
        offset=spec.offset,
        xlabel=spec.xlabel,
        ylabel=spec.ylabel,
        logx=spec.logx,
        logy=spec.logy,
    )
