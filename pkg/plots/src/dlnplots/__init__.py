"""Figure rendering for the deep-linear-network benchmark CSVs.

Consumes the harness's trace and summary CSV files (never its Python
API) and renders three figure styles: log-scale convergence curves,
offset time curves, and per-algorithm final-objective histograms.
"""

from .io import (
    TRACE_HEADER,
    SUMMARY_HEADER,
    ParseError,
    read_trace,
    read_summary,
    label_for,
)
from .figures import (
    CONVERGENCE_CLIP,
    TIME_OFFSET,
    PlotSpec,
    plot_convergence,
    plot_time,
    plot_histogram,
    render,
)

__version__ = "0.1.0"
