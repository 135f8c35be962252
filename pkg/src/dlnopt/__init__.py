"""Bregman proximal training of deep linear networks.

Closed-form Bregman proximal gradient updates under problem-adapted
polynomial kernels, an inertial variant with backtracked or closed-form
extrapolation, Euclidean baselines (PALM, iPALM, forward-backward,
heavy-ball forward-backward) and a reproducible benchmark harness.
"""

from .model import (
    WeightStack,
    Dataset,
    Regularizer,
    loss,
    loss_gradient,
    loss_value_and_gradient,
    regularizer_value,
    composite_objective,
)
from .kernels import (
    BregmanKernel,
    build_kernel,
    kernel_value,
    kernel_gradient,
    kernel_gradient_scale,
    bregman_distance,
    check_lsmad,
)
from .prox import soft_threshold, radius_equation_residual, solve_radius, bpg_update
from .optimizers import (
    OptimizerConfig,
    RunTrace,
    TraceRow,
    EvalCounts,
    run_bpg,
    run_bpg_wb,
    run_cocain,
    run_cocain_cfi,
    closed_form_gamma,
    closed_form_gamma_n2,
    run_palm,
    run_ipalm,
    run_fbs_wb,
    run_ipiano_wb,
    TRACE_HEADER,
    write_trace_csv,
    read_trace_csv,
)
from .experiments import (
    ALGORITHM_TAGS,
    ExperimentSpec,
    generate_experiment1,
    generate_experiment2,
    load_dataset_csv,
    run_suite,
)

__version__ = "0.1.0"
