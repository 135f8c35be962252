"""Benchmark harness: canned experiment instances and multi-run suites.

Experiment 1 trains square 5x5 stacks on uniform random data; the
deterministic variant initializes every weight entry at 0.1, the
statistical variant draws initial weights uniformly from [0, 0.1].
Experiment 2 regresses low-rank targets Y = A X + 1e-4 * noise through
a non-square chain from 2 rows to 7 columns.

run_suite executes a grid of (algorithm, seed) runs on identical
instances, writes one trace CSV per run plus a summary CSV, and reports
relative objectives against the least objective any method attained.
"""

import dataclasses
import json
import math
import os

import numpy as np

from .model import WeightStack, Dataset, Regularizer
from .kernels import build_kernel
from . import optimizers as opt
from .optimizers import OptimizerConfig, write_trace_csv

__all__ = [
    "ALGORITHM_TAGS",
    "ExperimentSpec",
    "generate_experiment1",
    "generate_experiment2",
    "load_dataset_csv",
    "run_suite",
    "SUMMARY_HEADER",
]

ALGORITHM_TAGS = (
    "bpg",
    "bpg-wb",
    "cocain",
    "cocain-cfi",
    "palm",
    "ipalm-0.2",
    "ipalm-0.4",
    "fbs-wb",
    "ipiano-wb",
)

SUMMARY_HEADER = "algorithm,seed,final_objective,rel_final_objective"

_DEFAULT_IPIANO_BETA = 0.7


@dataclasses.dataclass
class ExperimentSpec:
    """Resolved description of one benchmark suite."""

    experiment: str = "exp1"
    n_layers: int = 3
    layer_size: int = 5
    n_samples: int = 50
    init: str = "constant"
    reg: str = "none"
    lambda0: float = 0.1
    mu: tuple = (0.1,)
    rho: float = 1.0
    step_size: float = 0.99
    algorithms: tuple = ALGORITHM_TAGS
    max_iters: int = 1000
    seeds: tuple = (0,)
    out_dir: str = "out"
    write_traces: bool = True
    x_csv: str | None = None
    y_csv: str | None = None
    layer_dims: tuple | None = None

    def __post_init__(self):
        if self.experiment not in ("exp1", "exp2", "custom"):
            raise ValueError("unknown experiment %r" % (self.experiment,))
        if self.n_layers < 2:
            raise ValueError("n_layers must be at least 2")
        if self.init not in ("constant", "uniform"):
            raise ValueError("init must be 'constant' or 'uniform'")
        if self.reg not in ("none", "l2", "l1"):
            raise ValueError("unknown regularizer %r" % (self.reg,))
        if not self.seeds:
            raise ValueError("need at least one seed")
        unknown = [a for a in self.algorithms if a not in ALGORITHM_TAGS]
        if unknown:
            raise ValueError("unknown algorithm tags %s" % (unknown,))
        if self.experiment == "custom" and not (self.x_csv and self.y_csv):
            raise ValueError("custom experiment needs x_csv and y_csv")

    def regularizer(self):
        if self.reg == "none":
            return Regularizer.none()
        if self.reg == "l2":
            return Regularizer.l2(self.lambda0)
        mu = self.mu if len(self.mu) in (1, self.n_layers) else None
        if mu is None:
            raise ValueError(
                "mu needs 1 or %d entries, got %d" % (self.n_layers, len(self.mu))
            )
        return Regularizer.l1(mu)

    def to_json_dict(self):
        d = dataclasses.asdict(self)
        d["mu"] = list(self.mu)
        d["algorithms"] = list(self.algorithms)
        d["seeds"] = list(self.seeds)
        d["layer_dims"] = list(self.layer_dims) if self.layer_dims else None
        return d

    @classmethod
    def from_json_dict(cls, d):
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError("unknown config keys %s" % (sorted(unknown),))
        d = dict(d)
        for key in ("mu", "algorithms", "seeds", "layer_dims"):
            if key in d and d[key] is not None:
                d[key] = tuple(d[key])
        return cls(**d)


def generate_experiment1(seed, n_layers=3, layer_size=5, n_samples=50, init="constant"):
    """Square-stack instance: X, Y uniform [0,1], weights 0.1 or uniform [0,0.1].

    Draw order is X, then Y, then (for init="uniform") the weights layer
    by layer, all from one seeded generator, so instances are
    reproducible bit for bit.
    """
    rng = np.random.default_rng(seed)
    d = layer_size
    X = rng.uniform(0.0, 1.0, (d, n_samples))
    Y = rng.uniform(0.0, 1.0, (d, n_samples))
    if init == "constant":
        layers = [np.full((d, d), 0.1) for _ in range(n_layers)]
    elif init == "uniform":
        layers = [rng.uniform(0.0, 0.1, (d, d)) for _ in range(n_layers)]
    else:
        raise ValueError("init must be 'constant' or 'uniform'")
    return WeightStack(layers), Dataset(X, Y)


def _exp2_dims(n_layers):
    # d_1 = 2 and d_{N+1} = 7 are fixed; three layers use the 2,3,5,7
    # chain (first factor 2x3), other depths interpolate
    if n_layers == 3:
        return (2, 3, 5, 7)
    dims = np.rint(np.linspace(2.0, 7.0, n_layers + 1)).astype(int)
    dims[0], dims[-1] = 2, 7
    return tuple(int(v) for v in dims)


def generate_experiment2(seed, n_layers=3, n_samples=50):
    """Non-square instance: Y = A X + 1e-4 noise with A in [0, 0.1]^(2x7).

    Draw order: X (7 x n), A, standard-normal noise, then the weights
    layer by layer from uniform [0, 0.1].
    """
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 1.0, (7, n_samples))
    A = rng.uniform(0.0, 0.1, (2, 7))
    noise = rng.standard_normal((2, n_samples))
    Y = A @ X + 1e-4 * noise
    dims = _exp2_dims(n_layers)
    layers = [rng.uniform(0.0, 0.1, (dims[i], dims[i + 1])) for i in range(n_layers)]
    return WeightStack(layers), Dataset(X, Y)


def load_dataset_csv(x_path, y_path):
    """Import hook for external data: two comma-separated matrices."""
    X = np.loadtxt(x_path, delimiter=",", ndmin=2)
    Y = np.loadtxt(y_path, delimiter=",", ndmin=2)
    return Dataset(X, Y)


def _generate_custom(spec, seed, data):
    dims = spec.layer_dims
    if dims is None:
        raise ValueError("custom experiment needs layer_dims")
    if len(dims) != spec.n_layers + 1:
        raise ValueError(
            "layer_dims needs %d entries, got %d" % (spec.n_layers + 1, len(dims))
        )
    if dims[0] != data.Y.shape[0] or dims[-1] != data.X.shape[0]:
        raise ValueError("layer_dims endpoints must match Y rows and X rows")
    rng = np.random.default_rng(seed)
    if spec.init == "constant":
        layers = [np.full((dims[i], dims[i + 1]), 0.1) for i in range(spec.n_layers)]
    else:
        layers = [
            rng.uniform(0.0, 0.1, (dims[i], dims[i + 1])) for i in range(spec.n_layers)
        ]
    return WeightStack(layers)


def make_instance(spec, seed):
    """Initial weights and dataset for one seed of the spec."""
    if spec.experiment == "exp1":
        return generate_experiment1(
            seed, spec.n_layers, spec.layer_size, spec.n_samples, spec.init
        )
    if spec.experiment == "exp2":
        return generate_experiment2(seed, spec.n_layers, spec.n_samples)
    data = load_dataset_csv(spec.x_csv, spec.y_csv)
    return _generate_custom(spec, seed, data), data


def _config_for(tag, spec, record_states=False):
    beta = 0.0
    if tag == "ipalm-0.2":
        beta = 0.2
    elif tag == "ipalm-0.4":
        beta = 0.4
    elif tag == "ipiano-wb":
        beta = _DEFAULT_IPIANO_BETA
    return OptimizerConfig(
        step_size=spec.step_size,
        max_iters=spec.max_iters,
        beta=beta,
        record_states=record_states,
    )


def run_algorithm(tag, w0, data, kernel, reg, cfg):
    """Dispatch one tag; Euclidean methods ignore the kernel."""
    if tag == "bpg":
        return opt.run_bpg(w0, data, kernel, reg, cfg)
    if tag == "bpg-wb":
        return opt.run_bpg_wb(w0, data, kernel, reg, cfg)
    if tag == "cocain":
        return opt.run_cocain(w0, data, kernel, reg, cfg)
    if tag == "cocain-cfi":
        return opt.run_cocain_cfi(w0, data, kernel, reg, cfg)
    if tag == "palm":
        return opt.run_palm(w0, data, reg, cfg)
    if tag in ("ipalm-0.2", "ipalm-0.4"):
        trace = opt.run_ipalm(w0, data, reg, cfg)
        trace.algorithm = tag
        return trace
    if tag == "fbs-wb":
        return opt.run_fbs_wb(w0, data, reg, cfg)
    if tag == "ipiano-wb":
        return opt.run_ipiano_wb(w0, data, reg, cfg)
    raise ValueError("unknown algorithm tag %r" % (tag,))


def _trace_filename(tag, seed):
    return "%s_seed%03d.csv" % (tag.replace(".", "_"), seed)


def run_suite(spec):
    """Run every (algorithm, seed) pair of the spec and write the outputs.

    Returns (traces, summary_path) where traces maps (tag, seed) to the
    RunTrace. Outputs under spec.out_dir: one trace CSV per run (unless
    write_traces is off), summary.csv with final objectives, and
    config.json echoing the resolved spec. Relative objectives subtract
    the smallest objective value observed anywhere in the suite.
    """
    reg = spec.regularizer()
    os.makedirs(spec.out_dir, exist_ok=True)
    traces = {}
    for seed in spec.seeds:
        w0, data = make_instance(spec, seed)
        kernel = build_kernel(spec.n_layers, data, spec.rho)
        for tag in spec.algorithms:
            cfg = _config_for(tag, spec)
            traces[(tag, seed)] = run_algorithm(tag, w0, data, kernel, reg, cfg)

    finite_mins = [
        float(np.min(t.objectives()))
        for t in traces.values()
        if t.rows and np.isfinite(t.objectives()).all()
    ]
    floor = min(finite_mins) if finite_mins else 0.0

    if spec.write_traces:
        for (tag, seed), trace in traces.items():
            write_trace_csv(trace, os.path.join(spec.out_dir, _trace_filename(tag, seed)), floor)

    summary_path = os.path.join(spec.out_dir, "summary.csv")
    with open(summary_path, "w") as fh:
        fh.write(SUMMARY_HEADER + "\n")
        for tag in spec.algorithms:
            for seed in spec.seeds:
                trace = traces[(tag, seed)]
                final = trace.final_objective()
                rel = final - floor if math.isfinite(final) else math.nan
                fh.write(
                    "%s,%d,%s,%s\n"
                    % (tag, seed, format(final, ".17g"), format(rel, ".17g"))
                )

    with open(os.path.join(spec.out_dir, "config.json"), "w") as fh:
        json.dump(spec.to_json_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")

    return traces, summary_path
