"""Training loops: Bregman methods with closed-form updates and Euclidean baselines.

All runners share the signature pattern run_*(w0, data, [kernel,] reg, cfg)
and return a RunTrace holding one row per completed iteration plus
bookkeeping the tests audit (inequality slacks, evaluation counters,
optional per-iteration states).

Implemented methods
-------------------
run_bpg          fixed-step Bregman proximal gradient
run_bpg_wb       Bregman proximal gradient with backtracked upper estimate
run_cocain       inertial Bregman method with double backtracking
run_cocain_cfi   same, inertia from a closed-form bound instead of backtracking
run_palm         alternating block proximal steps with exact block Lipschitz constants
run_ipalm        PALM plus per-block extrapolation
run_fbs_wb       Euclidean forward-backward splitting with backtracking
run_ipiano_wb    forward-backward plus heavy-ball inertia
"""

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .model import WeightStack, loss, loss_gradient, loss_value_and_gradient
from .kernels import build_kernel, bregman_distance
from .prox import bpg_update, soft_threshold

__all__ = [
    "OptimizerConfig",
    "TraceRow",
    "RunTrace",
    "EvalCounts",
    "run_bpg",
    "run_bpg_wb",
    "run_cocain",
    "run_cocain_cfi",
    "closed_form_gamma",
    "closed_form_gamma_n2",
    "run_palm",
    "run_ipalm",
    "run_fbs_wb",
    "run_ipiano_wb",
    "TRACE_HEADER",
    "write_trace_csv",
    "read_trace_csv",
]

_MAX_BACKTRACKS = 200


@dataclass
class OptimizerConfig:
    """Shared knob set; each runner reads the fields it needs.

    step_size is the BPG step (lam < 1 under relative smoothness 1).
    delta/epsilon gate the inertia condition, 1 > delta > epsilon > 0.
    l_bar0 seeds the upper smoothness estimate, nu is the backtracking
    growth factor, beta the PALM/heavy-ball extrapolation weight, and
    tolerance an early-stop threshold on the gradient-map norm
    (0 runs every iteration).
    """

    step_size: float = 0.99
    max_iters: int = 1000
    delta: float = 0.99
    epsilon: float = 1e-3
    l_bar0: float = 1.0
    nu: float = 2.0
    beta: float = 0.0
    tolerance: float = 0.0
    record_states: bool = False

    def __post_init__(self):
        if not 0.0 < self.step_size:
            raise ValueError("step_size must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        if not (0.0 < self.epsilon < self.delta < 1.0):
            raise ValueError("need 1 > delta > epsilon > 0")
        if self.l_bar0 <= 0.0:
            raise ValueError("l_bar0 must be positive")
        if self.nu <= 1.0:
            raise ValueError("nu must exceed 1")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError("beta must lie in [0, 1)")
        if self.tolerance < 0.0:
            raise ValueError("tolerance must be nonnegative")


@dataclass
class EvalCounts:
    """Work counters: objective (loss) calls, gradient passes, Bregman distances."""

    objective: int = 0
    gradient: int = 0
    bregman: int = 0

    def total(self):
        return self.objective + self.gradient + self.bregman


@dataclass
class TraceRow:
    iteration: int
    objective: float
    elapsed_s: float
    gamma: float | None = None
    l_bar: float | None = None
    l_under: float | None = None
    backtracks: int | None = None


class RunTrace:
    """Per-run record: rows, final weights, counters, audit entries."""

    def __init__(self, algorithm):
        self.algorithm = algorithm
        self.rows = []
        self.final_weights = None
        self.counts = EvalCounts()
        self.aborted = False
        self.abort_reason = None
        self.audit = []
        self.states = []
        self.cond11_violations = 0

    def objectives(self):
        return np.array([row.objective for row in self.rows])

    def final_objective(self):
        return self.rows[-1].objective if self.rows else math.nan

    def __repr__(self):
        return "RunTrace(%s, %d rows%s)" % (
            self.algorithm,
            len(self.rows),
            ", aborted" if self.aborted else "",
        )


TRACE_HEADER = "iter,objective,rel_objective,elapsed_s,gamma,L_bar,L_under,backtracks"


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def write_trace_csv(trace, path, objective_floor=None):
    """Serialize a trace; rel_objective is objective minus the given floor.

    With no floor the trace's own minimum objective is used. Floats
    carry 17 significant digits so the file parses back losslessly.
    """
    if objective_floor is None and trace.rows:
        objective_floor = min(row.objective for row in trace.rows)
    with open(path, "w") as fh:
        fh.write(TRACE_HEADER + "\n")
        for row in trace.rows:
            rel = row.objective - objective_floor if objective_floor is not None else None
            fh.write(
                ",".join(
                    [
                        str(row.iteration),
                        _fmt(row.objective),
                        _fmt(rel),
                        _fmt(row.elapsed_s),
                        _fmt(row.gamma),
                        _fmt(row.l_bar),
                        _fmt(row.l_under),
                        _fmt(row.backtracks),
                    ]
                )
                + "\n"
            )


def read_trace_csv(path):
    """Parse a trace CSV back into a list of per-row dicts (None for blanks)."""
    with open(path) as fh:
        header = fh.readline().rstrip("\n")
        if header != TRACE_HEADER:
            raise ValueError("unexpected trace header %r in %s" % (header, path))
        names = header.split(",")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            parts = line.rstrip("\n").split(",")
            if len(parts) != len(names):
                raise ValueError("line %d of %s has %d fields" % (lineno, path, len(parts)))
            row = {}
            for name, text in zip(names, parts):
                if text == "":
                    row[name] = None
                elif name in ("iter", "backtracks"):
                    row[name] = int(text)
                else:
                    row[name] = float(text)
            rows.append(row)
    return rows


def _composite(g_value, reg, weights):
    return g_value + reg.value(weights)


def _abort(trace, reason):
    trace.aborted = True
    trace.abort_reason = reason
    return trace


def run_bpg(w0, data, kernel, reg, cfg):
    """Fixed-step Bregman proximal gradient descent.

    Each iteration takes one closed-form update with step cfg.step_size
    and records the composite objective. Stops early once the
    gradient-map norm ||x_next - x||_F / step drops to cfg.tolerance.
    """
    trace = RunTrace("bpg")
    x = w0
    start = time.perf_counter()
    for k in range(1, cfg.max_iters + 1):
        try:
            x_next = bpg_update(x, data, kernel, reg, cfg.step_size)
        except ArithmeticError as exc:
            trace.final_weights = x
            return _abort(trace, str(exc))
        trace.counts.gradient += 1
        g_next = loss(x_next, data)
        trace.counts.objective += 1
        psi = _composite(g_next, reg, x_next)
        if not (math.isfinite(psi) and x_next.allfinite()):
            trace.final_weights = x
            return _abort(trace, "objective overflowed at iteration %d" % k)
        step_norm = (x_next - x).norm() / cfg.step_size
        trace.rows.append(TraceRow(k, psi, time.perf_counter() - start))
        x = x_next
        if step_norm <= cfg.tolerance:
            break
    trace.final_weights = x
    return trace


def _lower_estimate(gap, d2):
    # smallest L_under with gap >= -L_under * d2, nudged up so the
    # recorded value satisfies the inequality strictly under roundoff
    if d2 <= 0.0 or gap >= 0.0:
        return 0.0
    return (-gap / d2) * (1.0 + 1e-9)


def closed_form_gamma(x_prev, x_curr, kernel, kappa, dh=None):
    """Inertia weight guaranteeing D_h(x_curr, y) <= kappa D_h(x_prev, x_curr).

    Bounds the kernel's Bregman distance along the extrapolation ray by
    a quartic-type envelope chi * gamma^2 built from layer norms, then
    returns min(1, sqrt(kappa D_h / chi)). Requires distinct iterates.
    """
    delta = x_curr - x_prev
    dsq = delta.norm_sq()
    if dsq == 0.0:
        raise ValueError("closed-form inertia needs distinct consecutive iterates")
    n = kernel.n_layers
    omega = 2.0 * x_curr.norm_sq() + 2.0 * dsq
    b = (2 * n - 1) / float(n) ** (n - 1) * dsq * omega ** (n - 1)
    chi = kernel.c1 * b
    if kernel.parity == "even":
        c = (n - 1) / float(n) ** ((n - 2) / 2.0) * dsq * omega ** ((n - 2) / 2.0)
        chi += kernel.c2 * c
    else:
        d = n / float(n + 1) ** ((n - 1) / 2.0) * dsq * (omega + 1.0) ** ((n - 1) / 2.0)
        chi += kernel.c3 * d
    if n > 2:
        chi += kernel.rho * dsq
    if dh is None:
        dh = bregman_distance(kernel, x_prev, x_curr)
    return min(1.0, math.sqrt(max(0.0, kappa * dh) / chi))


def closed_form_gamma_n2(x_prev, x_curr, data, kappa, kernel=None, dh=None):
    """Tighter two-layer inertia bound; always at least the generic value.

    Uses the envelope xi1 gamma^4 + xi2 gamma^2 with
    xi1 = 6 ||X||^2 ||d||^4 and
    xi2 = (9 ||X||^2 ||x_curr||^2 + ||Y|| ||X|| / 2) ||d||^2,
    then gamma = min(1, sqrt(kappa D_h / (xi1 + xi2))) (gamma <= 1 turns
    the quartic term into a quadratic one).
    """
    delta = x_curr - x_prev
    dsq = delta.norm_sq()
    if dsq == 0.0:
        raise ValueError("closed-form inertia needs distinct consecutive iterates")
    nx, ny = data.norm_x, data.norm_y
    xi1 = 6.0 * nx * nx * dsq * dsq
    xi2 = (9.0 * nx * nx * x_curr.norm_sq() + 0.5 * ny * nx) * dsq
    if kernel is None:
        kernel = build_kernel(2, data, 0.0)
    if dh is None:
        dh = bregman_distance(kernel, x_prev, x_curr)
    return min(1.0, math.sqrt(max(0.0, kappa * dh) / (xi1 + xi2)))


def _run_cocain_family(w0, data, kernel, reg, cfg, mode, name):
    """Shared driver for bpg-wb (mode "wb"), cocain ("backtrack") and cfi."""
    trace = RunTrace(name)
    counts = trace.counts
    x_prev = x = w0
    g_x = loss(x, data)
    counts.objective += 1
    grad_x = None
    l_bar = cfg.l_bar0
    tau_prev = 1.0 / l_bar
    l_under_prev = 0.0
    start = time.perf_counter()

    for k in range(1, cfg.max_iters + 1):
        delta = x - x_prev
        moved = mode != "wb" and delta.norm_sq() > 0.0
        if moved:
            d1 = bregman_distance(kernel, x_prev, x)
            counts.bregman += 1
        else:
            d1 = 0.0
        margin = (cfg.delta - cfg.epsilon) * d1

        gamma = 0.0
        l_under = 0.0
        d2 = 0.0
        lower_slack = 0.0
        cond11_slack = margin
        y = x
        g_y = g_x
        grad_y = None

        try:
            if moved and mode == "backtrack":
                trial = 1.0
                while True:
                    y_t = x + trial * delta
                    d2_t = bregman_distance(kernel, x, y_t)
                    counts.bregman += 1
                    g_yt, grad_yt = loss_value_and_gradient(y_t, data)
                    counts.objective += 1
                    counts.gradient += 1
                    gap = g_x - g_yt - grad_yt.dot(x - y_t)
                    l_under_t = _lower_estimate(gap, d2_t)
                    if (1.0 + l_under_t * tau_prev) * d2_t <= margin:
                        gamma, y, d2 = trial, y_t, d2_t
                        g_y, grad_y = g_yt, grad_yt
                        l_under = l_under_t
                        lower_slack = gap + l_under * d2
                        cond11_slack = margin - (1.0 + l_under * tau_prev) * d2
                        break
                    trial *= 0.5
                    if trial < 1e-12:
                        break  # fall back to the plain step, gamma = 0
            elif moved and mode == "cfi":
                kappa = (cfg.delta - cfg.epsilon) / (1.0 + l_under_prev * tau_prev)
                if kernel.n_layers == 2:
                    gamma = closed_form_gamma_n2(x_prev, x, data, kappa, kernel=kernel, dh=d1)
                else:
                    gamma = closed_form_gamma(x_prev, x, kernel, kappa, dh=d1)
                y = x + gamma * delta
                d2 = bregman_distance(kernel, x, y)
                counts.bregman += 1
                g_y, grad_y = loss_value_and_gradient(y, data)
                counts.objective += 1
                counts.gradient += 1
                gap = g_x - g_y - grad_y.dot(x - y)
                l_under = _lower_estimate(gap, d2)
                lower_slack = gap + l_under * d2
                cond11_slack = margin - (1.0 + l_under * tau_prev) * d2
                if cond11_slack < 0.0:
                    trace.cond11_violations += 1

            if grad_y is None:
                grad_y = loss_gradient(y, data)
                counts.gradient += 1

            backtracks = 0
            while True:
                tau = min(tau_prev, 1.0 / l_bar)
                x_next = bpg_update(y, data, kernel, reg, tau, grad=grad_y)
                g_next = loss(x_next, data)
                counts.objective += 1
                dh_next = bregman_distance(kernel, x_next, y)
                counts.bregman += 1
                upper_slack = g_y + grad_y.dot(x_next - y) + l_bar * dh_next - g_next
                if upper_slack >= 0.0 and math.isfinite(g_next):
                    break
                l_bar *= cfg.nu
                backtracks += 1
                if backtracks > _MAX_BACKTRACKS or not math.isfinite(l_bar):
                    raise ArithmeticError(
                        "upper-bound backtracking diverged at iteration %d" % k
                    )
        except ArithmeticError as exc:
            trace.final_weights = x
            return _abort(trace, str(exc))

        psi = _composite(g_next, reg, x_next)
        if not (math.isfinite(psi) and x_next.allfinite()):
            trace.final_weights = x
            return _abort(trace, "objective overflowed at iteration %d" % k)

        trace.rows.append(
            TraceRow(
                k,
                psi,
                time.perf_counter() - start,
                gamma=gamma,
                l_bar=l_bar,
                l_under=None if mode == "wb" else l_under,
                backtracks=backtracks,
            )
        )
        trace.audit.append(
            {
                "iteration": k,
                "gamma": gamma,
                "l_bar": l_bar,
                "l_under": l_under,
                "tau": tau,
                "tau_prev": tau_prev,
                "d1": d1,
                "d2": d2,
                "upper_slack": upper_slack,
                "lower_slack": lower_slack,
                "cond11_slack": cond11_slack,
            }
        )
        if cfg.record_states:
            trace.states.append({"x": x, "y": y, "x_next": x_next})

        step_norm = (x_next - x).norm() / tau
        x_prev, x = x, x_next
        g_x = g_next
        tau_prev = tau
        l_under_prev = l_under
        if step_norm <= cfg.tolerance:
            break

    trace.final_weights = x
    return trace


def run_bpg_wb(w0, data, kernel, reg, cfg):
    """Bregman proximal gradient with a backtracked upper estimate, no inertia."""
    return _run_cocain_family(w0, data, kernel, reg, cfg, "wb", "bpg-wb")


def run_cocain(w0, data, kernel, reg, cfg):
    """Inertial Bregman method with backtracked inertia and smoothness estimates.

    Per iteration: the extrapolation weight gamma starts at 1 and halves
    until (delta - epsilon) D_h(x_prev, x) dominates
    (1 + L_under tau_prev) D_h(x, y); L_under is the smallest constant
    making the linearization a lower bound at (x, y). The upper estimate
    L_bar then grows by nu until the prox step satisfies the matching
    upper bound, and tau_k = min(tau_prev, 1/L_bar).
    """
    return _run_cocain_family(w0, data, kernel, reg, cfg, "backtrack", "cocain")


def run_cocain_cfi(w0, data, kernel, reg, cfg):
    """Inertial Bregman method with closed-form inertia, no gamma search.

    gamma comes from the closed-form envelope bound with
    kappa = (delta - epsilon) / (1 + L_under tau) of the previous
    iteration; the two-layer specialization is used when N = 2. The
    inertia condition is still evaluated and any violation counted in
    trace.cond11_violations.
    """
    return _run_cocain_family(w0, data, kernel, reg, cfg, "cfi", "cocain-cfi")


def _spectral_norm(m, tol=1e-10, max_iters=500):
    """Largest singular value by power iteration on m^T m, fixed start vector."""
    m = np.asarray(m, dtype=np.float64)
    if m.size == 0:
        return 0.0
    v = np.full(m.shape[1], 1.0 / math.sqrt(m.shape[1]))
    sigma = 0.0
    for _ in range(max_iters):
        w = m.T @ (m @ v)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        v = w / nw
        sigma_new = math.sqrt(nw)
        if abs(sigma_new - sigma) <= tol * max(1.0, sigma_new):
            return sigma_new
        sigma = sigma_new
    return sigma


def _block_prox(v, reg, i, n_layers, step):
    if reg.kind == "none":
        return v
    if reg.kind == "l2":
        return v / (1.0 + step * reg.lambda0)
    return soft_threshold(v, step * reg.mu_for_layer(i, n_layers))


def _run_palm_family(w0, data, reg, cfg, beta, name):
    """Alternating block updates; beta > 0 adds per-block extrapolation."""
    trace = RunTrace(name)
    X, Y = data.X, data.Y
    blocks = [w.copy() for w in w0]
    prev = [w.copy() for w in w0]
    n = len(blocks)
    x = WeightStack(tuple(blocks))
    start = time.perf_counter()

    for k in range(1, cfg.max_iters + 1):
        for i in range(n):
            if beta != 0.0:
                y_i = blocks[i] + beta * (blocks[i] - prev[i])
            else:
                y_i = blocks[i]
            prev[i] = blocks[i]
            a = np.eye(blocks[0].shape[0])
            for j in range(i):
                a = a @ blocks[j]
            b = X
            for j in range(n - 1, i, -1):
                b = blocks[j] @ b
            l_i = max(_spectral_norm(a) ** 2 * _spectral_norm(b) ** 2, 1e-12)
            grad_i = a.T @ (a @ y_i @ b - Y) @ b.T
            trace.counts.gradient += 1
            blocks[i] = _block_prox(y_i - grad_i / l_i, reg, i, n, 1.0 / l_i)
        x_next = WeightStack(tuple(blocks))
        g_next = loss(x_next, data)
        trace.counts.objective += 1
        psi = _composite(g_next, reg, x_next)
        if not (math.isfinite(psi) and x_next.allfinite()):
            trace.final_weights = x
            return _abort(trace, "objective overflowed at iteration %d" % k)
        trace.rows.append(TraceRow(k, psi, time.perf_counter() - start))
        step_norm = (x_next - x).norm()
        x = x_next
        if step_norm <= cfg.tolerance:
            break

    trace.final_weights = x
    return trace


def run_palm(w0, data, reg, cfg):
    """Proximal alternating linearized minimization, one sweep per iteration.

    Block i takes a gradient step in the partial objective with the
    exact block Lipschitz constant ||A||_2^2 ||B||_2^2 (A and B the
    frozen left and right factors) followed by the block prox.
    """
    return _run_palm_family(w0, data, reg, cfg, 0.0, "palm")


def run_ipalm(w0, data, reg, cfg):
    """PALM with per-block extrapolation against the previous sweep's value."""
    return _run_palm_family(w0, data, reg, cfg, cfg.beta, "ipalm")


def _euclid_prox(v, reg, alpha):
    if reg.kind == "none":
        return v
    if reg.kind == "l2":
        return v * (1.0 / (1.0 + alpha * reg.lambda0))
    n = len(v)
    return WeightStack(
        tuple(
            soft_threshold(v[i], alpha * reg.mu_for_layer(i, n)) for i in range(n)
        )
    )


def _run_fbs_family(w0, data, reg, cfg, beta, name):
    """Euclidean forward-backward with backtracked L; beta adds heavy-ball inertia.

    Step size alpha = 0.99 * 2 (1 - beta) / L. An iteration whose first
    trial satisfies the quadratic upper bound counts as an acceptance;
    after two consecutive acceptances L is relaxed by 1/nu.
    """
    trace = RunTrace(name)
    x_prev = x = w0
    l_est = cfg.l_bar0
    consecutive = 0
    start = time.perf_counter()

    for k in range(1, cfg.max_iters + 1):
        g_x, grad = loss_value_and_gradient(x, data)
        trace.counts.objective += 1
        trace.counts.gradient += 1
        inertia = beta * (x - x_prev) if beta != 0.0 else None
        backtracks = 0
        while True:
            alpha = 0.99 * 2.0 * (1.0 - beta) / l_est
            forward = x - alpha * grad
            if inertia is not None:
                forward = forward + inertia
            x_next = _euclid_prox(forward, reg, alpha)
            diff = x_next - x
            g_next = loss(x_next, data)
            trace.counts.objective += 1
            slack = g_x + grad.dot(diff) + 0.5 * l_est * diff.norm_sq() - g_next
            if slack >= 0.0:
                break
            l_est *= cfg.nu
            backtracks += 1
            consecutive = 0
            if backtracks > _MAX_BACKTRACKS or not math.isfinite(l_est):
                trace.final_weights = x
                return _abort(trace, "backtracking diverged at iteration %d" % k)
        if backtracks == 0:
            consecutive += 1
        else:
            consecutive = 0
        psi = _composite(g_next, reg, x_next)
        if not (math.isfinite(psi) and x_next.allfinite()):
            trace.final_weights = x
            return _abort(trace, "objective overflowed at iteration %d" % k)
        trace.rows.append(
            TraceRow(k, psi, time.perf_counter() - start, l_bar=l_est, backtracks=backtracks)
        )
        trace.audit.append(
            {"iteration": k, "slack": slack, "l": l_est, "alpha": alpha, "backtracks": backtracks}
        )
        if cfg.record_states:
            trace.states.append({"x": x, "x_next": x_next})
        step_norm = diff.norm() / alpha
        x_prev, x = x, x_next
        if consecutive >= 2:
            l_est = max(l_est / cfg.nu, 1e-12)
            consecutive = 0
        if step_norm <= cfg.tolerance:
            break

    trace.final_weights = x
    return trace


def run_fbs_wb(w0, data, reg, cfg):
    """Forward-backward splitting with backtracked Lipschitz estimate."""
    return _run_fbs_family(w0, data, reg, cfg, 0.0, "fbs-wb")


def run_ipiano_wb(w0, data, reg, cfg):
    """Heavy-ball forward-backward; beta = 0 reproduces run_fbs_wb exactly."""
    return _run_fbs_family(w0, data, reg, cfg, cfg.beta, "ipiano-wb")
