"""Acceptance gate: one test per headline guarantee, each printing a
single [PASS]/[FAIL] line (use pytest -s to see the lines inline).

Every test is self-contained, seeds its own data, and enforces both the
stated numeric tolerance and, where applicable, a wall-clock budget.
"""

import math
import os
import subprocess
import sys
import time

import numpy as np

from dlnopt import (
    Regularizer,
    OptimizerConfig,
    build_kernel,
    check_lsmad,
    bregman_distance,
    kernel_value,
    kernel_gradient,
    loss,
    loss_gradient,
    loss_value_and_gradient,
    solve_radius,
    bpg_update,
    run_bpg,
    run_cocain,
    run_cocain_cfi,
    run_palm,
    run_ipalm,
    run_fbs_wb,
    run_ipiano_wb,
    closed_form_gamma,
    closed_form_gamma_n2,
    generate_experiment1,
    read_trace_csv,
)
from helpers import (
    random_stack,
    random_dataset,
    fd_gradient,
    rel_error,
    bisect_radius,
    stationarity_residual,
)

DEPTHS = (2, 3, 4, 5)
REGS = (Regularizer.none(), Regularizer.l2(0.1), Regularizer.l1(0.1))


def _report(name, ok, detail):
    line = "[%s] %s: %s" % ("PASS" if ok else "FAIL", name, detail)
    print(line)
    assert ok, line


def test_accept_relative_smoothness():
    budget = 30.0
    start = time.perf_counter()
    rng = np.random.default_rng(1001)
    checked, worst = 0, math.inf
    for n in DEPTHS:
        data = random_dataset(rng)
        kernel = build_kernel(n, data, 1.0)
        for lo, hi in ((-1.0, 1.0), (-10.0, 10.0)):
            for _ in range(1000):
                x = random_stack(rng, n, lo=lo, hi=hi)
                y = random_stack(rng, n, lo=lo, hi=hi)
                _, slack = check_lsmad(kernel, data, x, y)
                worst = min(worst, slack)
                checked += 1
    elapsed = time.perf_counter() - start
    ok = worst >= -1e-10 and elapsed <= budget
    _report(
        "relative smoothness (constant 1) of the loss under the kernel",
        ok,
        "%d pairs, min slack %.3e >= -1e-10, %.1fs <= %.0fs" % (checked, worst, elapsed, budget),
    )


def test_accept_gradient_oracles():
    budget = 10.0
    start = time.perf_counter()
    rng = np.random.default_rng(1002)
    worst_loss, worst_kernel = 0.0, 0.0
    for n in DEPTHS:
        data = random_dataset(rng)
        kernel = build_kernel(n, data, 1.0)
        for _ in range(100):
            w = random_stack(rng, n)
            fd_l = fd_gradient(lambda s: loss(s, data), w)
            worst_loss = max(worst_loss, rel_error(loss_gradient(w, data), fd_l))
            fd_k = fd_gradient(lambda s: kernel_value(kernel, s), w)
            worst_kernel = max(worst_kernel, rel_error(kernel_gradient(kernel, w), fd_k))
    elapsed = time.perf_counter() - start
    ok = worst_loss <= 1e-5 and worst_kernel <= 1e-5 and elapsed <= budget
    _report(
        "analytic gradients match central finite differences",
        ok,
        "100 instances/depth, loss rel err %.2e, kernel rel err %.2e <= 1e-5, %.1fs <= %.0fs"
        % (worst_loss, worst_kernel, elapsed, budget),
    )


def test_accept_closed_form_prox():
    budget = 30.0
    start = time.perf_counter()
    rng = np.random.default_rng(1003)
    lam = 0.99

    worst_res = 0.0
    for i in range(500):
        n = DEPTHS[i % 4]
        reg = REGS[(i // 4) % 3]
        if i % 25 == 0:
            datasets = {m: random_dataset(rng) for m in DEPTHS}
            kernels = {m: build_kernel(m, datasets[m], 1.0) for m in DEPTHS}
        data, kernel = datasets[n], kernels[n]
        w = random_stack(rng, n)
        u = bpg_update(w, data, kernel, reg, lam)
        worst_res = max(worst_res, stationarity_residual(w, u, data, kernel, reg, lam))

    worst_gap = 0.0
    for i in range(1000):
        n = DEPTHS[i % 4]
        data = random_dataset(rng)
        rho = float(rng.uniform(0.1, 2.0))
        kernel = build_kernel(n, data, rho)
        p_norm = float(np.exp(rng.normal(0.0, 2.0)))
        extra = float(rng.uniform(0.0, 0.1)) if i % 2 else 0.0
        got = solve_radius(kernel, p_norm, extra)
        ref = bisect_radius(kernel, p_norm, extra)
        worst_gap = max(worst_gap, abs(got - ref))

    elapsed = time.perf_counter() - start
    ok = worst_res <= 1e-8 and worst_gap <= 1e-10 and elapsed <= budget
    _report(
        "closed-form prox step is first-order optimal",
        ok,
        "500 steps max residual %.2e <= 1e-8 (L1 via entrywise subgradient inclusion), "
        "1000 radius solves vs bisection max gap %.2e <= 1e-10, %.1fs <= %.0fs"
        % (worst_res, worst_gap, elapsed, budget),
    )


def test_accept_bpg_monotone_descent():
    budget = 120.0
    start = time.perf_counter()
    worst_increase = -math.inf
    for n in (3, 4, 5):
        w0, data = generate_experiment1(0, n_layers=n)
        kernel = build_kernel(n, data, 1.0)
        for reg in REGS:
            trace = run_bpg(w0, data, kernel, reg, OptimizerConfig(max_iters=2000))
            assert not trace.aborted
            worst_increase = max(worst_increase, float(np.max(np.diff(trace.objectives()))))

    worst_map = 0.0
    w0, data = generate_experiment1(0, n_layers=3)
    kernel = build_kernel(3, data, 1.0)
    for reg in REGS:
        trace = run_bpg(w0, data, kernel, reg, OptimizerConfig(max_iters=10000))
        x = trace.final_weights
        gmap = (bpg_update(x, data, kernel, reg, 0.99) - x).norm() / 0.99
        worst_map = max(worst_map, gmap)

    elapsed = time.perf_counter() - start
    ok = worst_increase <= 1e-10 and worst_map <= 1e-4 and elapsed <= budget
    _report(
        "fixed-step method descends monotonically and stations out",
        ok,
        "9 runs x 2000 iters max increase %.2e <= 1e-10, "
        "gradient map after 10^4 iters %.2e <= 1e-4, %.1fs <= %.0fs"
        % (worst_increase, worst_map, elapsed, budget),
    )


def test_accept_inertial_inequalities():
    budget = 60.0
    start = time.perf_counter()
    w0, data = generate_experiment1(0)
    kernel = build_kernel(3, data, 1.0)
    cfg = OptimizerConfig(max_iters=2000, record_states=True)

    worst = math.inf
    for reg in REGS:
        trace = run_cocain(w0, data, kernel, reg, cfg)
        assert not trace.aborted and len(trace.rows) == 2000
        x_before = w0
        for audit, state in zip(trace.audit, trace.states):
            x, y, x_next = state["x"], state["y"], state["x_next"]
            g_y, grad_y = loss_value_and_gradient(y, data)
            upper = (
                g_y
                + grad_y.dot(x_next - y)
                + audit["l_bar"] * bregman_distance(kernel, x_next, y)
                - loss(x_next, data)
            )
            lower = (
                loss(x, data)
                - g_y
                - grad_y.dot(x - y)
                + audit["l_under"] * bregman_distance(kernel, x, y)
            )
            cond = (cfg.delta - cfg.epsilon) * bregman_distance(kernel, x_before, x) - (
                1.0 + audit["l_under"] * audit["tau_prev"]
            ) * bregman_distance(kernel, x, y)
            worst = min(worst, upper, lower, cond)
            x_before = x

    rng = np.random.default_rng(1005)
    worst_extrap = math.inf
    for i in range(1000):
        n = (3, 4, 5)[i % 3]
        if i % 100 == 0:
            datasets = {m: random_dataset(rng) for m in (3, 4, 5)}
            kernels = {m: build_kernel(m, datasets[m], 1.0) for m in (3, 4, 5)}
        kernel_i = kernels[n]
        x_prev, x_curr = random_stack(rng, n), random_stack(rng, n)
        kappa = float(rng.uniform(0.05, 0.99))
        gamma = closed_form_gamma(x_prev, x_curr, kernel_i, kappa)
        y = x_curr + gamma * (x_curr - x_prev)
        worst_extrap = min(
            worst_extrap,
            kappa * bregman_distance(kernel_i, x_prev, x_curr)
            - bregman_distance(kernel_i, x_curr, y),
        )
    data2 = random_dataset(rng)
    kernel2 = build_kernel(2, data2, 0.0)
    for _ in range(1000):
        x_prev, x_curr = random_stack(rng, 2), random_stack(rng, 2)
        kappa = float(rng.uniform(0.05, 0.99))
        gamma = closed_form_gamma_n2(x_prev, x_curr, data2, kappa, kernel=kernel2)
        y = x_curr + gamma * (x_curr - x_prev)
        worst_extrap = min(
            worst_extrap,
            kappa * bregman_distance(kernel2, x_prev, x_curr)
            - bregman_distance(kernel2, x_curr, y),
        )

    elapsed = time.perf_counter() - start
    ok = worst >= -1e-12 and worst_extrap >= -1e-12 and elapsed <= budget
    _report(
        "inertial method inequalities hold post hoc",
        ok,
        "3 runs x 2000 iters min slack %.3e >= -1e-12 (upper/lower/inertia), "
        "closed-form extrapolation audit 1000+1000 pairs min slack %.3e >= -1e-12, "
        "%.1fs <= %.0fs" % (worst, worst_extrap, elapsed, budget),
    )


def test_accept_closed_form_inertia_cheaper():
    w0, data = generate_experiment1(0)
    kernel = build_kernel(3, data, 1.0)
    cfg = OptimizerConfig(max_iters=2000)
    ok = True
    details = []
    for reg in REGS:
        bt = run_cocain(w0, data, kernel, reg, cfg)
        cf = run_cocain_cfi(w0, data, kernel, reg, cfg)
        assert len(bt.rows) == len(cf.rows) == 2000
        ok = ok and cf.counts.objective < bt.counts.objective
        ok = ok and cf.counts.bregman < bt.counts.bregman
        details.append(
            "%s obj %d<%d dist %d<%d"
            % (reg.kind, cf.counts.objective, bt.counts.objective,
               cf.counts.bregman, bt.counts.bregman)
        )
    _report(
        "closed-form inertia needs strictly fewer objective/distance evaluations",
        ok,
        "; ".join(details),
    )


def test_accept_cli_protocol(tmp_path):
    budget = 300.0
    start = time.perf_counter()
    out_run = str(tmp_path / "run")
    cmd = [
        sys.executable,
        "-m",
        "dlnopt",
        "run",
        "--experiment",
        "exp1",
        "--layers",
        "3",
        "--reg",
        "l2",
        "--algos",
        "all",
        "--iters",
        "2000",
        "--seed",
        "0",
        "--out",
        out_run,
    ]
    proc = subprocess.run(cmd, capture_output=True, text=True, timeout=budget)
    traces = [
        name
        for name in os.listdir(out_run)
        if name.endswith(".csv") and name != "summary.csv"
    ]
    rows_ok = all(
        len(read_trace_csv(os.path.join(out_run, n))) == 2000 for n in traces
    )
    with open(os.path.join(out_run, "summary.csv")) as fh:
        summary_rows = fh.read().splitlines()[1:]

    out_stats = str(tmp_path / "stats")
    stats_cmd = [
        sys.executable,
        "-m",
        "dlnopt",
        "stats",
        "--experiment",
        "exp1",
        "--layers",
        "3",
        "--reg",
        "l2",
        "--algos",
        "bpg,palm",
        "--iters",
        "25",
        "--out",
        out_stats,
    ]
    stats_proc = subprocess.run(stats_cmd, capture_output=True, text=True, timeout=budget)
    with open(os.path.join(out_stats, "summary.csv")) as fh:
        stats_rows = [line.split(",") for line in fh.read().splitlines()[1:]]
    per_algo = {tag: sum(1 for r in stats_rows if r[0] == tag) for tag in ("bpg", "palm")}

    elapsed = time.perf_counter() - start
    ok = (
        proc.returncode == 0
        and stats_proc.returncode == 0
        and len(traces) == 9
        and rows_ok
        and len(summary_rows) == 9
        and per_algo == {"bpg": 40, "palm": 40}
        and elapsed <= budget
    )
    _report(
        "command line protocol runs end to end",
        ok,
        "run: rc=%d, %d trace files, %d summary rows; stats: rc=%d, rows/algo %s; "
        "%.1fs <= %.0fs"
        % (
            proc.returncode,
            len(traces),
            len(summary_rows),
            stats_proc.returncode,
            per_algo,
            elapsed,
            budget,
        ),
    )


def test_accept_baseline_sanity():
    w0, data = generate_experiment1(0)
    worst_increase = -math.inf
    for reg in REGS:
        trace = run_palm(w0, data, reg, OptimizerConfig(max_iters=1000))
        worst_increase = max(worst_increase, float(np.max(np.diff(trace.objectives()))))

    reg = Regularizer.l2(0.1)
    cfg = OptimizerConfig(max_iters=500, beta=0.0)
    palm = run_palm(w0, data, reg, cfg)
    ipalm0 = run_ipalm(w0, data, reg, cfg)
    palm_same = np.array_equal(palm.objectives(), ipalm0.objectives()) and all(
        np.array_equal(a, b) for a, b in zip(palm.final_weights, ipalm0.final_weights)
    )
    fbs = run_fbs_wb(w0, data, reg, cfg)
    ipiano0 = run_ipiano_wb(w0, data, reg, cfg)
    fbs_same = np.array_equal(fbs.objectives(), ipiano0.objectives()) and all(
        np.array_equal(a, b) for a, b in zip(fbs.final_weights, ipiano0.final_weights)
    )

    ok = worst_increase <= 1e-10 and palm_same and fbs_same
    _report(
        "baselines: alternating sweeps descend, zero inertia reproduces the base methods",
        ok,
        "sweep max increase %.2e <= 1e-10, zero-beta traces bit-identical: "
        "alternating %s, forward-backward %s" % (worst_increase, palm_same, fbs_same),
    )
