"""Shared builders and oracles for the test suite."""

import numpy as np

from dlnopt import WeightStack, Dataset


def random_stack(rng, n_layers, dim=3, lo=-1.0, hi=1.0):
    return WeightStack([rng.uniform(lo, hi, (dim, dim)) for _ in range(n_layers)])


def random_dataset(rng, d=3, n=4):
    return Dataset(rng.uniform(0.0, 1.0, (d, n)), rng.uniform(0.0, 1.0, (d, n)))


def fd_gradient(f, stack, h=1e-6):
    """Central finite differences of a scalar stack function, entry by entry."""
    blocks = []
    for li in range(len(stack)):
        g = np.zeros_like(stack[li])
        for idx in np.ndindex(stack[li].shape):
            plus = [w.copy() for w in stack]
            minus = [w.copy() for w in stack]
            plus[li][idx] += h
            minus[li][idx] -= h
            g[idx] = (f(WeightStack(plus)) - f(WeightStack(minus))) / (2.0 * h)
        blocks.append(g)
    return WeightStack(blocks)


def rel_error(approx, exact):
    """Norm-based relative error between two stacks."""
    num = (approx - exact).norm()
    return num / max(1.0, exact.norm())


def brute_force_product(stack, X):
    """Triple-loop matrix chain product times X, no numpy matmul."""
    mats = [np.asarray(w) for w in stack] + [np.asarray(X)]
    prod = mats[0]
    for m in mats[1:]:
        out = np.zeros((prod.shape[0], m.shape[1]))
        for i in range(prod.shape[0]):
            for j in range(m.shape[1]):
                acc = 0.0
                for k in range(prod.shape[1]):
                    acc += prod[i, k] * m[k, j]
                out[i, j] = acc
        prod = out
    return prod


def bisect_radius(kernel, p_norm, extra_linear=0.0, iters=200):
    """Plain bisection oracle for the radius equation."""
    from dlnopt import radius_equation_residual

    if p_norm == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    while radius_equation_residual(hi, kernel, p_norm, extra_linear) < 0.0:
        hi *= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if radius_equation_residual(mid, kernel, p_norm, extra_linear) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def stationarity_residual(w, u, data, kernel, reg, lam):
    """Norm of the first-order optimality residual of the prox subproblem.

    Zero-residual condition: 0 in lam grad g(w) + lam dR(u)
    + grad h(u) - grad h(w). For the L1 case the on-support entries use
    the exact subgradient and off-support entries measure how far the
    base term sits outside [-lam mu, lam mu].
    """
    import math

    from dlnopt import loss_gradient, kernel_gradient_scale

    g = loss_gradient(w, data)
    tw = kernel_gradient_scale(kernel, w.norm_sq())
    tu = kernel_gradient_scale(kernel, u.norm_sq())
    total = 0.0
    for i in range(len(w)):
        base = lam * g[i] + tu * u[i] - tw * w[i]
        if reg.kind == "none":
            res = base
        elif reg.kind == "l2":
            res = base + lam * reg.lambda0 * u[i]
        else:
            mu = lam * reg.mu_for_layer(i, len(w))
            res = np.where(
                u[i] != 0.0,
                base + mu * np.sign(u[i]),
                np.maximum(np.abs(base) - mu, 0.0),
            )
        total += float(np.sum(np.asarray(res) ** 2))
    return math.sqrt(total)
