"""Closed-form Bregman proximal mapping for the network kernels.

The update T_lam(W) = argmin_u f(u) + <grad g(W), u - W> + (1/lam) D_h(u, W)
reduces, for every supported regularizer f, to one scalar root find.
With P_i = lam * grad_i g(W) - grad_i h(W) (and Q_i the soft-thresholded
negation for L1) the minimizer is u_i = r sqrt(N) Q_i / ||Q||_F where
r >= 0 solves a strictly increasing polynomial equation in r:

    even N:  2 c1 r^(2N-1) + c2 r^(N-1) + a r = ||Q||_F / sqrt(N)
    odd  N:  2 c1 r^(2N-1) + c3 ((N r^2 + 1)/(N + 1))^((N-1)/2) r + a r = ||Q||_F / sqrt(N)

with linear coefficient a = 2 rho / N, plus lam * lambda0 under squared-L2
regularization. r equals ||u||_F / sqrt(N) at the solution.
"""

import math

from .model import WeightStack, loss_gradient
from .kernels import kernel_gradient_scale

import numpy as np

__all__ = [
    "soft_threshold",
    "radius_equation_residual",
    "solve_radius",
    "bpg_update",
]

_MAX_NEWTON_ITERS = 200


def soft_threshold(x, theta):
    """Entrywise shrinkage max(|x| - theta, 0) * sign(x)."""
    if theta < 0.0:
        raise ValueError("threshold must be nonnegative")
    return np.sign(x) * np.maximum(np.abs(x) - theta, 0.0)


def radius_equation_residual(r, kernel, p_norm, extra_linear=0.0):
    """Left side minus right side of the radius equation at radius r.

    Parameters
    ----------
    r : float
        Candidate radius, r >= 0.
    kernel : BregmanKernel
        Supplies N, parity and the coefficients.
    p_norm : float
        Frobenius norm of the (possibly thresholded) momentum stack.
    extra_linear : float
        Additional linear coefficient, lam * lambda0 for squared-L2.
    """
    n = kernel.n_layers
    lin = 2.0 * kernel.rho / n + extra_linear
    val = 2.0 * kernel.c1 * r ** (2 * n - 1) + lin * r - p_norm / math.sqrt(n)
    if kernel.parity == "even":
        val += kernel.c2 * r ** (n - 1)
    else:
        # evaluated via exp/log so large powers of the ratio stay stable
        base = (n * r * r + 1.0) / (n + 1.0)
        val += kernel.c3 * math.exp(0.5 * (n - 1) * math.log(base)) * r
    return val


def _radius_equation_derivative(r, kernel, extra_linear):
    n = kernel.n_layers
    d = 2.0 * kernel.c1 * (2 * n - 1) * r ** (2 * n - 2)
    d += 2.0 * kernel.rho / n + extra_linear
    if kernel.parity == "even":
        if n == 2:
            d += kernel.c2
        else:
            d += kernel.c2 * (n - 1) * r ** (n - 2)
    else:
        base = (n * r * r + 1.0) / (n + 1.0)
        half = (n - 1) / 2.0
        # d/dr of c3 * base^half * r
        d += kernel.c3 * base ** (half - 1.0) * (base + 2.0 * half * n * r * r / (n + 1.0))
    return d


def solve_radius(kernel, p_norm, extra_linear=0.0):
    """Unique nonnegative root of the radius equation, Newton with bisection safeguard.

    The left side is strictly increasing on r >= 0 and negative at 0
    (equal to -p_norm / sqrt(N)), so the root is unique. Newton runs
    inside a bracket and falls back to bisection whenever a step leaves
    it; iteration stops once the residual is below
    1e-12 * max(1, p_norm) and the step is negligible.
    """
    if not math.isfinite(p_norm) or p_norm < 0.0:
        raise ArithmeticError("radius equation got a non-finite momentum norm")
    if extra_linear < 0.0:
        raise ValueError("extra_linear must be nonnegative")
    if p_norm == 0.0:
        return 0.0

    n = kernel.n_layers
    target = p_norm / math.sqrt(n)
    if kernel.c1 > 0.0:
        hi = max(1.0, 2.0 * (target / (2.0 * kernel.c1)) ** (1.0 / (2 * n - 1)))
    else:
        hi = 1.0
    for _ in range(200):
        if radius_equation_residual(hi, kernel, p_norm, extra_linear) >= 0.0:
            break
        hi *= 2.0
    else:
        raise ArithmeticError("radius bracket expansion failed")
    lo = 0.0

    tol = 1e-12 * max(1.0, p_norm)
    r = 0.5 * (lo + hi)
    for _ in range(_MAX_NEWTON_ITERS):
        f = radius_equation_residual(r, kernel, p_norm, extra_linear)
        if f > 0.0:
            hi = r
        elif f < 0.0:
            lo = r
        else:
            return r
        d = _radius_equation_derivative(r, kernel, extra_linear)
        step = f / d if d > 0.0 else math.inf
        r_new = r - step
        if not (lo < r_new < hi):
            r_new = 0.5 * (lo + hi)
            step = r - r_new
        if abs(f) <= tol and abs(step) <= 1e-15 * max(1.0, r):
            return r_new
        if r_new == r:
            return r
        r = r_new
    return r


def _zero_stack_like(weights):
    return weights.zeros_like()


def bpg_update(weights, data, kernel, reg, lam, grad=None):
    """One Bregman proximal gradient step from the given weights.

    Parameters
    ----------
    weights : WeightStack
        Current point (also the gradient anchor).
    data : Dataset
    kernel : BregmanKernel
    reg : Regularizer
    lam : float
        Step size, 0 < lam; relative smoothness suggests lam < 1.
    grad : WeightStack, optional
        Precomputed loss gradient at `weights`; avoids a second pass
        when the caller already evaluated it.

    Returns
    -------
    WeightStack
        The unique minimizer of the linearized model plus (1/lam) D_h.
    """
    lam = float(lam)
    if lam <= 0.0:
        raise ValueError("step size lam must be positive")
    if grad is None:
        grad = loss_gradient(weights, data)
    t = kernel_gradient_scale(kernel, weights.norm_sq())
    n = len(weights)

    extra_linear = 0.0
    blocks = []
    if reg.kind == "l1":
        for i in range(n):
            p_i = lam * grad[i] - t * weights[i]
            blocks.append(soft_threshold(-p_i, lam * reg.mu_for_layer(i, n)))
    else:
        if reg.kind == "l2":
            extra_linear = lam * reg.lambda0
        for i in range(n):
            blocks.append(-(lam * grad[i] - t * weights[i]))

    q_norm = math.sqrt(sum(float(np.vdot(b, b)) for b in blocks))
    if q_norm == 0.0:
        return _zero_stack_like(weights)
    r = solve_radius(kernel, q_norm, extra_linear)
    c = r * math.sqrt(n) / q_norm
    return WeightStack(tuple(c * b for b in blocks))
