"""Polynomial Bregman kernels adapted to deep linear network training.

For an N-layer network the data-fit term g is smooth relative to a
radially symmetric polynomial kernel in s = ||W||_F^2 (sum over all
layers). With relative-smoothness constant 1 the kernel is

    even N:  h(W) = c1 (s/N)^N + c2 (s/N)^(N/2)        + rho s/N
    odd  N:  h(W) = c1 (s/N)^N + c3 ((s+1)/(N+1))^((N+1)/2) + rho s/N

with data-dependent coefficients

    c1 = (2N-1) N^N / (2 N!) * ||X||_F^2
    c2 = ||Y||_F ||X||_F (N-1) N^((N-2)/2) / (N-2)^((N-2)/2)   (c2 = ||Y||_F ||X||_F at N=2)
    c3 = ||Y||_F ||X||_F (N-1) (N+1)^((N-1)/2) / (N-1)^((N-1)/2)

The rho s/N term supplies strong convexity where the polynomial part
alone has none: it is mandatory (rho > 0) for even N > 2, optional for
odd N, and dropped entirely at N = 2 where the polynomial part is
already strongly convex.
"""

import math

import numpy as np

from .model import loss_value_and_gradient, loss

__all__ = [
    "BregmanKernel",
    "build_kernel",
    "kernel_value",
    "kernel_gradient",
    "kernel_gradient_scale",
    "bregman_distance",
    "check_lsmad",
]


class BregmanKernel:
    """Frozen coefficient bundle for one (N, dataset, rho) combination."""

    __slots__ = ("n_layers", "parity", "c1", "c2", "c3", "rho", "sigma", "norm_x", "norm_y")

    def __init__(self, n_layers, parity, c1, c2, c3, rho, sigma, norm_x, norm_y):
        self.n_layers = n_layers
        self.parity = parity
        self.c1 = c1
        self.c2 = c2
        self.c3 = c3
        self.rho = rho
        self.sigma = sigma
        self.norm_x = norm_x
        self.norm_y = norm_y

    def __repr__(self):
        return (
            "BregmanKernel(N=%d, %s, c1=%g, c2=%s, c3=%s, rho=%g, sigma=%g)"
            % (self.n_layers, self.parity, self.c1, self.c2, self.c3, self.rho, self.sigma)
        )


def build_kernel(n_layers, data, rho=1.0):
    """Construct the kernel for an N-layer network on the given data.

    Parameters
    ----------
    n_layers : int
        Network depth N >= 2.
    data : Dataset
        Supplies the Frobenius norms entering the coefficients.
    rho : float
        Weight of the strongly convex s/N term. Must be positive for
        even N > 2; ignored (forced to 0) at N = 2.

    Returns
    -------
    BregmanKernel
    """
    n = int(n_layers)
    if n < 2:
        raise ValueError("kernel needs n_layers >= 2, got %d" % n)
    rho = float(rho)
    if rho < 0.0:
        raise ValueError("rho must be nonnegative")
    if n == 2:
        # the quadratic-in-s part is already strongly convex; the
        # closed-form radius equation at N=2 carries no rho term
        rho = 0.0
    even = n % 2 == 0
    if even and n > 2 and rho == 0.0:
        raise ValueError("kernel not strongly convex: even n_layers > 2 needs rho > 0")

    nx, ny = data.norm_x, data.norm_y
    c1 = (2 * n - 1) * float(n) ** n / (2.0 * math.factorial(n)) * nx * nx
    c2 = c3 = None
    if even:
        if n == 2:
            c2 = ny * nx
        else:
            half = (n - 2) / 2.0
            c2 = ny * nx * (n - 1) * (float(n) ** half) / (float(n - 2) ** half)
    else:
        half = (n - 1) / 2.0
        c3 = ny * nx * (n - 1) * (float(n + 1) ** half) / (float(n - 1) ** half)

    if n == 2:
        sigma = c2
    elif even:
        sigma = 2.0 * rho / n
    else:
        # the (s+1) term is strongly convex with modulus (N+1)^(-(N-1)/2)
        # once scaled by c3; cap the scale at 1 so the bound stays valid
        # for weak data where c3 < 1
        sigma = min(1.0, c3) / float(n + 1) ** ((n - 1) / 2.0) + 2.0 * rho / n
    return BregmanKernel(n, "even" if even else "odd", c1, c2, c3, rho, sigma, nx, ny)


def kernel_value(kernel, weights):
    """h(W) for a weight stack with matching layer count."""
    n = kernel.n_layers
    if len(weights) != n:
        raise ValueError("kernel built for %d layers, stack has %d" % (n, len(weights)))
    s = weights.norm_sq()
    val = kernel.c1 * (s / n) ** n + kernel.rho * s / n
    if kernel.parity == "even":
        val += kernel.c2 * (s / n) ** (n / 2.0)
    else:
        val += kernel.c3 * ((s + 1.0) / (n + 1.0)) ** ((n + 1) / 2.0)
    return float(val)


def kernel_gradient_scale(kernel, s):
    """Scalar factor t(s) such that grad h(W) = t(||W||_F^2) * W blockwise."""
    n = kernel.n_layers
    scale = 2.0 * kernel.c1 * (s / n) ** (n - 1) + 2.0 * kernel.rho / n
    if kernel.parity == "even":
        scale += kernel.c2 * (s / n) ** ((n - 2) / 2.0)
    else:
        scale += kernel.c3 * ((s + 1.0) / (n + 1.0)) ** ((n - 1) / 2.0)
    return float(scale)


def kernel_gradient(kernel, weights):
    """Gradient stack of h; every block is a scalar multiple of W_i."""
    if len(weights) != kernel.n_layers:
        raise ValueError(
            "kernel built for %d layers, stack has %d" % (kernel.n_layers, len(weights))
        )
    t = kernel_gradient_scale(kernel, weights.norm_sq())
    return weights * t


def bregman_distance(kernel, x, y):
    """D_h(x, y) = h(x) - h(y) - <grad h(y), x - y>, nonnegative by convexity."""
    ty = kernel_gradient_scale(kernel, y.norm_sq())
    inner = ty * (x.dot(y) - y.norm_sq())
    return kernel_value(kernel, x) - kernel_value(kernel, y) - inner


def check_lsmad(kernel, data, x, y):
    """Test the two-sided descent inequality |gap g| <= D_h at one pair.

    The gap is g(x) - g(y) - <grad g(y), x - y>. Returns (holds, slack)
    where slack = D_h(x, y) - |gap|; the relative-smoothness property
    with constant 1 means slack >= 0 in exact arithmetic.
    """
    gy, grad_y = loss_value_and_gradient(y, data)
    gap = loss(x, data) - gy - grad_y.dot(x - y)
    slack = bregman_distance(kernel, x, y) - abs(gap)
    return slack >= 0.0, slack
