"""Deep linear network model: weight stacks, data, loss and regularizers.

The trainable variable is an ordered stack of dense matrices
W = (W_1, ..., W_N) and the data-fit term is the squared Frobenius
residual of the end-to-end linear map,

    g(W) = 0.5 * || W_1 W_2 ... W_N X - Y ||_F^2.

Everything here is plain float64 numpy.
"""

import numpy as np

__all__ = [
    "WeightStack",
    "Dataset",
    "Regularizer",
    "loss",
    "loss_gradient",
    "loss_value_and_gradient",
    "regularizer_value",
    "composite_objective",
]


class WeightStack:
    """Immutable-by-convention tuple of weight matrices with chained shapes.

    Supports the small amount of vector-space algebra the optimizers
    need (+, -, scalar *, Frobenius inner product and norm). All
    arithmetic returns new stacks; layers are never written in place.
    """

    __slots__ = ("layers",)

    def __init__(self, layers):
        layers = tuple(np.asarray(w, dtype=np.float64) for w in layers)
        if len(layers) < 2:
            raise ValueError("a weight stack needs at least 2 layers, got %d" % len(layers))
        for i, w in enumerate(layers):
            if w.ndim != 2:
                raise ValueError("layer %d must be a matrix, got ndim=%d" % (i, w.ndim))
        for i in range(len(layers) - 1):
            if layers[i].shape[1] != layers[i + 1].shape[0]:
                raise ValueError(
                    "layer %d has %d columns but layer %d has %d rows"
                    % (i, layers[i].shape[1], i + 1, layers[i + 1].shape[0])
                )
        self.layers = layers

    def __len__(self):
        return len(self.layers)

    def __iter__(self):
        return iter(self.layers)

    def __getitem__(self, i):
        return self.layers[i]

    @property
    def shapes(self):
        return tuple(w.shape for w in self.layers)

    def norm_sq(self):
        """Sum of squared entries over all layers (the radial variable s)."""
        return float(sum(np.vdot(w, w) for w in self.layers))

    def norm(self):
        return float(np.sqrt(self.norm_sq()))

    def dot(self, other):
        """Frobenius inner product with another stack of the same shapes."""
        return float(sum(np.vdot(a, b) for a, b in zip(self.layers, other.layers)))

    def copy(self):
        return WeightStack(tuple(w.copy() for w in self.layers))

    def __add__(self, other):
        return WeightStack(tuple(a + b for a, b in zip(self.layers, other.layers)))

    def __sub__(self, other):
        return WeightStack(tuple(a - b for a, b in zip(self.layers, other.layers)))

    def __mul__(self, c):
        c = float(c)
        return WeightStack(tuple(c * w for w in self.layers))

    __rmul__ = __mul__

    def allfinite(self):
        return all(np.all(np.isfinite(w)) for w in self.layers)

    def zeros_like(self):
        return WeightStack(tuple(np.zeros_like(w) for w in self.layers))

    def __repr__(self):
        return "WeightStack(shapes=%r)" % (self.shapes,)


class Dataset:
    """Training pair (X, Y) with cached Frobenius norms.

    X has one column per sample; Y holds the targets with the same
    number of columns. The cached norms feed the kernel coefficients.
    """

    __slots__ = ("X", "Y", "norm_x", "norm_y")

    def __init__(self, X, Y):
        X = np.asarray(X, dtype=np.float64)
        Y = np.asarray(Y, dtype=np.float64)
        if X.ndim != 2 or Y.ndim != 2:
            raise ValueError("X and Y must be matrices")
        if X.shape[1] < 1:
            raise ValueError("need at least one sample column")
        if Y.shape[1] != X.shape[1]:
            raise ValueError(
                "X has %d sample columns but Y has %d" % (X.shape[1], Y.shape[1])
            )
        self.X = X
        self.Y = Y
        self.norm_x = float(np.linalg.norm(X))
        self.norm_y = float(np.linalg.norm(Y))

    @property
    def n_samples(self):
        return self.X.shape[1]

    def __repr__(self):
        return "Dataset(X=%r, Y=%r)" % (self.X.shape, self.Y.shape)


class Regularizer:
    """Separable block regularizer: none, squared-L2 or entrywise L1.

    kind "l2" uses f(W) = (lambda0/2) sum_i ||W_i||_F^2 with lambda0 > 0.
    kind "l1" uses f(W) = sum_i mu_i ||W_i||_1 with per-layer mu_i > 0
    (a scalar mu is broadcast to every layer).
    """

    __slots__ = ("kind", "lambda0", "mu")

    def __init__(self, kind, lambda0=0.0, mu=None):
        if kind not in ("none", "l2", "l1"):
            raise ValueError("unknown regularizer kind %r" % (kind,))
        self.kind = kind
        self.lambda0 = float(lambda0)
        self.mu = None
        if kind == "l2" and self.lambda0 <= 0.0:
            raise ValueError("l2 regularizer needs lambda0 > 0")
        if kind == "l1":
            if mu is None:
                raise ValueError("l1 regularizer needs mu")
            mu = np.atleast_1d(np.asarray(mu, dtype=np.float64))
            if np.any(mu <= 0.0):
                raise ValueError("l1 weights mu must all be positive")
            self.mu = mu

    @classmethod
    def none(cls):
        return cls("none")

    @classmethod
    def l2(cls, lambda0):
        return cls("l2", lambda0=lambda0)

    @classmethod
    def l1(cls, mu):
        return cls("l1", mu=mu)

    def mu_for_layer(self, i, n_layers):
        if self.mu is None:
            raise ValueError("regularizer has no l1 weights")
        if self.mu.size == 1:
            return float(self.mu[0])
        if self.mu.size != n_layers:
            raise ValueError(
                "got %d l1 weights for %d layers" % (self.mu.size, n_layers)
            )
        return float(self.mu[i])

    def value(self, weights):
        if self.kind == "none":
            return 0.0
        if self.kind == "l2":
            return 0.5 * self.lambda0 * weights.norm_sq()
        n = len(weights)
        return float(
            sum(
                self.mu_for_layer(i, n) * np.sum(np.abs(w))
                for i, w in enumerate(weights)
            )
        )

    def __repr__(self):
        if self.kind == "l2":
            return "Regularizer(l2, lambda0=%g)" % self.lambda0
        if self.kind == "l1":
            return "Regularizer(l1, mu=%s)" % (self.mu,)
        return "Regularizer(none)"


def _check_against_data(weights, data):
    if weights[-1].shape[1] != data.X.shape[0]:
        raise ValueError(
            "layer %d has %d columns but X has %d rows"
            % (len(weights) - 1, weights[-1].shape[1], data.X.shape[0])
        )
    if weights[0].shape[0] != data.Y.shape[0]:
        raise ValueError(
            "layer 0 has %d rows but Y has %d" % (weights[0].shape[0], data.Y.shape[0])
        )


def _residual(weights, data):
    # left-to-right accumulation of W_1 ... W_N X minus Y
    prod = weights[0]
    for w in weights.layers[1:]:
        prod = prod @ w
    return prod @ data.X - data.Y


def loss(weights, data):
    """Squared Frobenius data-fit 0.5 * ||W_1 ... W_N X - Y||_F^2."""
    _check_against_data(weights, data)
    r = _residual(weights, data)
    return 0.5 * float(np.vdot(r, r))


def loss_value_and_gradient(weights, data):
    """Loss together with its gradient stack, sharing one residual pass.

    The gradient with respect to layer i is A_i^T R B_i^T where
    A_i = W_1 ... W_{i-1} (identity for i = 0), R is the residual and
    B_i = W_{i+1} ... W_N X (X itself for the last layer).
    """
    _check_against_data(weights, data)
    n = len(weights)
    # prefixes[i] = product of layers before i
    prefixes = [np.eye(weights[0].shape[0])]
    for i in range(n - 1):
        prefixes.append(prefixes[-1] @ weights[i])
    # suffixes[i] = product of layers after i, times X
    suffixes = [None] * n
    suffixes[n - 1] = data.X
    for i in range(n - 2, -1, -1):
        suffixes[i] = weights[i + 1] @ suffixes[i + 1]
    r = prefixes[-1] @ weights[n - 1] @ data.X - data.Y
    grads = tuple(prefixes[i].T @ r @ suffixes[i].T for i in range(n))
    return 0.5 * float(np.vdot(r, r)), WeightStack(grads)


def loss_gradient(weights, data):
    """Gradient stack of the data-fit term at the given weights."""
    return loss_value_and_gradient(weights, data)[1]


def regularizer_value(reg, weights):
    return reg.value(weights)


def composite_objective(weights, data, reg):
    """Full objective: data-fit loss plus regularizer value."""
    return loss(weights, data) + reg.value(weights)
