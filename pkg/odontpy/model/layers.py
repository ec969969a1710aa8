import numpy as np

from ..exceptions import DimensionError
from ..numerics import RunningStats, Tensor, as_tensor, normalize, sigmoid

DEFAULT_ALPHA = 2.0


def _as_condition_batch(c, dim):
    c = as_tensor(c)
    if c.ndim == 1:
        c = c.reshape(1, c.shape[0])
    if c.ndim != 2 or c.shape[1] != dim:
        raise DimensionError('Condition must be [{0}] or [B, {0}], got {1}'.format(dim, c.shape))
    return c


def _spread(per_shape, rows, n_rows):
    """Broadcast per-shape rows [B, F] to per-point rows [T, F]."""
    if rows is None:
        if per_shape.shape[0] != 1:
            raise DimensionError('Several conditions need a row index per point')
        return per_shape
    rows = np.asarray(rows)
    if rows.shape != (n_rows,):
        raise DimensionError('Row index has shape {}, expected ({},)'.format(rows.shape, n_rows))
    return per_shape.take(rows)


class CXLayer:
    """Conditional excitation e = alpha * sigmoid(W c), applied as e * x.

    W starts at zero, so with alpha = 2 the layer is the identity until
    training moves it.
    """

    def __init__(self, features, cond_dim=128, alpha=DEFAULT_ALPHA):
        self.W = Tensor(np.zeros((cond_dim, features)), requires_grad=True)
        self.alpha = float(alpha)

    @property
    def features(self):
        return self.W.shape[1]

    def excitation(self, c):
        c = _as_condition_batch(c, self.W.shape[0])
        return sigmoid(c @ self.W) * self.alpha


def cx_forward(x, c, layer, rows=None):
    x = as_tensor(x)
    if x.ndim != 2 or x.shape[1] != layer.features:
        raise DimensionError('CX expects [T, {}], got {}'.format(layer.features, x.shape))
    return x * _spread(layer.excitation(c), rows, x.shape[0])


class CBNLayer:
    """Batch norm whose scale and shift are linear maps of the condition vector."""

    def __init__(self, features, cond_dim=128):
        self.gamma_weight = Tensor(np.zeros((cond_dim, features)), requires_grad=True)
        self.gamma_bias = Tensor(np.ones(features), requires_grad=True)
        self.beta_weight = Tensor(np.zeros((cond_dim, features)), requires_grad=True)
        self.beta_bias = Tensor(np.zeros(features), requires_grad=True)
        self.stats = RunningStats(features)

    @property
    def features(self):
        return self.gamma_bias.shape[0]

    def modulation(self, c):
        c = _as_condition_batch(c, self.gamma_weight.shape[0])
        return c @ self.gamma_weight + self.gamma_bias, c @ self.beta_weight + self.beta_bias


def cbn_forward(x, c, layer, mode, rows=None):
    x = as_tensor(x)
    xhat = normalize(x, mode, layer.stats)
    gamma, beta = layer.modulation(c)
    return xhat * _spread(gamma, rows, x.shape[0]) + _spread(beta, rows, x.shape[0])
