import logging

import numpy as np

from ..exceptions import DimensionError
from ..numerics import TRAIN, RunningStats, Tensor, batch_norm, linear, relu, sigmoid
from .layers import DEFAULT_ALPHA, CBNLayer, CXLayer, cbn_forward, cx_forward

CX = 'cx'
CBN = 'cbn'
NONE = 'none'
CONDITIONING_MODES = (CX, CBN, NONE)

# keeps every output strictly inside (0, 1)
OUTPUT_EPSILON = 1e-15


class SubBlock:
    """batch norm -> conditioning -> ReLU -> per-point linear."""

    def __init__(self, features, out_features, conditioning_mode, cond_dim, alpha, rng, zero_init=False):
        self.conditioning_mode = conditioning_mode
        self.gamma = Tensor(np.ones(features), requires_grad=True)
        self.beta = Tensor(np.zeros(features), requires_grad=True)
        self.stats = RunningStats(features)
        self.cx = CXLayer(features, cond_dim, alpha) if conditioning_mode == CX else None
        self.cbn = CBNLayer(features, cond_dim) if conditioning_mode == CBN else None
        if zero_init:
            weight = np.zeros((features, out_features))
        else:
            weight = rng.normal(0.0, np.sqrt(2.0 / features), size=(features, out_features))
        self.W = Tensor(weight, requires_grad=True)
        self.b = Tensor(np.zeros(out_features), requires_grad=True)

    def named_parameters(self, prefix):
        named = {}
        if self.cbn is not None:
            named[prefix + '.cbn.gamma_weight'] = self.cbn.gamma_weight
            named[prefix + '.cbn.gamma_bias'] = self.cbn.gamma_bias
            named[prefix + '.cbn.beta_weight'] = self.cbn.beta_weight
            named[prefix + '.cbn.beta_bias'] = self.cbn.beta_bias
        else:
            named[prefix + '.bn.gamma'] = self.gamma
            named[prefix + '.bn.beta'] = self.beta
        if self.cx is not None:
            named[prefix + '.cx.W'] = self.cx.W
        named[prefix + '.linear.weight'] = self.W
        named[prefix + '.linear.bias'] = self.b
        return named

    def named_buffers(self, prefix):
        stats = self.cbn.stats if self.cbn is not None else self.stats
        return {prefix + '.bn': stats}

    def forward(self, h, c, mode, rows):
        if self.cbn is not None:
            h = cbn_forward(h, c, self.cbn, mode, rows)
        else:
            h = batch_norm(h, self.gamma, self.beta, mode, self.stats)
            if self.cx is not None:
                h = cx_forward(h, c, self.cx, rows)
        return linear(relu(h), self.W, self.b)


class ResBlock:
    def __init__(self, features, conditioning_mode, cond_dim, alpha, rng):
        self.first = SubBlock(features, features, conditioning_mode, cond_dim, alpha, rng)
        self.second = SubBlock(features, features, conditioning_mode, cond_dim, alpha, rng)

    def forward(self, h, c, mode, rows):
        return h + self.second.forward(self.first.forward(h, c, mode, rows), c, mode, rows)


class OccupancyModel:
    """Conditional implicit occupancy function f(x, y, z, c) -> [0, 1].

    Points are projected to `hidden` features by a per-point linear map (a
    kernel-1 1D convolution), pass through `n_blocks` residual blocks whose
    batch norms are conditioned by CX (or CBN), and a conditioned head maps
    each point to one logit. The head's final map starts at zero, so a fresh
    model predicts 0.5 everywhere.
    """

    def __init__(self, conditioning_mode=CX, n_blocks=5, hidden=128, cond_dim=128, alpha=DEFAULT_ALPHA, seed=0):
        if conditioning_mode not in CONDITIONING_MODES:
            raise ValueError('conditioning_mode must be one of {}, got {!r}'.format(CONDITIONING_MODES, conditioning_mode))
        rng = np.random.default_rng(seed)
        self.conditioning_mode = conditioning_mode
        self.n_blocks = n_blocks
        self.hidden = hidden
        self.cond_dim = cond_dim
        self.alpha = float(alpha)
        self.input_weight = Tensor(rng.normal(0.0, np.sqrt(1.0 / 3.0), size=(3, hidden)), requires_grad=True)
        self.input_bias = Tensor(np.zeros(hidden), requires_grad=True)
        self.blocks = [ResBlock(hidden, conditioning_mode, cond_dim, alpha, rng) for _ in range(n_blocks)]
        self.head = SubBlock(hidden, 1, conditioning_mode, cond_dim, alpha, rng, zero_init=True)

    def _sub_blocks(self):
        for i, block in enumerate(self.blocks):
            yield 'net.block{}.sub0'.format(i), block.first
            yield 'net.block{}.sub1'.format(i), block.second
        yield 'net.head', self.head

    def named_parameters(self):
        named = {'net.input_proj.weight': self.input_weight, 'net.input_proj.bias': self.input_bias}
        for prefix, sub in self._sub_blocks():
            named.update(sub.named_parameters(prefix))
        return named

    def parameters(self):
        return list(self.named_parameters().values())

    def named_buffers(self):
        buffers = {}
        for prefix, sub in self._sub_blocks():
            buffers.update(sub.named_buffers(prefix))
        return buffers

    def cx_layers(self):
        return [sub.cx for _, sub in self._sub_blocks() if sub.cx is not None]

    def logits(self, points, c, mode, rows=None):
        h = linear(points, self.input_weight, self.input_bias)
        for block in self.blocks:
            h = block.forward(h, c, mode, rows)
        return self.head.forward(h, c, mode, rows)


def model_forward(model, points, c, mode, rows=None):
    """Occupancy probabilities [T] for points [T, 3] under condition c.

    c is one condition [D] shared by every point, or [B, D] with `rows`
    naming each point's condition.
    """
    points = Tensor(points) if not isinstance(points, Tensor) else points
    if points.ndim != 2 or points.shape[1] != 3:
        raise DimensionError('points must be [T, 3], got {}'.format(points.shape))
    outside = np.abs(points.data).max() > 0.5 if points.size else False
    if outside:
        if mode == TRAIN:
            raise ValueError('Training points must lie inside [-0.5, 0.5]^3')
        logging.debug('Evaluating points outside the unit cube')
    logits = model.logits(points, c, mode, rows)
    return sigmoid(logits.reshape(points.shape[0])).clip(OUTPUT_EPSILON, 1.0 - OUTPUT_EPSILON)
