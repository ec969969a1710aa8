import numpy as np

from ..exceptions import DimensionError, NumericError


class AdamState:
    """Moment buffers and hyperparameters for Adam over a fixed parameter list."""

    def __init__(self, params, learning_rate=1e-4, beta1=0.9, beta2=0.999, epsilon=1e-8):
        self.step_count = 0
        self.m = [np.zeros_like(p.data) for p in params]
        self.v = [np.zeros_like(p.data) for p in params]
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.epsilon = epsilon


def adam_step(params, grads, state):
    """Apply one bias-corrected Adam update in place.

    Entries whose gradient is exactly zero keep their parameter value and
    moment buffers, so untouched embedding rows stay bit-identical.
    `None` in grads stands for an all-zero gradient.
    """
    if len(params) != len(grads) or len(params) != len(state.m):
        raise DimensionError('adam_step got {} params, {} grads, {} moment buffers'.format(
            len(params), len(grads), len(state.m)))
    state.step_count += 1
    t = state.step_count
    correction1 = 1.0 - state.beta1 ** t
    correction2 = 1.0 - state.beta2 ** t
    for p, g, m, v in zip(params, grads, state.m, state.v):
        if g is None:
            continue
        if g.shape != p.data.shape or m.shape != p.data.shape:
            raise DimensionError('gradient shape {} does not match parameter shape {}'.format(g.shape, p.data.shape))
        if not np.all(np.isfinite(g)):
            raise NumericError('Non-finite gradient for parameter of shape {}'.format(p.data.shape))
        touched = g != 0.0
        if not touched.any():
            continue
        gt = g[touched]
        m[touched] = state.beta1 * m[touched] + (1.0 - state.beta1) * gt
        v[touched] = state.beta2 * v[touched] + (1.0 - state.beta2) * gt * gt
        m_hat = m[touched] / correction1
        v_hat = v[touched] / correction2
        p.data[touched] -= state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)
