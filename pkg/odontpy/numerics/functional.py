import numpy as np
from scipy.special import expit

from ..exceptions import DimensionError, LabelError
from .tensor import Tensor, as_tensor, is_grad_enabled

BN_EPSILON = 1e-5
BN_MOMENTUM = 0.1
PROBABILITY_CLAMP = 1e-7
ROW_BLOCK = 64

TRAIN = 'train'
EVAL = 'eval'


def _check_mode(mode):
    if mode not in (TRAIN, EVAL):
        raise ValueError("mode must be 'train' or 'eval', got {!r}".format(mode))


class RunningStats:
    """Per-feature running mean/variance kept by a batch-norm layer."""

    def __init__(self, features, momentum=BN_MOMENTUM, epsilon=BN_EPSILON):
        self.mean = np.zeros(features)
        self.var = np.ones(features)
        self.momentum = momentum
        self.epsilon = epsilon

    @property
    def features(self):
        return self.mean.shape[0]

    def update(self, batch_mean, batch_var):
        self.mean = (1.0 - self.momentum) * self.mean + self.momentum * batch_mean
        self.var = (1.0 - self.momentum) * self.var + self.momentum * batch_var

    def copy(self):
        other = RunningStats(self.features, self.momentum, self.epsilon)
        other.mean = self.mean.copy()
        other.var = self.var.copy()
        return other


def _row_blocked_matmul(x, W):
    """x @ W computed as products of exactly ROW_BLOCK rows, the last block zero-padded."""
    n = x.shape[0]
    padded = np.zeros((-(-n // ROW_BLOCK) * ROW_BLOCK, x.shape[1]))
    padded[:n] = x
    out = np.empty((padded.shape[0], W.shape[1]))
    for start in range(0, padded.shape[0], ROW_BLOCK):
        np.dot(padded[start:start + ROW_BLOCK], W, out=out[start:start + ROW_BLOCK])
    return out[:n]


def linear(x, W, b):
    """y = xW + b for x [B, F_in], W [F_in, F_out], b [F_out].

    Outside of gradient recording the product runs in fixed ROW_BLOCK-row
    blocks: evaluating points one at a time or all at once gives the same bits.
    """
    x, W, b = as_tensor(x), as_tensor(W), as_tensor(b)
    if x.ndim != 2 or W.ndim != 2 or b.ndim != 1:
        raise DimensionError('linear expects x [B,F_in], W [F_in,F_out], b [F_out]; got {}, {}, {}'.format(
            x.shape, W.shape, b.shape))
    if x.shape[1] != W.shape[0] or W.shape[1] != b.shape[0]:
        raise DimensionError('linear inner dimensions disagree: {}, {}, {}'.format(x.shape, W.shape, b.shape))
    if is_grad_enabled() and (x.requires_grad or W.requires_grad or b.requires_grad):
        return x @ W + b
    return Tensor(_row_blocked_matmul(x.data, W.data) + b.data)


def relu(x):
    x = as_tensor(x)
    active = x.data > 0
    return Tensor._result(np.where(active, x.data, 0.0), (x,), lambda g: ((x, g * active),))


def sigmoid(x):
    x = as_tensor(x)
    out = expit(x.data)
    return Tensor._result(out, (x,), lambda g: ((x, g * out * (1.0 - out)),))


def normalize(x, mode, stats):
    """Standardise each feature of x [B, F]; batch statistics in train mode, running ones in eval."""
    x = as_tensor(x)
    _check_mode(mode)
    if x.ndim != 2 or x.shape[1] != stats.features:
        raise DimensionError('normalize expects [B, {}], got {}'.format(stats.features, x.shape))
    batch = x.shape[0]
    if mode == TRAIN:
        if batch < 2:
            raise DimensionError('batch norm in train mode needs at least 2 rows, got {}'.format(batch))
        mean = x.data.mean(axis=0)
        var = x.data.var(axis=0)
        inv = 1.0 / np.sqrt(var + stats.epsilon)
        xhat = (x.data - mean) * inv
        stats.update(mean, var * batch / (batch - 1))

        def backward(g):
            gx = (inv / batch) * (batch * g - g.sum(axis=0) - xhat * (g * xhat).sum(axis=0))
            return ((x, gx),)
    else:
        inv = 1.0 / np.sqrt(stats.var + stats.epsilon)
        xhat = (x.data - stats.mean) * inv

        def backward(g):
            return ((x, g * inv),)
    return Tensor._result(xhat, (x,), backward)


def batch_norm(x, gamma, beta, mode, running_stats):
    return normalize(x, mode, running_stats) * as_tensor(gamma) + as_tensor(beta)


def bce_loss(p, t):
    """Mean binary cross-entropy of probabilities p against {0,1} labels t."""
    p = as_tensor(p)
    t = np.asarray(t, dtype=np.float64)
    if t.shape != p.shape:
        raise DimensionError('labels shape {} does not match predictions {}'.format(t.shape, p.shape))
    if not np.all((t == 0.0) | (t == 1.0)):
        raise LabelError('labels must be 0 or 1')
    clamped = p.clip(PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
    log_likelihood = clamped.log() * t + (1.0 - clamped).log() * (1.0 - t)
    return -log_likelihood.mean()


def im2col(x, kernel, stride, padding):
    """Unfold x [N, C, H, W] into rows of kernel patches [N*Ho*Wo, C*k*k]."""
    x = as_tensor(x)
    if x.ndim != 4:
        raise DimensionError('im2col expects [N, C, H, W], got {}'.format(x.shape))
    n, c, h, w = x.shape
    padded = np.pad(x.data, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    out_h = (h + 2 * padding - kernel) // stride + 1
    out_w = (w + 2 * padding - kernel) // stride + 1
    windows = np.lib.stride_tricks.sliding_window_view(padded, (kernel, kernel), axis=(2, 3))
    windows = windows[:, :, ::stride, ::stride][:, :, :out_h, :out_w]
    cols = windows.transpose(0, 2, 3, 1, 4, 5).reshape(n * out_h * out_w, c * kernel * kernel)

    def backward(g):
        g = g.reshape(n, out_h, out_w, c, kernel, kernel)
        full = np.zeros_like(padded)
        for ki in range(kernel):
            for kj in range(kernel):
                full[:, :, ki:ki + stride * out_h:stride, kj:kj + stride * out_w:stride] += \
                    g[:, :, :, :, ki, kj].transpose(0, 3, 1, 2)
        return ((x, full[:, :, padding:padding + h, padding:padding + w]),)
    return Tensor._result(np.ascontiguousarray(cols), (x,), backward), (out_h, out_w)


def conv2d(x, W, b, stride=1, padding=0):
    """2D convolution; W is [C_out, C_in, k, k], b is [C_out]."""
    x, W, b = as_tensor(x), as_tensor(W), as_tensor(b)
    if W.ndim != 4 or W.shape[2] != W.shape[3] or x.ndim != 4 or x.shape[1] != W.shape[1]:
        raise DimensionError('conv2d shapes disagree: x {}, W {}'.format(x.shape, W.shape))
    out_channels, in_channels, kernel, _ = W.shape
    cols, (out_h, out_w) = im2col(x, kernel, stride, padding)
    weight = W.reshape(out_channels, in_channels * kernel * kernel).T
    out = linear(cols, weight, b)
    return out.reshape(x.shape[0], out_h, out_w, out_channels).transpose(0, 3, 1, 2)
