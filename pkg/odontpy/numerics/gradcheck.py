import numpy as np

from .tensor import Tensor


def grad_check(f, x, h=1e-3):
    """Compare reverse-mode gradients of scalar f at x with central differences.

    Returns max over coordinates of |analytic - numeric| / max(1, |analytic|).
    """
    base = np.array(x.data if isinstance(x, Tensor) else x, dtype=np.float64)
    variable = Tensor(base, requires_grad=True)
    f(variable).backward()
    analytic = variable.grad if variable.grad is not None else np.zeros_like(base)

    numeric = np.zeros_like(base)
    flat = numeric.reshape(-1)
    for i in range(base.size):
        shifted = base.copy().reshape(-1)
        shifted[i] += h
        upper = f(Tensor(shifted.reshape(base.shape))).item()
        shifted[i] -= 2.0 * h
        lower = f(Tensor(shifted.reshape(base.shape))).item()
        flat[i] = (upper - lower) / (2.0 * h)
    if base.size == 0:
        return 0.0
    return float(np.max(np.abs(analytic - numeric) / np.maximum(1.0, np.abs(analytic))))
