import contextlib
import threading

import numpy as np

from ..exceptions import DimensionError, NumericError

_state = threading.local()


def is_grad_enabled():
    """Whether operations in the calling thread record the graph."""
    return getattr(_state, 'grad_enabled', True)


@contextlib.contextmanager
def no_grad():
    """Evaluate without recording the graph (frozen-parameter inference); affects the calling thread only."""
    previous = is_grad_enabled()
    _state.grad_enabled = False
    try:
        yield
    finally:
        _state.grad_enabled = previous


def _check_finite(data):
    if not np.all(np.isfinite(data)):
        raise NumericError('Non-finite value in tensor of shape {}'.format(data.shape))


def _unbroadcast(grad, shape):
    """Sum a broadcast gradient back down to `shape`."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def as_tensor(value):
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


class Tensor:
    """64-bit array with an optional gradient accumulator.

    Operations on tensors that require gradients record a closure which,
    given the gradient of the result, accumulates into the operands.
    `backward()` replays those closures in reverse topological order.
    """

    def __init__(self, data, requires_grad=False):
        data = np.array(data, dtype=np.float64)
        _check_finite(data)
        self.data = data
        self.grad = None
        self.requires_grad = bool(requires_grad)
        self._parents = ()
        self._backward = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    def __repr__(self):
        return 'Tensor(shape={}, requires_grad={})'.format(list(self.shape), self.requires_grad)

    def numpy(self):
        return self.data

    def item(self):
        return float(self.data.reshape(-1)[0]) if self.data.size == 1 else self.data

    def zero_grad(self):
        self.grad = None

    def detach(self):
        return Tensor(self.data)

    def _accumulate(self, grad):
        if not self.requires_grad:
            return
        if grad.shape != self.data.shape:
            raise DimensionError('Gradient shape {} does not match tensor shape {}'.format(grad.shape, self.data.shape))
        if self.grad is None:
            self.grad = np.array(grad, dtype=np.float64)
        else:
            self.grad += grad

    @staticmethod
    def _result(data, parents, backward):
        track = is_grad_enabled() and any(p.requires_grad for p in parents)
        out = Tensor(data, requires_grad=track)
        if track:
            out._parents = parents
            out._backward = backward
        return out

    def backward(self, grad=None):
        if grad is None:
            if self.data.size != 1:
                raise DimensionError('backward() without a gradient needs a scalar output')
            grad = np.ones_like(self.data)
        order = []
        visited = set()
        stack = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                order.append(node)
                continue
            if id(node) in visited:
                continue
            visited.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in visited:
                    stack.append((parent, False))
        grads = {id(self): np.array(grad, dtype=np.float64)}
        for node in reversed(order):
            g = grads.pop(id(node), None)
            if g is None:
                continue
            if node._backward is None:
                node._accumulate(g)
                continue
            for parent, parent_grad in node._backward(g):
                if not parent.requires_grad:
                    continue
                if parent._backward is None:
                    parent._accumulate(parent_grad)
                elif id(parent) in grads:
                    grads[id(parent)] = grads[id(parent)] + parent_grad
                else:
                    grads[id(parent)] = parent_grad

    # arithmetic

    def __add__(self, other):
        other = as_tensor(other)
        a, b = self, other

        def backward(g):
            return ((a, _unbroadcast(g, a.shape)), (b, _unbroadcast(g, b.shape)))
        return Tensor._result(a.data + b.data, (a, b), backward)

    __radd__ = __add__

    def __neg__(self):
        a = self
        return Tensor._result(-a.data, (a,), lambda g: ((a, -g),))

    def __sub__(self, other):
        return self + (-as_tensor(other))

    def __rsub__(self, other):
        return as_tensor(other) + (-self)

    def __mul__(self, other):
        other = as_tensor(other)
        a, b = self, other

        def backward(g):
            return ((a, _unbroadcast(g * b.data, a.shape)), (b, _unbroadcast(g * a.data, b.shape)))
        return Tensor._result(a.data * b.data, (a, b), backward)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = as_tensor(other)
        a, b = self, other

        def backward(g):
            return ((a, _unbroadcast(g / b.data, a.shape)),
                    (b, _unbroadcast(-g * a.data / (b.data * b.data), b.shape)))
        return Tensor._result(a.data / b.data, (a, b), backward)

    def __rtruediv__(self, other):
        return as_tensor(other) / self

    def __pow__(self, exponent):
        if isinstance(exponent, Tensor):
            raise TypeError('Only scalar exponents are supported')
        a = self
        out = a.data ** exponent
        return Tensor._result(out, (a,), lambda g: ((a, g * exponent * a.data ** (exponent - 1)),))

    def __matmul__(self, other):
        other = as_tensor(other)
        a, b = self, other
        if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
            raise DimensionError('Cannot multiply {} by {}'.format(a.shape, b.shape))

        def backward(g):
            return ((a, g @ b.data.T), (b, a.data.T @ g))
        return Tensor._result(a.data @ b.data, (a, b), backward)

    # reductions and reshaping

    def sum(self, axis=None, keepdims=False):
        a = self

        def backward(g):
            if axis is not None and not keepdims:
                g = np.expand_dims(g, axis)
            return ((a, np.broadcast_to(g, a.shape).copy()),)
        return Tensor._result(a.data.sum(axis=axis, keepdims=keepdims), (a,), backward)

    def mean(self, axis=None, keepdims=False):
        count = self.data.size if axis is None else self.data.shape[axis]
        return self.sum(axis=axis, keepdims=keepdims) * (1.0 / count)

    def reshape(self, *shape):
        a = self
        return Tensor._result(a.data.reshape(*shape), (a,), lambda g: ((a, g.reshape(a.shape)),))

    def transpose(self, *axes):
        a = self
        axes = axes or tuple(reversed(range(a.ndim)))
        inverse = np.argsort(axes)
        return Tensor._result(a.data.transpose(axes), (a,), lambda g: ((a, g.transpose(inverse)),))

    @property
    def T(self):
        return self.transpose()

    def take(self, indices):
        """Gather rows; repeated indices scatter-add in the backward pass."""
        a = self
        indices = np.asarray(indices, dtype=np.int64)

        def backward(g):
            full = np.zeros_like(a.data)
            np.add.at(full, indices, g)
            return ((a, full),)
        return Tensor._result(a.data[indices], (a,), backward)

    # elementwise functions

    def exp(self):
        a = self
        out = np.exp(a.data)
        return Tensor._result(out, (a,), lambda g: ((a, g * out),))

    def log(self):
        a = self
        return Tensor._result(np.log(a.data), (a,), lambda g: ((a, g / a.data),))

    def clip(self, low, high):
        a = self
        inside = (a.data >= low) & (a.data <= high)
        return Tensor._result(np.clip(a.data, low, high), (a,), lambda g: ((a, g * inside),))
