from .tensor import Tensor, no_grad, is_grad_enabled, as_tensor
from .functional import (linear, relu, sigmoid, normalize, batch_norm, bce_loss, conv2d, im2col,
                         RunningStats, TRAIN, EVAL)
from .optim import AdamState, adam_step
from .gradcheck import grad_check

__all__ = ['tensor', 'functional', 'optim', 'gradcheck']
