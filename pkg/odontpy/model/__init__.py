from .layers import CXLayer, CBNLayer, cx_forward, cbn_forward, DEFAULT_ALPHA
from .network import OccupancyModel, SubBlock, ResBlock, model_forward, CX, CBN, NONE, CONDITIONING_MODES
from .reconstructor import Reconstructor
from .train import TrainConfig, TrainBatch, train_step, fit, validation_accuracy, make_optimizer

__all__ = ['layers', 'network', 'reconstructor', 'train']
