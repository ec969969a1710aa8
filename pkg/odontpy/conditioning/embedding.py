import numpy as np

from ..exceptions import DimensionError
from ..numerics import Tensor, as_tensor
from .classes import NUM_CLASSES, ToothClass

CONDITION_DIM = 128


class ClassEmbeddingTable:
    """One learnable row per tooth class, seeded N(0, 0.02^2)."""

    def __init__(self, dim=CONDITION_DIM, seed=0, std=0.02):
        rng = np.random.default_rng(seed)
        self.rows = Tensor(rng.normal(0.0, std, size=(NUM_CLASSES, dim)), requires_grad=True)

    @property
    def dim(self):
        return self.rows.shape[1]

    def parameters(self):
        return [self.rows]

    def named_parameters(self):
        return {'class_embedding.rows': self.rows}


def embed_class(table, tooth_class):
    """Row tooth_class.index - 1 of the table; gradients reach only that row."""
    index = ToothClass(tooth_class).index - 1
    return table.rows.take(np.array([index])).reshape(table.dim)


def embed_classes(table, classes):
    indices = np.array([ToothClass(c).index - 1 for c in classes], dtype=np.int64)
    return table.rows.take(indices)


def make_condition(class_vec, patch_vec):
    """Condition vector = class embedding + patch embedding."""
    class_vec, patch_vec = as_tensor(class_vec), as_tensor(patch_vec)
    if class_vec.shape != patch_vec.shape:
        raise DimensionError('class embedding {} and patch embedding {} differ in shape'.format(
            class_vec.shape, patch_vec.shape))
    return class_vec + patch_vec
