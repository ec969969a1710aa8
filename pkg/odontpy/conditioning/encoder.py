import numpy as np

from ..exceptions import DimensionError
from ..numerics import Tensor, conv2d, linear, relu
from .embedding import CONDITION_DIM, ClassEmbeddingTable, embed_classes, make_condition
from .patch import PATCH_SIZE, PatchImage


class PatchEncoder:
    """Four stride-2 3x3 conv stages (8, 16, 32, 64 channels), global average pool, linear map."""

    CHANNELS = (1, 8, 16, 32, 64)

    def __init__(self, embedding_dim=CONDITION_DIM, seed=0):
        rng = np.random.default_rng(seed)
        self.conv_weights = []
        self.conv_biases = []
        for c_in, c_out in zip(self.CHANNELS[:-1], self.CHANNELS[1:]):
            std = np.sqrt(2.0 / (c_in * 9))
            self.conv_weights.append(Tensor(rng.normal(0.0, std, size=(c_out, c_in, 3, 3)), requires_grad=True))
            self.conv_biases.append(Tensor(np.zeros(c_out), requires_grad=True))
        width = self.CHANNELS[-1]
        self.proj_weight = Tensor(rng.normal(0.0, np.sqrt(1.0 / width), size=(width, embedding_dim)), requires_grad=True)
        self.proj_bias = Tensor(np.zeros(embedding_dim), requires_grad=True)

    def named_parameters(self):
        named = {}
        for i, (w, b) in enumerate(zip(self.conv_weights, self.conv_biases)):
            named['encoder.conv{}.weight'.format(i)] = w
            named['encoder.conv{}.bias'.format(i)] = b
        named['encoder.proj.weight'] = self.proj_weight
        named['encoder.proj.bias'] = self.proj_bias
        return named

    def parameters(self):
        return list(self.named_parameters().values())

    def forward(self, patches):
        """patches: [B, 64, 64] array -> embeddings Tensor [B, D]."""
        patches = np.asarray(patches, dtype=np.float64)
        if patches.ndim != 3 or patches.shape[1:] != (PATCH_SIZE, PATCH_SIZE):
            raise DimensionError('Expected patches [B, {0}, {0}], got {1}'.format(PATCH_SIZE, patches.shape))
        x = Tensor(patches[:, np.newaxis])
        for w, b in zip(self.conv_weights, self.conv_biases):
            x = relu(conv2d(x, w, b, stride=2, padding=1))
        batch, channels, h, w = x.shape
        pooled = x.reshape(batch, channels, h * w).mean(axis=2)
        return linear(pooled, self.proj_weight, self.proj_bias)


def encode_patch(encoder, patch):
    """Embed one PatchImage into a single condition-sized vector."""
    if not isinstance(patch, PatchImage):
        patch = PatchImage(patch)
    return encoder.forward(patch.pixels[np.newaxis]).reshape(encoder.proj_bias.shape[0])


class ConditionEncoder:
    """Class embedding table plus patch encoder, fused by addition."""

    def __init__(self, dim=CONDITION_DIM, use_class_embedding=True, seed=0):
        self.use_class_embedding = use_class_embedding
        self.table = ClassEmbeddingTable(dim=dim, seed=seed)
        self.encoder = PatchEncoder(embedding_dim=dim, seed=seed + 1)

    @property
    def dim(self):
        return self.table.dim

    def named_parameters(self):
        named = dict(self.encoder.named_parameters())
        if self.use_class_embedding:
            named.update(self.table.named_parameters())
        return named

    def parameters(self):
        return list(self.named_parameters().values())

    def encode(self, classes, patches):
        """Condition vectors [B, D] for parallel lists of classes and [64,64] patches."""
        patch_vecs = self.encoder.forward(np.stack([getattr(p, 'pixels', p) for p in patches]))
        if not self.use_class_embedding:
            return patch_vecs
        return make_condition(embed_classes(self.table, classes), patch_vecs)
