import numpy as np

from ..conditioning import CONDITION_DIM, ConditionEncoder
from ..exceptions import CheckpointFormatError
from ..numerics import EVAL, no_grad
from .layers import DEFAULT_ALPHA
from .network import CONDITIONING_MODES, CX, OccupancyModel, model_forward

EVAL_CHUNK = 65536


class Reconstructor:
    """Everything that is trained together: the occupancy network and its conditioning."""

    def __init__(self, conditioning_mode=CX, use_class_embedding=True, alpha=DEFAULT_ALPHA, n_blocks=5,
                 hidden=128, cond_dim=CONDITION_DIM, seed=0):
        self.conditioner = ConditionEncoder(dim=cond_dim, use_class_embedding=use_class_embedding, seed=seed)
        self.model = OccupancyModel(conditioning_mode=conditioning_mode, n_blocks=n_blocks, hidden=hidden,
                                    cond_dim=cond_dim, alpha=alpha, seed=seed + 2)

    @property
    def conditioning_mode(self):
        return self.model.conditioning_mode

    @property
    def use_class_embedding(self):
        return self.conditioner.use_class_embedding

    def named_parameters(self):
        named = dict(self.conditioner.named_parameters())
        named.update(self.model.named_parameters())
        return named

    def parameters(self):
        return list(self.named_parameters().values())

    def zero_grad(self):
        for p in self.parameters():
            p.zero_grad()

    def meta(self):
        return {
            'meta.conditioning_mode': float(CONDITIONING_MODES.index(self.model.conditioning_mode)),
            'meta.use_class_embedding': float(self.conditioner.use_class_embedding),
            'meta.alpha': self.model.alpha,
            'meta.n_blocks': float(self.model.n_blocks),
            'meta.hidden': float(self.model.hidden),
            'meta.cond_dim': float(self.model.cond_dim),
        }

    def state_dict(self):
        """Copies of every parameter, running statistic and setting, keyed by name."""
        state = {name: p.data.copy() for name, p in self.named_parameters().items()}
        for name, stats in self.model.named_buffers().items():
            state[name + '.running_mean'] = stats.mean.copy()
            state[name + '.running_var'] = stats.var.copy()
        for name, value in self.meta().items():
            state[name] = np.array([value])
        return state

    def load_state_dict(self, state):
        params = self.named_parameters()
        buffers = self.model.named_buffers()
        expected = set(params) | set(self.meta())
        for name in buffers:
            expected.update((name + '.running_mean', name + '.running_var'))
        missing = expected - set(state)
        if missing:
            raise CheckpointFormatError('Missing tensors: {}'.format(', '.join(sorted(missing))))
        for name, p in params.items():
            value = np.asarray(state[name], dtype=np.float64)
            if value.shape != p.data.shape:
                raise CheckpointFormatError('Tensor {} has shape {}, expected {}'.format(name, value.shape, p.data.shape))
            p.data = value.copy()
            p.grad = None
        for name, stats in buffers.items():
            stats.mean = np.asarray(state[name + '.running_mean'], dtype=np.float64).copy()
            stats.var = np.asarray(state[name + '.running_var'], dtype=np.float64).copy()

    @classmethod
    def from_state_dict(cls, state):
        try:
            mode = CONDITIONING_MODES[int(state['meta.conditioning_mode'][0])]
            reconstructor = cls(conditioning_mode=mode,
                                use_class_embedding=bool(state['meta.use_class_embedding'][0]),
                                alpha=float(state['meta.alpha'][0]),
                                n_blocks=int(state['meta.n_blocks'][0]),
                                hidden=int(state['meta.hidden'][0]),
                                cond_dim=int(state['meta.cond_dim'][0]))
        except (KeyError, IndexError) as e:
            raise CheckpointFormatError('Checkpoint lacks model settings: {}'.format(e))
        reconstructor.load_state_dict(state)
        return reconstructor

    def condition(self, tooth_class, patch):
        """Condition vector [D] for one tooth, without recording gradients."""
        with no_grad():
            return self.conditioner.encode([tooth_class], [patch]).reshape(self.model.cond_dim)

    def predict(self, points, c, chunk=EVAL_CHUNK):
        """Eval-mode occupancy probabilities for many points, evaluated in chunks; any chunk gives the same bits."""
        points = np.asarray(points, dtype=np.float64)
        out = np.empty(points.shape[0])
        with no_grad():
            for start in range(0, points.shape[0], chunk):
                stop = min(start + chunk, points.shape[0])
                out[start:stop] = model_forward(self.model, points[start:stop], c, EVAL).data
        return out
