import logging
from dataclasses import asdict, dataclass

import numpy as np
import pandas as pd

from ..exceptions import ConfigError, DatasetError, DimensionError
from ..numerics import TRAIN, AdamState, adam_step, bce_loss
from .network import model_forward

ACCURACY_THRESHOLD = 0.5


@dataclass
class TrainConfig:
    """Training hyperparameters.

    Parameters
    ----------
    learning_rate : float
        Adam step size.
    batch_size : int
        Shapes per step.
    points_per_step : int
        Points subsampled from each shape's stored set per step.
    max_epochs : int
        Upper bound on epochs.
    patience : int
        Epochs without a validation improvement tolerated before stopping.
    rng_seed : int
        Seed of the shuffling and subsampling generator.
    epoch_steps : int
        Steps per epoch; 0 means one pass over the training shapes.
    max_steps : int
        Total step budget; 0 means unlimited.
    val_points : int
        Stored points per validation shape used for the accuracy.
    """
    learning_rate: float = 1e-4
    batch_size: int = 10
    points_per_step: int = 2048
    max_epochs: int = 250
    patience: int = 10
    rng_seed: int = 0
    epoch_steps: int = 0
    max_steps: int = 0
    val_points: int = 10000

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ConfigError('learning_rate must be positive, got {}'.format(self.learning_rate))
        for name in ('batch_size', 'points_per_step', 'max_epochs', 'val_points'):
            if getattr(self, name) < 1:
                raise ConfigError('{} must be at least 1, got {}'.format(name, getattr(self, name)))
        for name in ('patience', 'epoch_steps', 'max_steps'):
            if getattr(self, name) < 0:
                raise ConfigError('{} must not be negative, got {}'.format(name, getattr(self, name)))


class TrainBatch:
    """Points [B, P, 3] and labels [B, P] of B shapes, with each shape's class and patch."""

    def __init__(self, points, labels, classes, patches):
        self.points = np.asarray(points, dtype=np.float64)
        self.labels = np.asarray(labels, dtype=np.float64)
        self.classes = list(classes)
        self.patches = list(patches)
        if self.points.ndim != 3 or self.points.shape[2] != 3:
            raise DimensionError('batch points must be [B, P, 3], got {}'.format(self.points.shape))
        if self.labels.shape != self.points.shape[:2]:
            raise DimensionError('batch labels {} do not match points {}'.format(self.labels.shape, self.points.shape))
        if not len(self.classes) == len(self.patches) == self.points.shape[0]:
            raise DimensionError('batch needs one class and one patch per shape')

    @property
    def shapes(self):
        return self.points.shape[0]

    @classmethod
    def from_samples(cls, samples, rng, points_per_step):
        points, labels = [], []
        for sample in samples:
            chosen = rng.integers(0, sample.points.shape[0], size=points_per_step)
            points.append(sample.points[chosen])
            labels.append(sample.labels[chosen])
        return cls(np.stack(points), np.stack(labels),
                   [s.tooth_class for s in samples], [s.patch for s in samples])


def make_optimizer(reconstructor, learning_rate):
    return AdamState(reconstructor.parameters(), learning_rate=learning_rate)


def train_step(reconstructor, state, batch):
    """One optimisation step over a batch; returns the loss before the update."""
    params = reconstructor.parameters()
    c = reconstructor.conditioner.encode(batch.classes, batch.patches)
    shapes, per_shape = batch.labels.shape
    rows = np.repeat(np.arange(shapes), per_shape)
    p = model_forward(reconstructor.model, batch.points.reshape(-1, 3), c, TRAIN, rows=rows)
    loss = bce_loss(p, batch.labels.reshape(-1))
    for param in params:
        param.zero_grad()
    loss.backward()
    adam_step(params, [param.grad for param in params], state)
    return loss.item()


def validation_accuracy(reconstructor, samples, val_points=10000):
    """Fraction of stored points classified correctly at 0.5, pooled over shapes."""
    correct = 0
    total = 0
    for sample in samples:
        c = reconstructor.condition(sample.tooth_class, sample.patch)
        points = sample.points[:val_points]
        labels = sample.labels[:val_points]
        predicted = reconstructor.predict(points, c) > ACCURACY_THRESHOLD
        correct += int(np.count_nonzero(predicted == (labels > 0.5)))
        total += labels.shape[0]
    return correct / total if total else 0.0


def fit(reconstructor, dataset, config=None):
    """Train on dataset.train with early stopping on dataset.val.

    Returns the reconstructor holding its best-validation weights and a
    pandas DataFrame with one row per epoch.
    """
    config = config or TrainConfig()
    train = list(dataset.train)
    if not train:
        raise DatasetError('Training split is empty')
    val = list(dataset.val)
    if not val:
        logging.warning('No validation shapes, early stopping on the training shapes')
        val = train

    rng = np.random.default_rng(config.rng_seed)
    state = make_optimizer(reconstructor, config.learning_rate)
    shapes_per_step = min(config.batch_size, len(train))
    steps_per_epoch = config.epoch_steps or -(-len(train) // shapes_per_step)

    logging.info('---- Begin Training ----')
    logging.info('%d training shapes, %d validation shapes, %s', len(train), len(val), asdict(config))
    best_accuracy = -1.0
    best_state = None
    stale = 0
    steps = 0
    history = []
    for epoch in range(1, config.max_epochs + 1):
        order = rng.permutation(len(train))
        losses = []
        for s in range(steps_per_epoch):
            picked = order[(s * shapes_per_step + np.arange(shapes_per_step)) % len(train)]
            batch = TrainBatch.from_samples([train[i] for i in picked], rng, config.points_per_step)
            losses.append(train_step(reconstructor, state, batch))
            steps += 1
            if config.max_steps and steps >= config.max_steps:
                break
        accuracy = validation_accuracy(reconstructor, val, config.val_points)
        improved = accuracy > best_accuracy
        history.append({'epoch': epoch, 'steps': steps, 'train_loss': float(np.mean(losses)),
                        'val_accuracy': accuracy, 'improved': improved})
        logging.info('Epoch %d: loss %.6f, validation accuracy %.5f%s', epoch, np.mean(losses), accuracy,
                     ' (best)' if improved else '')
        if improved:
            best_accuracy = accuracy
            best_state = reconstructor.state_dict()
            stale = 0
        else:
            stale += 1
            if stale > config.patience:
                logging.info('Early stop after %d epochs without improvement', stale)
                break
        if config.max_steps and steps >= config.max_steps:
            logging.info('Step budget of %d reached', config.max_steps)
            break

    reconstructor.load_state_dict(best_state)
    logging.info('---- Training Finished: best validation accuracy %.5f ----', best_accuracy)
    return reconstructor, pd.DataFrame(history, columns=['epoch', 'steps', 'train_loss', 'val_accuracy', 'improved'])
