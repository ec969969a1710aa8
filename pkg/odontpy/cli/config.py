"""Run configuration: dataclass defaults, a flat key = value file, command-line overrides."""
from dataclasses import asdict, dataclass, fields, replace
from typing import Optional

from ..conditioning import ToothClass, parse_classes
from ..exceptions import ConfigError, InvalidClassError
from ..metrics import EvalConfig
from ..model import CONDITIONING_MODES, TrainConfig

_TRUE = ('true', 'yes', 'on', '1')
_FALSE = ('false', 'no', 'off', '0')


@dataclass
class RunConfig:
    dataset_dir: str = 'dataset'
    checkpoint: str = 'model.ocdt'
    output: Optional[str] = None
    seed: int = 0
    classes: str = '1-16'
    n_per_class: int = 20
    num_points: int = 100000
    surface_fraction: float = 0.0
    learning_rate: float = 1e-4
    batch_size: int = 10
    points_per_step: int = 2048
    max_epochs: int = 250
    patience: int = 10
    epoch_steps: int = 0
    max_steps: int = 0
    val_points: int = 10000
    conditioning: str = 'cx'
    use_class_embedding: bool = True
    alpha: float = 2.0
    n_blocks: int = 5
    hidden: int = 128
    resolution: int = 128
    iso: float = 0.5
    repetitions: int = 10
    surface_samples: int = 100000
    metric_seed: int = 0
    tooth_class: int = 1
    patch: Optional[str] = None
    ablation_seeds: str = '0,1,2'
    ablation_epochs: int = 30
    arch_width: float = 0.9
    arch_depth: float = 0.45
    arch_exponent: float = 0.8
    jaw_offset: float = 0.5
    scene_seed: int = 0
    overfit_one: bool = False
    ground_truth: bool = False

    def with_values(self, values):
        """Copy with raw (string or typed) values coerced to each field's type."""
        types = {f.name: f.type for f in fields(self)}
        coerced = {}
        for key, raw in values.items():
            if key not in types:
                raise ConfigError('Unknown configuration key {!r}'.format(key))
            coerced[key] = _coerce(key, types[key], raw)
        return replace(self, **coerced)

    @property
    def class_list(self):
        return parse_classes(self.classes)

    @property
    def ablation_seed_list(self):
        return [int(s) for s in self.ablation_seeds.split(',') if s.strip()]

    def validate(self):
        positive = ('n_per_class', 'num_points', 'batch_size', 'points_per_step', 'max_epochs', 'val_points',
                    'n_blocks', 'hidden', 'repetitions', 'surface_samples', 'ablation_epochs')
        for name in positive:
            if getattr(self, name) < 1:
                raise ConfigError('{} must be at least 1, got {}'.format(name, getattr(self, name)))
        for name in ('seed', 'patience', 'epoch_steps', 'max_steps', 'metric_seed', 'scene_seed', 'jaw_offset',
                     'alpha'):
            if getattr(self, name) < 0:
                raise ConfigError('{} must not be negative, got {}'.format(name, getattr(self, name)))
        for name in ('learning_rate', 'arch_width', 'arch_depth', 'arch_exponent'):
            if not getattr(self, name) > 0:
                raise ConfigError('{} must be positive, got {}'.format(name, getattr(self, name)))
        if self.conditioning not in CONDITIONING_MODES:
            raise ConfigError('conditioning must be one of {}, got {!r}'.format(CONDITIONING_MODES, self.conditioning))
        if self.resolution < 2:
            raise ConfigError('resolution must be at least 2, got {}'.format(self.resolution))
        if not 0.0 <= self.surface_fraction <= 1.0:
            raise ConfigError('surface_fraction must lie in [0, 1], got {}'.format(self.surface_fraction))
        if not 0.0 < self.iso < 1.0:
            raise ConfigError('iso must lie strictly between 0 and 1, got {}'.format(self.iso))
        try:
            ToothClass(self.tooth_class)
            if not self.class_list:
                raise ConfigError('classes selects no tooth class')
        except (InvalidClassError, ValueError) as e:
            raise ConfigError('Bad tooth class: {}'.format(e))
        try:
            seeds = self.ablation_seed_list
        except ValueError:
            raise ConfigError('ablation_seeds must be comma-separated integers, got {!r}'.format(self.ablation_seeds))
        if not seeds or min(seeds) < 0:
            raise ConfigError('ablation_seeds must list non-negative integers')
        return self

    def train_config(self, **overrides):
        config = TrainConfig(learning_rate=self.learning_rate, batch_size=self.batch_size,
                             points_per_step=self.points_per_step, max_epochs=self.max_epochs,
                             patience=self.patience, rng_seed=self.seed, epoch_steps=self.epoch_steps,
                             max_steps=self.max_steps, val_points=self.val_points)
        return replace(config, **overrides)

    def eval_config(self):
        return EvalConfig(resolution=self.resolution, iso=self.iso, repetitions=self.repetitions,
                          surface_samples=self.surface_samples, seed=self.metric_seed)

    def as_dict(self):
        return asdict(self)


def _coerce(key, kind, raw):
    if not isinstance(raw, str):
        return raw
    text = raw.strip()
    try:
        if kind is bool:
            if text.lower() in _TRUE:
                return True
            if text.lower() in _FALSE:
                return False
            raise ValueError(text)
        if kind is int:
            return int(text)
        if kind is float:
            return float(text)
    except ValueError:
        raise ConfigError('Bad value {!r} for {} ({})'.format(raw, key, kind.__name__))
    if kind == Optional[str] and text.lower() in ('', 'none'):
        return None
    return text


def read_config_file(path):
    """Parse `key = value` lines; '#' starts a comment, blank lines are skipped."""
    values = {}
    with open(path) as f:
        for line_number, line in enumerate(f, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise ConfigError('{} line {}: expected key = value'.format(path, line_number))
            key, value = (part.strip() for part in line.split('=', 1))
            if key in values:
                raise ConfigError('{} line {}: {} set twice'.format(path, line_number, key))
            values[key] = value
    return values


def load_config(path=None, overrides=None):
    """Defaults, then the config file, then overrides; validated before returning."""
    config = RunConfig()
    if path is not None:
        try:
            config = config.with_values(read_config_file(path))
        except OSError as e:
            raise ConfigError('Cannot read config file {}: {}'.format(path, e))
    if overrides:
        config = config.with_values(overrides)
    return config.validate()
