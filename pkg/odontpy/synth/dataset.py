import json
import logging
import os

import numpy as np

from ..conditioning import PatchImage, ToothClass, write_pgm
from ..exceptions import DatasetError
from ..tensorfile import read_tensors, write_tensors
from .render import tooth_patch
from .sampling import DEFAULT_NUM_POINTS, PointSampleSet, sample_points
from .tooth import generate_tooth

MANIFEST_NAME = 'manifest.json'
MANIFEST_FORMAT = 1
VAL_FRACTION = 0.05
TEST_FRACTION = 0.18
SPLIT_POLICY = 'val = floor(0.05 n + 0.5), test = floor(0.18 n + 0.5), train = rest, over a seeded permutation'

TRAIN_SPLIT = 'train'
VAL_SPLIT = 'val'
TEST_SPLIT = 'test'
OVERFIT_SURFACE_FRACTION = 0.5


def split_sizes(n):
    """(train, val, test) shape counts for n shapes."""
    n_val = int(np.floor(VAL_FRACTION * n + 0.5))
    n_test = int(np.floor(TEST_FRACTION * n + 0.5))
    return n - n_val - n_test, n_val, n_test


class Sample:
    """One stored shape; arrays are read from disk on first use and kept."""

    def __init__(self, root, entry):
        self.root = root
        self.entry = entry
        self._arrays = None

    @property
    def sample_id(self):
        return self.entry['id']

    @property
    def tooth_class(self):
        return self.entry['class']

    @property
    def seed(self):
        return self.entry['seed']

    @property
    def split(self):
        return self.entry['split']

    def _load(self):
        if self._arrays is None:
            path = os.path.join(self.root, self.entry['tensor_file'])
            tensors = read_tensors(path)
            try:
                self._arrays = (tensors['points'].astype(np.float32), tensors['labels'].astype(np.uint8),
                                PatchImage(tensors['patch']))
            except KeyError as e:
                raise DatasetError('{} lacks tensor {}'.format(path, e))
        return self._arrays

    @property
    def points(self):
        return self._load()[0]

    @property
    def labels(self):
        return self._load()[1]

    @property
    def patch(self):
        return self._load()[2]

    def sample_set(self):
        return PointSampleSet(self.points, self.labels, self.seed)

    def generate(self):
        """Regenerate (ToothSpec, oracle) from the stored class and seed."""
        return generate_tooth(self.tooth_class, self.seed)


class Dataset:
    def __init__(self, root, manifest):
        self.root = root
        self.manifest = manifest
        self.samples = [Sample(root, entry) for entry in manifest['samples']]

    def __len__(self):
        return len(self.samples)

    def split(self, name):
        return [s for s in self.samples if s.split == name]

    @property
    def train(self):
        return self.split(TRAIN_SPLIT)

    @property
    def val(self):
        return self.split(VAL_SPLIT)

    @property
    def test(self):
        return self.split(TEST_SPLIT)


def manifest_text(manifest):
    return json.dumps(manifest, indent=2, sort_keys=True) + '\n'


def dataset_build(output_dir, n_per_class=20, classes=range(1, 17), seed=0, num_points=DEFAULT_NUM_POINTS,
                  surface_fraction=0.0):
    """Generate, split and persist a synthetic tooth corpus.

    Parameters
    ----------
    output_dir : str
        Directory receiving the manifest, one .ocdt tensor file and one PGM
        patch per shape. Created if missing.
    n_per_class : int
        Shapes per tooth class.
    classes : iterable of int
        Tooth classes to generate.
    seed : int
        Master seed; every shape seed and the split permutation derive from it.
    num_points : int
        Labelled points stored per shape.
    surface_fraction : float
        Share of those points drawn close to the surface; 0 keeps them uniform.

    Returns
    -------
    Dataset
    """
    if n_per_class < 1:
        raise ValueError('n_per_class must be at least 1, got {}'.format(n_per_class))
    classes = [ToothClass(c).index for c in classes]
    if not classes:
        raise ValueError('No tooth classes to generate')
    os.makedirs(output_dir, exist_ok=True)

    rng = np.random.default_rng(seed)
    plan = [(c, k, int(rng.integers(0, 2 ** 31 - 1))) for c in classes for k in range(n_per_class)]
    n_train, n_val, n_test = split_sizes(len(plan))
    splits = np.empty(len(plan), dtype=object)
    order = rng.permutation(len(plan))
    splits[order[:n_train]] = TRAIN_SPLIT
    splits[order[n_train:n_train + n_val]] = VAL_SPLIT
    splits[order[n_train + n_val:]] = TEST_SPLIT

    logging.info('---- Begin Dataset Build ----')
    logging.info('%d shapes over classes %s: %d train, %d val, %d test', len(plan), classes, n_train, n_val, n_test)
    entries = []
    for (tooth_class, k, sample_seed), split in zip(plan, splits):
        sample_id = 'c{:02d}_{:03d}'.format(tooth_class, k)
        spec, oracle = generate_tooth(tooth_class, sample_seed)
        # labels follow the stored 32-bit points so re-evaluation reproduces them
        points = sample_points(oracle, num_points, sample_seed, surface_fraction).points
        points = points.astype(np.float32).astype(np.float64)
        labels = oracle(points)
        patch = tooth_patch(oracle)
        tensor_file = sample_id + '.ocdt'
        pgm_file = sample_id + '.pgm'
        write_tensors(os.path.join(output_dir, tensor_file), {'points': points, 'labels': labels, 'patch': patch.pixels})
        write_pgm(os.path.join(output_dir, pgm_file), patch)
        entries.append({'id': sample_id, 'class': tooth_class, 'seed': sample_seed, 'split': split,
                        'tensor_file': tensor_file, 'pgm_file': pgm_file,
                        'root_count': len(spec.roots)})
        logging.debug('Sample %s (%s), %.4f occupied', sample_id, split, float(np.mean(labels)))

    manifest = {
        'format': MANIFEST_FORMAT,
        'seed': int(seed),
        'classes': classes,
        'n_per_class': int(n_per_class),
        'num_points': int(num_points),
        'surface_fraction': float(surface_fraction),
        'split_policy': SPLIT_POLICY,
        'split_sizes': {TRAIN_SPLIT: n_train, VAL_SPLIT: n_val, TEST_SPLIT: n_test},
        'samples': entries,
    }
    with open(os.path.join(output_dir, MANIFEST_NAME), 'w') as f:
        f.write(manifest_text(manifest))
    logging.info('---- Dataset Written to %s ----', output_dir)
    return Dataset(output_dir, manifest)


def load_dataset(path):
    manifest_path = os.path.join(path, MANIFEST_NAME)
    if not os.path.isfile(manifest_path):
        raise DatasetError('No dataset manifest at {}'.format(manifest_path))
    with open(manifest_path) as f:
        try:
            manifest = json.load(f)
        except ValueError as e:
            raise DatasetError('Unreadable manifest {}: {}'.format(manifest_path, e))
    if manifest.get('format') != MANIFEST_FORMAT or 'samples' not in manifest:
        raise DatasetError('Unsupported manifest format in {}'.format(manifest_path))
    if not manifest['samples']:
        raise DatasetError('Dataset at {} is empty'.format(path))
    return Dataset(path, manifest)


def single_shape_dataset(tooth_class, seed, num_points=DEFAULT_NUM_POINTS, surface_fraction=OVERFIT_SURFACE_FRACTION):
    """In-memory one-shape dataset for overfitting runs; half its points lie near the surface by default."""
    spec, oracle = generate_tooth(tooth_class, seed)
    sample = _MemorySample(tooth_class, seed, sample_points(oracle, num_points, seed, surface_fraction),
                           tooth_patch(oracle))
    return _MemoryDataset([sample])


class _MemorySample:
    def __init__(self, tooth_class, seed, sample_set, patch):
        self.tooth_class = ToothClass(tooth_class).index
        self.seed = seed
        self.points = sample_set.points
        self.labels = sample_set.labels
        self.patch = patch
        self.split = TRAIN_SPLIT
        self.sample_id = 'c{:02d}_mem'.format(self.tooth_class)

    def generate(self):
        return generate_tooth(self.tooth_class, self.seed)


class _MemoryDataset:
    def __init__(self, samples):
        self.samples = samples
        self.train = samples
        self.val = []
        self.test = []

    def __len__(self):
        return len(self.samples)
