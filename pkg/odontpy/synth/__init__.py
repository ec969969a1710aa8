from .oracle import ShapeOracle, EmptyOracle, BoxOracle, SphereOracle, UnionOracle
from .tooth import ToothSpec, CrownShape, RootCone, ToothShapeOracle, generate_tooth, root_count, FAMILY_DEFAULTS
from .voxel import VoxelGrid, voxelize, grid_coordinates, lattice_points, DEFAULT_DIMS
from .sampling import PointSampleSet, sample_points
from .render import render_projection, render_patch, tooth_patch
from .scene import make_scene, synthesize_scene, scene_slot
from .dataset import Dataset, Sample, dataset_build, load_dataset, single_shape_dataset, split_sizes

__all__ = ['oracle', 'tooth', 'voxel', 'sampling', 'render', 'scene', 'dataset']
