import numpy as np
import xarray as xr

from ..exceptions import DimensionError

DEFAULT_DIMS = (144, 80, 80)
AXES = ('x', 'y', 'z')


def grid_coordinates(dims):
    """Cell-centre coordinates per axis, each spanning [-0.5, 0.5] with its ends included."""
    dims = tuple(int(n) for n in dims)
    if len(dims) != 3 or min(dims) < 1:
        raise DimensionError('grid dims must be three positive extents, got {}'.format(dims))
    return {axis: (np.linspace(-0.5, 0.5, n) if n > 1 else np.zeros(1)) for axis, n in zip(AXES, dims)}


def lattice_points(coords):
    """All lattice points as [nx*ny*nz, 3], x slowest, in C order."""
    xs, ys, zs = np.meshgrid(coords['x'], coords['y'], coords['z'], indexing='ij')
    return np.stack([xs.ravel(), ys.ravel(), zs.ravel()], axis=1)


class VoxelGrid:
    """Binary occupancy on a lattice, labelled with its x/y/z cell centres."""

    def __init__(self, values, coords=None):
        values = np.asarray(values).astype(bool)
        if values.ndim != 3:
            raise DimensionError('VoxelGrid values must be 3D, got {}'.format(values.shape))
        coords = grid_coordinates(values.shape) if coords is None else coords
        self.data = xr.DataArray(values, dims=AXES, coords={axis: np.asarray(coords[axis]) for axis in AXES})

    @property
    def dims(self):
        return self.data.shape

    @property
    def values(self):
        return self.data.values

    @property
    def coords(self):
        return {axis: self.data[axis].values for axis in AXES}

    def occupied(self):
        return int(np.count_nonzero(self.data.values))

    def fraction(self):
        return self.occupied() / self.data.size

    def same_lattice(self, other):
        return self.dims == other.dims and all(np.array_equal(self.data[a].values, other.data[a].values) for a in AXES)


def voxelize(oracle, dims=DEFAULT_DIMS):
    """Evaluate the oracle at every cell centre of a dims-shaped lattice."""
    coords = grid_coordinates(dims)
    values = oracle(lattice_points(coords)).reshape(tuple(len(coords[a]) for a in AXES))
    return VoxelGrid(values, coords)
