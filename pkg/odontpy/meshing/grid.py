import logging

import numpy as np
import xarray as xr

from ..exceptions import DimensionError, NumericError
from ..model import model_forward
from ..model.reconstructor import EVAL_CHUNK
from ..numerics import EVAL, no_grad
from ..synth.voxel import AXES, VoxelGrid, grid_coordinates, lattice_points

DEFAULT_RESOLUTION = 128


class ScalarGrid:
    """Finite scalar field on a lattice with at least two points per axis."""

    def __init__(self, values, coords=None):
        values = np.asarray(values, dtype=np.float64)
        if values.ndim != 3 or min(values.shape) < 2:
            raise DimensionError('ScalarGrid needs at least 2 points per axis, got {}'.format(values.shape))
        if not np.all(np.isfinite(values)):
            raise NumericError('ScalarGrid values must be finite')
        coords = grid_coordinates(values.shape) if coords is None else coords
        self.data = xr.DataArray(values, dims=AXES, coords={axis: np.asarray(coords[axis], dtype=np.float64)
                                                             for axis in AXES})

    @property
    def dims(self):
        return self.data.shape

    @property
    def values(self):
        return self.data.values

    @property
    def coords(self):
        return {axis: self.data[axis].values for axis in AXES}


def _resolution_dims(resolution):
    dims = (resolution,) * 3 if np.isscalar(resolution) else tuple(resolution)
    if len(dims) != 3 or min(dims) < 2:
        raise DimensionError('resolution must be >= 2 per axis, got {}'.format(resolution))
    return tuple(int(n) for n in dims)


def eval_grid(model, c, resolution=DEFAULT_RESOLUTION, chunk=EVAL_CHUNK, padded=False):
    """Evaluate the occupancy model in eval mode at every lattice point.

    Points are fed in chunks of `chunk`; with frozen running statistics the
    result does not depend on the chunking. `padded=True` adds the zero
    layer marching cubes needs for closed surfaces.
    """
    model = getattr(model, 'model', model)
    coords = grid_coordinates(_resolution_dims(resolution))
    points = lattice_points(coords)
    values = np.empty(points.shape[0])
    with no_grad():
        for start in range(0, points.shape[0], chunk):
            stop = min(start + chunk, points.shape[0])
            values[start:stop] = model_forward(model, points[start:stop], c, EVAL).data
    grid = ScalarGrid(values.reshape(tuple(len(coords[a]) for a in AXES)), coords)
    logging.debug('Evaluated %s grid, values in [%.4f, %.4f]', grid.dims, values.min(), values.max())
    return pad_grid(grid) if padded else grid


def pad_grid(grid, value=0.0):
    """One extra layer of `value` on every side, coordinates extended by one spacing."""
    coords = {}
    for axis, c in grid.coords.items():
        coords[axis] = np.concatenate([[c[0] - (c[1] - c[0])], c, [c[-1] + (c[-1] - c[-2])]])
    return ScalarGrid(np.pad(grid.values, 1, mode='constant', constant_values=value), coords)


def rasterize_grid(grid, iso=0.5):
    """VoxelGrid of the lattice points whose value is strictly above iso."""
    return VoxelGrid(grid.values > iso, grid.coords)
