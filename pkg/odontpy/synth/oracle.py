import numpy as np

from ..exceptions import DimensionError

CUBE_HALF = 0.5


class ShapeOracle:
    """Analytic occupancy o(p) -> {0, 1}, zero everywhere outside [-0.5, 0.5]^3.

    Subclasses implement `_inside(points)` for points already known to lie
    in the cube.
    """

    def __call__(self, points):
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 3:
            raise DimensionError('oracle points must be [N, 3], got {}'.format(points.shape))
        in_cube = np.all(np.abs(points) <= CUBE_HALF, axis=1)
        occupancy = np.zeros(points.shape[0], dtype=np.uint8)
        if in_cube.any():
            occupancy[in_cube] = self._inside(points[in_cube])
        return occupancy

    def _inside(self, points):
        raise NotImplementedError


class EmptyOracle(ShapeOracle):
    def _inside(self, points):
        return np.zeros(points.shape[0], dtype=bool)


class BoxOracle(ShapeOracle):
    """Axis-aligned box; the default half-extent 0.5 fills the whole cube."""

    def __init__(self, half_extent=(CUBE_HALF, CUBE_HALF, CUBE_HALF), center=(0.0, 0.0, 0.0)):
        self.half_extent = np.asarray(half_extent, dtype=np.float64)
        self.center = np.asarray(center, dtype=np.float64)

    def _inside(self, points):
        return np.all(np.abs(points - self.center) <= self.half_extent, axis=1)


class SphereOracle(ShapeOracle):
    def __init__(self, radius, center=(0.0, 0.0, 0.0)):
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=np.float64)

    def _inside(self, points):
        return np.sum((points - self.center) ** 2, axis=1) <= self.radius ** 2


class UnionOracle(ShapeOracle):
    def __init__(self, parts):
        self.parts = list(parts)

    def _inside(self, points):
        inside = np.zeros(points.shape[0], dtype=bool)
        for part in self.parts:
            inside |= part(points).astype(bool)
        return inside
