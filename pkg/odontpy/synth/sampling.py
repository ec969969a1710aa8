import numpy as np

from ..exceptions import DimensionError

DEFAULT_NUM_POINTS = 100000
SURFACE_NOISE = 0.01
BISECTION_STEPS = 24
MIN_CANDIDATES = 65536


class PointSampleSet:
    """Points in the unit cube with the oracle's occupancy at each of them."""

    def __init__(self, points, labels, seed=None):
        self.points = np.asarray(points, dtype=np.float64)
        self.labels = np.asarray(labels, dtype=np.uint8)
        self.seed = seed
        if self.points.ndim != 2 or self.points.shape[1] != 3 or self.labels.shape != (self.points.shape[0],):
            raise DimensionError('points {} and labels {} do not form a sample set'.format(
                self.points.shape, self.labels.shape))

    def __len__(self):
        return self.points.shape[0]

    def positive_fraction(self):
        return float(np.mean(self.labels)) if len(self) else 0.0


def _near_surface(oracle, n, rng):
    """n boundary points found by bisecting inside/outside pairs, jittered by SURFACE_NOISE.

    Returns None when the shape has no inside (or no outside) candidate.
    """
    candidates = rng.uniform(-0.5, 0.5, size=(max(8 * n, MIN_CANDIDATES), 3))
    inside = oracle(candidates).astype(bool)
    if not inside.any() or inside.all():
        return None
    a = candidates[inside][rng.integers(0, np.count_nonzero(inside), size=n)]
    b = candidates[~inside][rng.integers(0, np.count_nonzero(~inside), size=n)]
    # a stays inside and b outside, so the segment always straddles the surface
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (a + b)
        mid_inside = oracle(mid).astype(bool)[:, np.newaxis]
        a = np.where(mid_inside, mid, a)
        b = np.where(mid_inside, b, mid)
    surface = 0.5 * (a + b)
    return np.clip(surface + rng.normal(0.0, SURFACE_NOISE, size=surface.shape), -0.5, 0.5)


def sample_points(oracle, T=DEFAULT_NUM_POINTS, seed=0, surface_fraction=0.0):
    """T labelled points in [-0.5, 0.5]^3 from a seeded generator.

    Parameters
    ----------
    oracle : callable
        Maps [N, 3] points to inside (1) / outside (0) labels.
    T : int
        Number of points.
    seed : int
        Seed of the generator; the same seed gives the same points.
    surface_fraction : float
        Share of the points drawn close to the surface instead of uniformly.
        With 0 every point is uniform in the cube.

    Returns
    -------
    PointSampleSet
    """
    if T < 1:
        raise ValueError('T must be at least 1, got {}'.format(T))
    if not 0.0 <= surface_fraction <= 1.0:
        raise ValueError('surface_fraction must lie in [0, 1], got {}'.format(surface_fraction))
    rng = np.random.default_rng(seed)
    points = rng.uniform(-0.5, 0.5, size=(T, 3))
    n_surface = int(round(surface_fraction * T))
    if n_surface:
        surface = _near_surface(oracle, n_surface, rng)
        if surface is not None:
            points[T - n_surface:] = surface
    return PointSampleSet(points, oracle(points), seed)
