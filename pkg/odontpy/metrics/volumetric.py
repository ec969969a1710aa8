import numpy as np

from ..exceptions import DimensionError, MeshError


def _check_lattice(a, b):
    if not a.same_lattice(b):
        raise DimensionError('Grids differ: {} vs {}'.format(a.dims, b.dims))


def volumetric_iou(a, b):
    """|A and B| / |A or B| over cells; 1.0 when both grids are empty."""
    _check_lattice(a, b)
    union = np.count_nonzero(a.values | b.values)
    if union == 0:
        return 1.0
    return np.count_nonzero(a.values & b.values) / union


def volumetric_precision(d, g):
    """|D and G| / |D|: the share of the predicted volume inside the ground truth."""
    _check_lattice(d, g)
    predicted = np.count_nonzero(d.values)
    if predicted == 0:
        raise MeshError('Precision is undefined for an empty prediction')
    return np.count_nonzero(d.values & g.values) / predicted
