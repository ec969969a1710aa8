"""Marching cubes over a ScalarGrid.

Cube corners and edges follow Paul Bourke's numbering::

            z
            |
           v4 ----e4---- v5
           /|            /|
         e7 |          e5 |
         / e8          /  e9
       v7 ----e6---- v6   |
        |   |         |   |
        |  v0 ----e0--|- v1 --- x
       e11 /         e10 /
        | e3          | e1
        |/            |/
       v3 ----e2---- v2
       /
      y

A corner is inside when its value is strictly above iso. The triangle
table is built at import time from the cube faces: every face contributes
the segments that separate its inside corners from its outside ones, a
face with two diagonal inside corners cuts each inside corner off on its
own, and segments are oriented with the inside on their right seen from
outside. Neighbouring cells see the same segments on a shared face with
opposite orientation, so the surface is closed and consistently wound,
with face normals pointing from inside to outside.
"""
import logging

import numpy as np

from .grid import pad_grid
from .mesh import TriangleMesh

CORNERS = np.array([(0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
                    (0, 0, 1), (1, 0, 1), (1, 1, 1), (0, 1, 1)])
EDGES = ((0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4),
         (0, 4), (1, 5), (2, 6), (3, 7))
# corner cycle and outward normal of each cube face
FACES = (((0, 1, 2, 3), (0, 0, -1)),
         ((4, 5, 6, 7), (0, 0, 1)),
         ((0, 1, 5, 4), (0, -1, 0)),
         ((3, 2, 6, 7), (0, 1, 0)),
         ((0, 3, 7, 4), (-1, 0, 0)),
         ((1, 2, 6, 5), (1, 0, 0)))

_EDGE_INDEX = {frozenset(pair): e for e, pair in enumerate(EDGES)}
# lower corner offset and axis of each edge
EDGE_ORIGIN = np.array([np.minimum(CORNERS[a], CORNERS[b]) for a, b in EDGES])
EDGE_AXIS = np.array([int(np.nonzero(CORNERS[a] != CORNERS[b])[0][0]) for a, b in EDGES])
_MIDPOINTS = np.array([(CORNERS[a] + CORNERS[b]) / 2.0 for a, b in EDGES])


def _oriented(e0, e1, g, n):
    """Order the segment between edges e0, e1 so that (b - a) . (g x n) > 0."""
    direction = _MIDPOINTS[e1] - _MIDPOINTS[e0]
    return (e0, e1) if np.dot(direction, np.cross(g, n)) > 0 else (e1, e0)


def _face_segments(case, cycle, normal):
    inside = [bool(case >> corner & 1) for corner in cycle]
    edges = [_EDGE_INDEX[frozenset((cycle[k], cycle[(k + 1) % 4]))] for k in range(4)]
    crossing = [edges[k] for k in range(4) if inside[k] != inside[(k + 1) % 4]]
    if not crossing:
        return []
    n = np.asarray(normal, dtype=np.float64)
    if len(crossing) == 2:
        inner = CORNERS[[c for c, s in zip(cycle, inside) if s]].mean(axis=0)
        outer = CORNERS[[c for c, s in zip(cycle, inside) if not s]].mean(axis=0)
        return [_oriented(crossing[0], crossing[1], outer - inner, n)]
    segments = []
    for k in range(4):
        if inside[k]:
            before, after = edges[(k - 1) % 4], edges[k]
            g = (_MIDPOINTS[before] + _MIDPOINTS[after]) / 2.0 - CORNERS[cycle[k]]
            segments.append(_oriented(before, after, g, n))
    return segments


def _case_triangles(case):
    following = {}
    for cycle, normal in FACES:
        for start, end in _face_segments(case, cycle, normal):
            following[start] = end
    triangles = []
    while following:
        start = min(following)
        loop = [start]
        edge = following.pop(start)
        while edge != start:
            loop.append(edge)
            edge = following.pop(edge)
        for k in range(1, len(loop) - 1):
            triangles.append((loop[0], loop[k], loop[k + 1]))
    return triangles


def build_triangle_table():
    """[256, T_max, 3] table of local edge indices, padded with -1."""
    cases = [_case_triangles(case) for case in range(256)]
    width = max(len(t) for t in cases)
    table = -np.ones((256, width, 3), dtype=np.int64)
    for case, triangles in enumerate(cases):
        if triangles:
            table[case, :len(triangles)] = triangles
    return table


TRIANGLE_TABLE = build_triangle_table()


def cube_cases(values, iso):
    """Case index of every cell: bit k set when corner k is above iso."""
    inside = (values > iso).astype(np.int64)
    return (inside[:-1, :-1, :-1] << 0) + \
           (inside[1:, :-1, :-1] << 1) + \
           (inside[1:, 1:, :-1] << 2) + \
           (inside[:-1, 1:, :-1] << 3) + \
           (inside[:-1, :-1, 1:] << 4) + \
           (inside[1:, :-1, 1:] << 5) + \
           (inside[1:, 1:, 1:] << 6) + \
           (inside[:-1, 1:, 1:] << 7)


def marching_cubes(grid, iso=0.5):
    """Extract the iso-surface of a ScalarGrid as a TriangleMesh.

    Vertices lie on crossing lattice edges at the linearly interpolated
    iso position, mapped through the grid coordinates; each lattice edge
    yields one shared vertex. Cells are visited in C order, and vertices
    are ordered by lattice edge.
    """
    values = grid.values
    nx, ny, nz = values.shape
    cases = cube_cases(values, iso)
    cells = np.nonzero((cases != 0) & (cases != 255))
    if not len(cells[0]):
        logging.debug('No iso-crossing at %.4f', iso)
        return TriangleMesh()
    active = cases[cells]

    # global key of every local edge of every active cell
    origin = np.stack(cells, axis=1)[:, np.newaxis, :] + EDGE_ORIGIN[np.newaxis]
    edge_keys = ((origin[..., 0] * ny + origin[..., 1]) * nz + origin[..., 2]) * 3 + EDGE_AXIS[np.newaxis]

    local = TRIANGLE_TABLE[active]
    valid = local[:, :, 0] >= 0
    rows = np.broadcast_to(np.arange(len(active))[:, np.newaxis, np.newaxis], local.shape)
    face_keys = edge_keys[rows, np.maximum(local, 0)][valid]
    keys, faces = np.unique(face_keys.ravel(), return_inverse=True)
    faces = faces.reshape(-1, 3)

    axis = keys % 3
    lattice = keys // 3
    i, j, k = lattice // (ny * nz), (lattice // nz) % ny, lattice % nz
    step = np.stack([axis == 0, axis == 1, axis == 2], axis=1).astype(np.int64)
    v0 = values[i, j, k]
    v1 = values[i + step[:, 0], j + step[:, 1], k + step[:, 2]]
    t = (iso - v0) / (v1 - v0)

    coords = grid.coords
    vertices = np.stack([coords['x'][i], coords['y'][j], coords['z'][k]], axis=1)
    for a, (name, index) in enumerate((('x', i), ('y', j), ('z', k))):
        along = axis == a
        lower = coords[name][index[along]]
        upper = coords[name][index[along] + 1]
        vertices[along, a] = lower + t[along] * (upper - lower)
    logging.debug('Marching cubes: %d vertices, %d faces', len(vertices), len(faces))
    return TriangleMesh(vertices, faces)


def extract_mesh(grid, iso=0.5):
    """Zero-pad the grid, then run marching cubes; the result is closed."""
    return marching_cubes(pad_grid(grid), iso)
