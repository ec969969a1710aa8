import numpy as np
import trimesh.sample
from scipy.spatial import cKDTree

from ..exceptions import DimensionError, MeshError

UNIT_TOLERANCE = 1e-6


class SurfaceSamples:
    """Points on a mesh surface with the unit normal of the face each came from."""

    def __init__(self, points, normals, mesh_id=None):
        self.points = np.asarray(points, dtype=np.float64)
        self.normals = np.asarray(normals, dtype=np.float64)
        self.mesh_id = mesh_id
        if self.points.ndim != 2 or self.points.shape[1] != 3 or self.normals.shape != self.points.shape:
            raise DimensionError('points {} and normals {} must both be [n, 3]'.format(
                self.points.shape, self.normals.shape))
        if len(self.points) == 0:
            raise MeshError('Surface sample set is empty')

    def __len__(self):
        return len(self.points)

    def check_unit_normals(self):
        deviation = np.max(np.abs(np.linalg.norm(self.normals, axis=1) - 1.0))
        if deviation > UNIT_TOLERANCE:
            raise MeshError('Normals of {} deviate from unit length by {:.3g}'.format(self.mesh_id, deviation))


def sample_surface(mesh, n, seed=0, mesh_id=None):
    """n area-weighted surface samples, each with the unit normal of the face it lies on.

    The seed goes to trimesh's generator, so equal seeds on equal meshes give
    equal samples.
    """
    if mesh.is_empty:
        raise MeshError('Cannot sample the surface of a mesh without faces')
    surface = mesh.to_trimesh()
    if not surface.area > 0:
        raise MeshError('Mesh has zero surface area')
    points, index = trimesh.sample.sample_surface(surface, n, seed=seed)
    return SurfaceSamples(points, surface.face_normals[index], mesh_id)


def _as_samples(s):
    if isinstance(s, SurfaceSamples):
        return s
    return SurfaceSamples(s, np.tile([0.0, 0.0, 1.0], (len(s), 1)))


def chamfer_l1(p, q):
    """Half the mean nearest-neighbour distance from P to Q plus half that from Q to P."""
    p, q = _as_samples(p), _as_samples(q)
    d_pq, _ = cKDTree(q.points).query(p.points)
    d_qp, _ = cKDTree(p.points).query(q.points)
    return 0.5 * float(np.mean(d_pq)) + 0.5 * float(np.mean(d_qp))


def normal_consistency(p, q):
    """Symmetric mean |n_p . n_nn(p)| between nearest neighbours of P and Q."""
    p.check_unit_normals()
    q.check_unit_normals()
    _, idx_pq = cKDTree(q.points).query(p.points)
    _, idx_qp = cKDTree(p.points).query(q.points)
    consist_p = np.mean(np.abs(np.sum(p.normals * q.normals[idx_pq], axis=1)))
    consist_q = np.mean(np.abs(np.sum(q.normals * p.normals[idx_qp], axis=1)))
    return 0.5 * float(consist_p) + 0.5 * float(consist_q)


def _brute_nearest(a, b):
    distances = np.linalg.norm(a[:, np.newaxis, :] - b[np.newaxis, :, :], axis=2)
    idx = np.argmin(distances, axis=1)
    return distances[np.arange(len(a)), idx], idx


def chamfer_l1_brute(p, q):
    """Exhaustive O(|P||Q|) reference for chamfer_l1."""
    p, q = _as_samples(p), _as_samples(q)
    d_pq, _ = _brute_nearest(p.points, q.points)
    d_qp, _ = _brute_nearest(q.points, p.points)
    return 0.5 * float(np.mean(d_pq)) + 0.5 * float(np.mean(d_qp))


def normal_consistency_brute(p, q):
    p.check_unit_normals()
    q.check_unit_normals()
    _, idx_pq = _brute_nearest(p.points, q.points)
    _, idx_qp = _brute_nearest(q.points, p.points)
    consist_p = np.mean(np.abs(np.sum(p.normals * q.normals[idx_pq], axis=1)))
    consist_q = np.mean(np.abs(np.sum(q.normals * p.normals[idx_qp], axis=1)))
    return 0.5 * float(consist_p) + 0.5 * float(consist_q)
