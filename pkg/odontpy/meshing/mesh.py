import numpy as np
import trimesh

from ..exceptions import DimensionError, MeshError

UNIT_TOLERANCE = 1e-6


class TriangleMesh:
    """Vertices [V, 3], faces [F, 3] of vertex indices and optional unit normals [V, 3]."""

    def __init__(self, vertices=None, faces=None, normals=None):
        self.vertices = np.zeros((0, 3)) if vertices is None else np.asarray(vertices, dtype=np.float64).reshape(-1, 3)
        self.faces = np.zeros((0, 3), dtype=np.int64) if faces is None else np.asarray(faces, dtype=np.int64).reshape(-1, 3)
        if self.faces.size:
            if self.faces.min() < 0 or self.faces.max() >= len(self.vertices):
                raise MeshError('Face index out of range for {} vertices'.format(len(self.vertices)))
            f = self.faces
            if np.any((f[:, 0] == f[:, 1]) | (f[:, 1] == f[:, 2]) | (f[:, 0] == f[:, 2])):
                raise MeshError('Degenerate face with a repeated vertex index')
        self.normals = None
        if normals is not None:
            normals = np.asarray(normals, dtype=np.float64).reshape(-1, 3)
            if normals.shape != self.vertices.shape:
                raise DimensionError('normals {} do not match vertices {}'.format(normals.shape, self.vertices.shape))
            if normals.size and np.max(np.abs(np.linalg.norm(normals, axis=1) - 1.0)) > UNIT_TOLERANCE:
                raise MeshError('Vertex normals must have unit length')
            self.normals = normals

    def __repr__(self):
        return 'TriangleMesh(V={}, F={})'.format(len(self.vertices), len(self.faces))

    @property
    def is_empty(self):
        return len(self.faces) == 0

    def face_normals(self):
        """Unnormalised face normals; their length is twice the face area."""
        v = self.vertices[self.faces]
        return np.cross(v[:, 1] - v[:, 0], v[:, 2] - v[:, 0])

    def face_areas(self):
        return 0.5 * np.linalg.norm(self.face_normals(), axis=1)

    def to_trimesh(self):
        """The same surface as a trimesh.Trimesh; vertex order and faces are kept as they are."""
        return trimesh.Trimesh(vertices=self.vertices, faces=self.faces, process=False)

    def flipped(self):
        return TriangleMesh(self.vertices, self.faces[:, ::-1])

    def transformed(self, rotation, translation):
        """Rigidly moved copy: v -> R v + t, normals rotated."""
        rotation = np.asarray(rotation, dtype=np.float64)
        vertices = self.vertices @ rotation.T + np.asarray(translation, dtype=np.float64)
        normals = None if self.normals is None else self.normals @ rotation.T
        return TriangleMesh(vertices, self.faces, normals)


def vertex_normals(mesh):
    """Area-weighted average of incident face normals, normalised; follows face winding."""
    if mesh.is_empty:
        raise MeshError('Cannot compute normals of an empty mesh')
    weighted = mesh.face_normals()
    accumulated = np.zeros_like(mesh.vertices)
    for corner in range(3):
        np.add.at(accumulated, mesh.faces[:, corner], weighted)
    used = np.zeros(len(mesh.vertices), dtype=bool)
    used[mesh.faces.ravel()] = True
    if not used.all():
        raise MeshError('Mesh has {} isolated vertices'.format(int(np.count_nonzero(~used))))
    length = np.linalg.norm(accumulated, axis=1)
    if np.any(length == 0.0):
        raise MeshError('{} vertices have no incident face area'.format(int(np.count_nonzero(length == 0.0))))
    return TriangleMesh(mesh.vertices, mesh.faces, accumulated / length[:, np.newaxis])


def boundary_edges(mesh):
    """Undirected edges not shared by exactly two faces, as [E, 2] sorted index pairs."""
    if mesh.is_empty:
        return np.zeros((0, 2), dtype=np.int64)
    f = mesh.faces
    edges = np.sort(np.concatenate([f[:, [0, 1]], f[:, [1, 2]], f[:, [2, 0]]]), axis=1)
    unique, counts = np.unique(edges, axis=0, return_counts=True)
    return unique[counts != 2]


def concatenate_meshes(meshes):
    vertices, faces = [], []
    offset = 0
    for mesh in meshes:
        vertices.append(mesh.vertices)
        faces.append(mesh.faces + offset)
        offset += len(mesh.vertices)
    if not vertices:
        return TriangleMesh()
    return TriangleMesh(np.concatenate(vertices), np.concatenate(faces))
