import logging

import numpy as np

from ..exceptions import MeshParseError
from .mesh import TriangleMesh

OBJ_DIGITS = 12


def export_mesh(mesh, path):
    """Write an ASCII OBJ ('v x y z' lines, then 'f i j k' with 1-based indices) through trimesh.

    A mesh without faces is written as a comment-only file.
    """
    if mesh.is_empty:
        with open(path, 'w') as f:
            f.write('# empty mesh\n')
    else:
        mesh.to_trimesh().export(path, file_type='obj', include_normals=False, include_color=False,
                                 include_texture=False, digits=OBJ_DIGITS)
    logging.info('Mesh with {} vertices and {} faces written to {}'.format(len(mesh.vertices), len(mesh.faces), path))


def _face_index(token, n_vertices, line_number):
    head = token.split('/')[0]
    try:
        index = int(head)
    except ValueError:
        raise MeshParseError(line_number, 'bad face index {!r}'.format(token))
    if index < 0:
        index += n_vertices + 1
    if not 1 <= index <= n_vertices:
        raise MeshParseError(line_number, 'face index {} out of range'.format(token))
    return index - 1


def import_mesh(path):
    """Read vertices and faces of an OBJ file; polygons are fan-triangulated."""
    vertices = []
    faces = []
    with open(path) as f:
        for line_number, line in enumerate(f, start=1):
            fields = line.split()
            if not fields or fields[0].startswith('#'):
                continue
            if fields[0] == 'v':
                if len(fields) < 4:
                    raise MeshParseError(line_number, 'vertex needs three coordinates')
                try:
                    vertices.append([float(x) for x in fields[1:4]])
                except ValueError:
                    raise MeshParseError(line_number, 'non-numeric vertex coordinate')
            elif fields[0] == 'f':
                if len(fields) < 4:
                    raise MeshParseError(line_number, 'face needs at least three vertices')
                polygon = [_face_index(token, len(vertices), line_number) for token in fields[1:]]
                if len(set(polygon)) != len(polygon):
                    raise MeshParseError(line_number, 'face repeats a vertex')
                for k in range(1, len(polygon) - 1):
                    faces.append((polygon[0], polygon[k], polygon[k + 1]))
            elif fields[0] in ('vn', 'vt', 'o', 'g', 's', 'mtllib', 'usemtl', 'l'):
                continue
            else:
                raise MeshParseError(line_number, 'unknown statement {!r}'.format(fields[0]))
    return TriangleMesh(np.array(vertices).reshape(-1, 3), np.array(faces, dtype=np.int64).reshape(-1, 3))
