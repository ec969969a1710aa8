from .grid import ScalarGrid, eval_grid, pad_grid, rasterize_grid, DEFAULT_RESOLUTION
from .mesh import TriangleMesh, vertex_normals, boundary_edges, concatenate_meshes
from .marching import marching_cubes, extract_mesh, TRIANGLE_TABLE
from .obj import export_mesh, import_mesh

__all__ = ['grid', 'mesh', 'marching', 'obj']
