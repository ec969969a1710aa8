import unittest

import numpy as np
import trimesh.sample
from numpy.testing import assert_allclose

from odontpy.exceptions import DimensionError, MeshError
from odontpy.meshing import TriangleMesh
from odontpy.metrics import (EvalConfig, SurfaceSamples, chamfer_l1, chamfer_l1_brute, evaluate_reconstruction,
                             normal_consistency, normal_consistency_brute, pool_reports, report_table,
                             sample_surface, summarize, volumetric_iou, volumetric_precision)
from odontpy.model import CX, OccupancyModel
from odontpy.numerics import Tensor
from odontpy.synth import SphereOracle, VoxelGrid


class _OracleModel:
    """Occupancy model that returns saturated logits of an analytic shape."""

    def __init__(self, oracle):
        self.oracle = oracle

    def logits(self, points, c, mode, rows=None):
        inside = self.oracle(points.data).astype(np.float64)
        return Tensor((2.0 * inside - 1.0)[:, np.newaxis] * 20.0)


def _grid(cells, dims=(2, 2, 2)):
    values = np.zeros(dims, dtype=bool)
    for cell in cells:
        values[cell] = True
    return VoxelGrid(values)


def _plane(z, normal, n=50, seed=0):
    rng = np.random.default_rng(seed)
    points = np.column_stack([rng.random(n), rng.random(n), np.full(n, z)])
    return SurfaceSamples(points, np.tile(normal, (n, 1)))


class test_volumetric(unittest.TestCase):
    def test_iou(self):
        a = _grid([(0, 0, 0), (1, 0, 0)])
        self.assertEqual(volumetric_iou(a, a), 1.0)
        self.assertEqual(volumetric_iou(a, _grid([(1, 1, 1)])), 0.0)
        self.assertEqual(volumetric_iou(a, _grid([(0, 0, 0)])), 0.5)
        self.assertEqual(volumetric_iou(_grid([]), _grid([])), 1.0)

    def test_precision(self):
        d = _grid([(0, 0, 0), (1, 0, 0)])
        self.assertEqual(volumetric_precision(d, d), 1.0)
        self.assertEqual(volumetric_precision(_grid([(0, 0, 0)]), d), 1.0)
        self.assertEqual(volumetric_precision(d, _grid([(0, 0, 0)])), 0.5)
        with self.assertRaises(MeshError):
            volumetric_precision(_grid([]), d)

    def test_lattice_mismatch(self):
        with self.assertRaises(DimensionError):
            volumetric_iou(_grid([]), _grid([], (2, 2, 3)))

    def test_matches_set_counting(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            a = rng.random((16, 16, 16)) > 0.6
            b = rng.random((16, 16, 16)) > 0.4
            cells_a = set(zip(*np.nonzero(a)))
            cells_b = set(zip(*np.nonzero(b)))
            self.assertEqual(volumetric_iou(VoxelGrid(a), VoxelGrid(b)),
                             len(cells_a & cells_b) / len(cells_a | cells_b))
            self.assertEqual(volumetric_precision(VoxelGrid(a), VoxelGrid(b)), len(cells_a & cells_b) / len(cells_a))


class test_sample_surface(unittest.TestCase):
    def test_single_triangle(self):
        mesh = TriangleMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
        samples = sample_surface(mesh, 1000, seed=0)
        x, y = samples.points[:, 0], samples.points[:, 1]
        self.assertTrue(np.all((x >= 0) & (y >= 0) & (x + y <= 1.0 + 1e-12)))
        assert_allclose(samples.normals, np.tile([0.0, 0.0, 1.0], (1000, 1)))

    def test_area_weighting(self):
        mesh = TriangleMesh([[0, 0, 0], [3, 0, 0], [0, 1, 0], [10, 0, 0], [11, 0, 0], [10, 1, 0]],
                            [[0, 1, 2], [3, 4, 5]])
        samples = sample_surface(mesh, 40000, seed=1)
        large = np.count_nonzero(samples.points[:, 0] < 5.0)
        stderr = np.sqrt(40000 * 0.75 * 0.25)
        self.assertLess(abs(large - 30000), 3 * stderr)

    def test_seeded(self):
        mesh = TriangleMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0]], [[0, 1, 2]])
        self.assertTrue(np.array_equal(sample_surface(mesh, 10, seed=4).points, sample_surface(mesh, 10, seed=4).points))

    def test_empty_mesh(self):
        with self.assertRaises(MeshError):
            sample_surface(TriangleMesh(), 10)

    def test_matches_trimesh_sampler(self):
        mesh = TriangleMesh([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
                            [[0, 2, 1], [0, 1, 3], [0, 3, 2], [1, 2, 3]])
        samples = sample_surface(mesh, 500, seed=5)
        points, index = trimesh.sample.sample_surface(mesh.to_trimesh(), 500, seed=5)
        assert_allclose(samples.points, points)
        normals = mesh.face_normals()[index]
        assert_allclose(samples.normals, normals / np.linalg.norm(normals, axis=1)[:, np.newaxis])


class test_chamfer(unittest.TestCase):
    def test_examples(self):
        p = np.random.default_rng(0).random((20, 3))
        self.assertEqual(chamfer_l1(p, p), 0.0)
        self.assertEqual(chamfer_l1(np.array([[0.0, 0, 0]]), np.array([[1.0, 0, 0]])), 1.0)
        self.assertEqual(chamfer_l1(np.array([[0.0, 0, 0], [2.0, 0, 0]]), np.array([[1.0, 0, 0]])), 1.0)

    def test_matches_brute_force(self):
        for seed in range(20):
            rng = np.random.default_rng(seed)
            normals_p = rng.normal(size=(200, 3))
            normals_q = rng.normal(size=(200, 3))
            p = SurfaceSamples(rng.random((200, 3)), normals_p / np.linalg.norm(normals_p, axis=1)[:, np.newaxis])
            q = SurfaceSamples(rng.random((200, 3)), normals_q / np.linalg.norm(normals_q, axis=1)[:, np.newaxis])
            self.assertLess(abs(chamfer_l1(p, q) - chamfer_l1_brute(p, q)), 1e-9)
            self.assertLess(abs(normal_consistency(p, q) - normal_consistency_brute(p, q)), 1e-9)


class test_normal_consistency(unittest.TestCase):
    def test_examples(self):
        p = _plane(0.0, [0.0, 0.0, 1.0])
        self.assertAlmostEqual(normal_consistency(p, p), 1.0, places=12)
        self.assertAlmostEqual(normal_consistency(p, _plane(0.5, [0.0, 0.0, -1.0], seed=1)), 1.0, places=12)
        self.assertEqual(normal_consistency(p, _plane(0.5, [1.0, 0.0, 0.0], seed=1)), 0.0)

    def test_unit_normals_required(self):
        with self.assertRaises(MeshError):
            normal_consistency(_plane(0.0, [0.0, 0.0, 2.0]), _plane(0.0, [0.0, 0.0, 1.0]))


class test_evaluate(unittest.TestCase):
    def setUp(self):
        self.config = EvalConfig(resolution=24, iso=0.5, repetitions=2, surface_samples=2000, seed=3)
        self.oracle = SphereOracle(0.3)

    def test_exact_model(self):
        report = evaluate_reconstruction(_OracleModel(self.oracle), np.zeros(4), self.oracle, self.config)
        self.assertFalse(report['failed'])
        self.assertEqual(report['iou']['mean'], 1.0)
        self.assertEqual(report['precision']['mean'], 1.0)
        self.assertLessEqual(report['chamfer_l1']['mean'], np.sqrt(3.0) / 23.0)
        self.assertGreaterEqual(report['normal_consistency']['mean'], 0.99)
        self.assertEqual(report['chamfer_l1']['seeds'], [3, 4])

    def test_constant_model_fails(self):
        model = OccupancyModel(CX, n_blocks=1, hidden=4, cond_dim=4)
        model.head.b.data[:] = np.log(0.4 / 0.6)
        report = evaluate_reconstruction(model, np.zeros(4), self.oracle, self.config)
        self.assertTrue(report['failed'])
        self.assertNotIn('iou', report)

    def test_reproducible(self):
        model = _OracleModel(self.oracle)
        self.assertEqual(evaluate_reconstruction(model, None, self.oracle, self.config),
                         evaluate_reconstruction(model, None, self.oracle, self.config))

    def test_pooling(self):
        good = evaluate_reconstruction(_OracleModel(self.oracle), None, self.oracle, self.config)
        pooled = pool_reports([good, {'failed': True}])
        self.assertEqual(pooled['failures'], 1)
        self.assertEqual(pooled['iou']['mean'], 1.0)
        table = report_table([good, {'failed': True}], ['a', 'b'])
        self.assertTrue(np.isnan(table['iou'].iloc[1]))

    def test_summarize(self):
        summary = summarize([1.0, 3.0], [0, 1])
        self.assertEqual(summary['mean'], 2.0)
        self.assertEqual(summary['std'], 1.0)
        self.assertEqual(summary['formatted'], '2.000±1.000')


if __name__ == '__main__':
    unittest.main()
