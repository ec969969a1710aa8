import json
import os
import tempfile
import unittest

import numpy as np
from numpy.testing import assert_array_equal

from odontpy.exceptions import DatasetError, InvalidClassError
from odontpy.synth import (BoxOracle, EmptyOracle, SphereOracle, UnionOracle, dataset_build, generate_tooth,
                           grid_coordinates, lattice_points, load_dataset, make_scene, render_patch, render_projection,
                           root_count, sample_points, single_shape_dataset, split_sizes, tooth_patch, voxelize)

SPHERE_FRACTION = 4.0 / 3.0 * np.pi * 0.3 ** 3


class test_oracle(unittest.TestCase):
    def test_outside_cube_is_empty(self):
        self.assertEqual(BoxOracle()(np.array([[0.6, 0.0, 0.0], [0.0, 0.0, 0.0]])).tolist(), [0, 1])

    def test_union(self):
        union = UnionOracle([SphereOracle(0.1, (-0.3, 0, 0)), SphereOracle(0.1, (0.3, 0, 0))])
        self.assertEqual(union(np.array([[-0.3, 0, 0], [0.3, 0, 0], [0, 0, 0]])).tolist(), [1, 1, 0])


class test_generate_tooth(unittest.TestCase):
    def test_deterministic(self):
        self.assertEqual(generate_tooth(14, 7)[0], generate_tooth(14, 7)[0])
        self.assertNotEqual(generate_tooth(14, 7)[0], generate_tooth(14, 8)[0])

    def test_root_counts(self):
        for molar in (1, 2, 3, 14, 15, 16, 17, 18, 19, 30, 31, 32):
            self.assertGreaterEqual(root_count(molar), 2)
            self.assertEqual(len(generate_tooth(molar, 0)[0].roots), root_count(molar))
        self.assertEqual(root_count(8), 1)

    def test_inside_tests(self):
        spec, oracle = generate_tooth(3, 0)
        self.assertEqual(oracle(np.array([[spec.crown.center_x, 0.0, 0.0]]))[0], 1)
        self.assertEqual(oracle(np.array([[0.49, 0.49, 0.49]]))[0], 0)

    def test_fits_in_cube(self):
        for tooth_class in (1, 6, 8, 12, 22):
            spec, _ = generate_tooth(tooth_class, 11)
            self.assertLessEqual(spec.crown.center_x + spec.crown.ax, 0.45 + 1e-12)
            for root in spec.roots:
                self.assertGreaterEqual(root.apex_x, -0.45 - 1e-12)

    def test_invalid_class(self):
        with self.assertRaises(InvalidClassError):
            generate_tooth(0, 0)


class test_voxelize(unittest.TestCase):
    def test_empty(self):
        self.assertEqual(voxelize(EmptyOracle(), (8, 8, 8)).occupied(), 0)

    def test_sphere_volume(self):
        fraction = voxelize(SphereOracle(0.3), (128, 128, 128)).fraction()
        self.assertLess(abs(fraction - SPHERE_FRACTION) / SPHERE_FRACTION, 0.05)

    def test_cell_centres_match_oracle(self):
        spec, oracle = generate_tooth(6, 2)
        grid = voxelize(oracle, (20, 12, 12))
        coords = grid_coordinates((20, 12, 12))
        assert_array_equal(grid.values.ravel(), oracle(lattice_points(coords)).astype(bool))
        self.assertEqual(grid.dims, (20, 12, 12))
        self.assertEqual(coords['x'][0], -0.5)
        self.assertEqual(coords['x'][-1], 0.5)


class test_sample_points(unittest.TestCase):
    def test_empty(self):
        self.assertEqual(sample_points(EmptyOracle(), 1000).labels.sum(), 0)

    def test_sphere_fraction(self):
        fraction = sample_points(SphereOracle(0.3), 100000, seed=0).positive_fraction()
        stderr = np.sqrt(SPHERE_FRACTION * (1 - SPHERE_FRACTION) / 100000)
        self.assertLess(abs(fraction - SPHERE_FRACTION), 3 * stderr)

    def test_seeded(self):
        assert_array_equal(sample_points(SphereOracle(0.2), 50, seed=3).points,
                           sample_points(SphereOracle(0.2), 50, seed=3).points)

    def test_surface_fraction(self):
        oracle = SphereOracle(0.2)
        uniform = sample_points(oracle, 20000, seed=1)
        biased = sample_points(oracle, 20000, seed=1, surface_fraction=0.5)
        assert_array_equal(biased.points[:10000], uniform.points[:10000])
        self.assertGreater(biased.positive_fraction(), 0.2)
        self.assertLess(uniform.positive_fraction(), 0.05)
        radius = np.linalg.norm(biased.points[10000:], axis=1)
        self.assertLess(np.max(np.abs(radius - 0.2)), 0.06)

    def test_surface_fraction_without_surface(self):
        sampled = sample_points(EmptyOracle(), 500, seed=2, surface_fraction=1.0)
        assert_array_equal(sampled.points, sample_points(EmptyOracle(), 500, seed=2).points)
        with self.assertRaises(ValueError):
            sample_points(EmptyOracle(), 500, surface_fraction=1.5)


class test_render(unittest.TestCase):
    def test_empty(self):
        assert_array_equal(render_projection(EmptyOracle(), 16), np.zeros((16, 16)))

    def test_full_cube(self):
        assert_array_equal(render_projection(BoxOracle(), 16), np.ones((16, 16)))

    def test_sphere(self):
        image = render_projection(SphereOracle(0.3), 64)
        self.assertEqual(image.max(), 1.0)
        i, k = np.unravel_index(np.argmax(image), image.shape)
        self.assertIn(i, (31, 32))
        self.assertIn(k, (31, 32))
        centres = -0.5 + (np.arange(64) + 0.5) / 64
        r = np.hypot(*np.meshgrid(centres, centres, indexing='ij'))
        self.assertEqual(image[r > 0.3 + 1e-9].max(), 0.0)

    def test_render_patch(self):
        sphere = SphereOracle(0.3)
        assert_array_equal(render_patch(sphere).pixels, render_projection(sphere, 64))
        fine = render_patch(sphere, 128).pixels
        self.assertEqual(fine.shape, (64, 64))
        self.assertGreaterEqual(fine.min(), 0.0)
        self.assertLessEqual(fine.max(), 1.0)
        assert_array_equal(render_patch(EmptyOracle()).pixels, np.zeros((64, 64)))

    def test_tooth_patch_is_tight(self):
        patch = tooth_patch(generate_tooth(8, 0)[1])
        self.assertGreater(patch.pixels.max(), 0.9)
        self.assertEqual(patch.pixels.shape, (64, 64))


class test_scene(unittest.TestCase):
    def test_no_teeth(self):
        px, seg = make_scene([])
        assert_array_equal(px, np.zeros((256, 768)))
        self.assertTrue(np.all(seg[0] == 1))
        self.assertEqual(seg.shape, (33, 256, 768))

    def test_one_tooth(self):
        spec, _ = generate_tooth(20, 1)
        px, seg = make_scene([spec])
        self.assertGreater(seg[20].sum(), 0)
        assert_array_equal(seg[0], 1 - seg[20])
        assert_array_equal(px > 0, seg[20] == 1)
        # lower teeth fill the bottom half
        self.assertEqual(seg[20, :128].sum(), 0)

    def test_overlap(self):
        specs = [generate_tooth(1, 0)[0], generate_tooth(2, 0)[0]]
        _, seg = make_scene(specs, footprint=256)
        self.assertTrue(np.any((seg[1] == 1) & (seg[2] == 1)))

    def test_duplicate_class(self):
        spec, _ = generate_tooth(4, 0)
        with self.assertRaises(InvalidClassError):
            make_scene([spec, spec])


class test_dataset(unittest.TestCase):
    def test_split_sizes(self):
        self.assertEqual(split_sizes(320), (246, 16, 58))
        self.assertEqual(split_sizes(1), (1, 0, 0))

    def test_single_shape(self):
        with tempfile.TemporaryDirectory() as tmp:
            dataset = dataset_build(tmp, n_per_class=1, classes=[1], seed=0, num_points=300)
            self.assertEqual(len(dataset), 1)
            self.assertEqual(len(dataset.train), 1)
            self.assertEqual(dataset.val, [])

    def test_manifest_reproducible(self):
        with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
            dataset_build(a, n_per_class=2, classes=[1, 8], seed=5, num_points=200)
            dataset_build(b, n_per_class=2, classes=[1, 8], seed=5, num_points=200)
            for name in sorted(os.listdir(a)):
                with open(os.path.join(a, name), 'rb') as fa, open(os.path.join(b, name), 'rb') as fb:
                    self.assertEqual(fa.read(), fb.read(), name)
            with open(os.path.join(a, 'manifest.json')) as f:
                manifest = json.load(f)
            self.assertEqual(len(manifest['samples']), 4)
            self.assertIn('split_policy', manifest)

    def test_stored_labels_reproduce(self):
        with tempfile.TemporaryDirectory() as tmp:
            dataset_build(tmp, n_per_class=1, classes=[3], seed=1, num_points=500)
            sample = load_dataset(tmp).samples[0]
            _, oracle = sample.generate()
            assert_array_equal(oracle(sample.points), sample.labels)
            self.assertEqual(sample.patch.pixels.shape, (64, 64))

    def test_missing_manifest(self):
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(DatasetError):
                load_dataset(tmp)

    def test_memory_dataset(self):
        dataset = single_shape_dataset(9, 4, 100)
        self.assertEqual(len(dataset.train), 1)
        self.assertEqual(dataset.train[0].points.shape, (100, 3))

    def test_memory_dataset_near_surface(self):
        biased = single_shape_dataset(1, 0, 4000).train[0]
        uniform = single_shape_dataset(1, 0, 4000, surface_fraction=0.0).train[0]
        self.assertGreater(np.mean(biased.labels), 2 * np.mean(uniform.labels))


if __name__ == '__main__':
    unittest.main()
