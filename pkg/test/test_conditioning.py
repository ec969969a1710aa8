import os
import tempfile
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from odontpy.conditioning import (ClassEmbeddingTable, ConditionEncoder, PatchEncoder, PatchImage, ToothClass,
                                  embed_class, encode_patch, extract_patch, make_condition, parse_classes,
                                  read_pgm, write_pgm)
from odontpy.exceptions import DimensionError, EmptyMaskError, InvalidClassError, PatchError
from odontpy.numerics import AdamState, adam_step


class test_tooth_class(unittest.TestCase):
    def test_range(self):
        self.assertEqual(ToothClass(32).index, 32)
        for bad in (0, 33, 2.5, True):
            with self.assertRaises(InvalidClassError):
                ToothClass(bad)

    def test_families(self):
        self.assertEqual(ToothClass(1).family, 'molar')
        self.assertEqual(ToothClass(8).family, 'incisor')
        self.assertEqual(ToothClass(27).family, 'canine')
        self.assertEqual(ToothClass(20).family, 'premolar')
        self.assertEqual(ToothClass(17).jaw, 'lower')

    def test_parse_classes(self):
        self.assertEqual(parse_classes('3,1-2, 17'), [1, 2, 3, 17])
        with self.assertRaises(InvalidClassError):
            parse_classes('30-33')


class test_extract_patch(unittest.TestCase):
    def test_full_mask(self):
        patch = extract_patch(np.full((40, 40), 0.7), np.ones((40, 40)))
        assert_allclose(patch.pixels, np.full((64, 64), 0.7), atol=1e-12)

    def test_empty_mask(self):
        with self.assertRaises(EmptyMaskError):
            extract_patch(np.ones((8, 8)), np.zeros((8, 8)))

    def test_block_upsampled(self):
        px = np.zeros((8, 8))
        px[3:5, 2:4] = 1.0
        seg = np.zeros((8, 8))
        seg[3:5, 2:4] = 1.0
        patch = extract_patch(px, seg)
        self.assertTrue(np.all(patch.pixels > 0))
        assert_allclose(patch.pixels, np.ones((64, 64)), atol=1e-12)

    def test_mask_removes_background(self):
        px = np.ones((10, 10))
        seg = np.zeros((10, 10))
        seg[2:8, 4:6] = 0.9
        patch = extract_patch(px, seg)
        # the 6x2 box is centred in a 6x6 square
        self.assertEqual(patch.pixels[32, 0], 0.0)
        self.assertAlmostEqual(patch.pixels[32, 32], 1.0, places=12)

    def test_mismatched_shapes(self):
        with self.assertRaises(DimensionError):
            extract_patch(np.ones((8, 8)), np.ones((8, 9)))

    def test_patch_range(self):
        with self.assertRaises(PatchError):
            PatchImage(np.full((64, 64), 1.5))
        with self.assertRaises(DimensionError):
            PatchImage(np.zeros((32, 32)))


class test_pgm(unittest.TestCase):
    def test_round_trip(self):
        pixels = np.round(np.random.default_rng(0).random((64, 64)) * 255) / 255
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'patch.pgm')
            write_pgm(path, PatchImage(pixels))
            assert_allclose(read_pgm(path), pixels, atol=1e-12)

    def test_not_pgm(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, 'bad.pgm')
            with open(path, 'wb') as f:
                f.write(b'P2\n1 1\n255\n0\n')
            with self.assertRaises(PatchError):
                read_pgm(path)
            with open(path, 'wb') as f:
                f.write(b'P5\nwide 1\n255\n\x00')
            with self.assertRaises(PatchError):
                read_pgm(path)


class test_class_embedding(unittest.TestCase):
    def test_lookup(self):
        table = ClassEmbeddingTable(seed=4)
        assert_array_equal(embed_class(table, 1).data, table.rows.data[0])
        assert_array_equal(embed_class(table, 9).data, embed_class(table, 9).data)

    def test_sparse_update(self):
        table = ClassEmbeddingTable(seed=0)
        before = table.rows.data.copy()
        (embed_class(table, 3) ** 2).sum().backward()
        adam_step([table.rows], [table.rows.grad], AdamState([table.rows], learning_rate=1e-2))
        others = [i for i in range(32) if i != 2]
        assert_array_equal(table.rows.data[others], before[others])
        self.assertFalse(np.array_equal(table.rows.data[2], before[2]))

    def test_invalid_class(self):
        with self.assertRaises(InvalidClassError):
            embed_class(ClassEmbeddingTable(), 0)


class test_patch_encoder(unittest.TestCase):
    def test_zero_patch_zero_bias(self):
        encoder = PatchEncoder(seed=0)
        self.assertEqual(encode_patch(encoder, np.zeros((64, 64))).shape, (128,))
        assert_array_equal(encode_patch(encoder, np.zeros((64, 64))).data, np.zeros(128))

    def test_deterministic(self):
        encoder = PatchEncoder(seed=0)
        patch = np.random.default_rng(1).random((64, 64))
        assert_array_equal(encode_patch(encoder, patch).data, encode_patch(encoder, patch).data)

    def test_sensitive_to_one_pixel(self):
        encoder = PatchEncoder(seed=0)
        patch = np.random.default_rng(1).random((64, 64))
        changed = patch.copy()
        changed[20, 30] = 1.0 - changed[20, 30]
        self.assertFalse(np.array_equal(encode_patch(encoder, patch).data, encode_patch(encoder, changed).data))


class test_make_condition(unittest.TestCase):
    def test_addition(self):
        v = np.random.default_rng(0).normal(size=128)
        assert_array_equal(make_condition(np.zeros(128), v).data, v)
        assert_array_equal(make_condition(v, np.zeros(128)).data, v)
        assert_array_equal(make_condition(np.ones(4), np.full(4, 2.0)).data, np.full(4, 3.0))

    def test_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            make_condition(np.zeros(4), np.zeros(5))

    def test_encoder_without_class_embedding(self):
        with_class = ConditionEncoder(seed=0)
        without = ConditionEncoder(use_class_embedding=False, seed=0)
        patch = np.random.default_rng(2).random((64, 64))
        assert_array_equal(without.encode([5], [patch]).data,
                           with_class.encoder.forward(patch[np.newaxis]).data)
        self.assertNotIn('class_embedding.rows', without.named_parameters())


if __name__ == '__main__':
    unittest.main()
