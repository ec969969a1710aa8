import threading
import unittest

import numpy as np
from numpy.testing import assert_allclose, assert_array_equal

from odontpy.exceptions import DimensionError, LabelError, NumericError
from odontpy.numerics import (AdamState, EVAL, TRAIN, RunningStats, Tensor, adam_step, batch_norm, bce_loss,
                              conv2d, grad_check, is_grad_enabled, linear, no_grad, relu, sigmoid)

TOLERANCE = 1e-4
SEEDS = range(10)


class test_tensor(unittest.TestCase):
    def test_non_finite_rejected(self):
        with self.assertRaises(NumericError):
            Tensor([1.0, np.nan])
        with self.assertRaises(NumericError):
            Tensor([np.inf])

    def test_broadcast_gradient(self):
        x = Tensor(np.ones((3, 2)), requires_grad=True)
        b = Tensor(np.zeros(2), requires_grad=True)
        (x + b).sum().backward()
        assert_array_equal(b.grad, [3.0, 3.0])
        assert_array_equal(x.grad, np.ones((3, 2)))

    def test_shared_operand(self):
        x = Tensor([3.0], requires_grad=True)
        (x * x + x).sum().backward()
        assert_allclose(x.grad, [7.0])

    def test_no_grad_records_nothing(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        with no_grad():
            y = x * 2.0
        self.assertFalse(y.requires_grad)

    def test_no_grad_per_thread(self):
        x = Tensor([1.0, 2.0], requires_grad=True)
        a_entered, b_entered, a_exited = threading.Event(), threading.Event(), threading.Event()
        seen = {}

        def first():
            with no_grad():
                a_entered.set()
                b_entered.wait(5)
            a_exited.set()

        def second():
            a_entered.wait(5)
            with no_grad():
                b_entered.set()
                a_exited.wait(5)
                seen['inside'] = is_grad_enabled()

        threads = [threading.Thread(target=first), threading.Thread(target=second)]
        for thread in threads:
            thread.start()
        for thread in threads:
            thread.join(10)
        self.assertFalse(seen['inside'])
        self.assertTrue(is_grad_enabled())
        self.assertTrue((x * 2.0).requires_grad)

    def test_untracked_linear_ignores_neighbours(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(200, 16))
        W, b = rng.normal(size=(16, 5)), rng.normal(size=5)
        with no_grad():
            whole = linear(x, W, b).data
            for n in (1, 63, 64, 65, 130):
                assert_array_equal(linear(x[:n], W, b).data, whole[:n])
            assert_array_equal(linear(x[::-1], W, b).data, whole[::-1])
        assert_allclose(whole, x @ W + b, atol=1e-12)


class test_linear(unittest.TestCase):
    def test_identity(self):
        y = linear([[1.0, 2.0]], np.eye(2), np.zeros(2))
        assert_array_equal(y.data, [[1.0, 2.0]])

    def test_zero_weights(self):
        x = np.random.default_rng(0).normal(size=(4, 2))
        y = linear(x, np.zeros((2, 2)), [3.0, 3.0])
        assert_array_equal(y.data, np.full((4, 2), 3.0))

    def test_hand_computed(self):
        y = linear([[1.0, 2.0]], [[1.0, 0.0], [1.0, 1.0]], [0.0, 1.0])
        assert_array_equal(y.data, [[3.0, 3.0]])

    def test_shape_mismatch(self):
        with self.assertRaises(DimensionError):
            linear(np.ones((2, 3)), np.ones((2, 2)), np.zeros(2))

    def test_gradients(self):
        for seed in SEEDS:
            rng = np.random.default_rng(seed)
            x = rng.normal(size=(4, 3))
            W = rng.normal(size=(3, 2))
            b = rng.normal(size=2)
            self.assertLess(grad_check(lambda t: (linear(t, W, b) ** 2).sum(), x), TOLERANCE)
            self.assertLess(grad_check(lambda t: (linear(x, t, b) ** 2).sum(), W), TOLERANCE)
            self.assertLess(grad_check(lambda t: (linear(x, W, t) ** 2).sum(), b), TOLERANCE)


class test_batch_norm(unittest.TestCase):
    def test_unit_batch(self):
        stats = RunningStats(1)
        y = batch_norm([[-1.0], [1.0]], [1.0], [0.0], TRAIN, stats)
        expected = 1.0 / np.sqrt(1.0 + 1e-5)
        assert_allclose(y.data, [[-expected], [expected]], rtol=1e-12)

    def test_zero_scale(self):
        y = batch_norm([[0.3], [2.0], [5.0]], [0.0], [5.0], TRAIN, RunningStats(1))
        assert_array_equal(y.data, [[5.0], [5.0], [5.0]])

    def test_hand_computed(self):
        y = batch_norm([[0.0], [2.0]], [1.0], [0.0], TRAIN, RunningStats(1))
        assert_allclose(y.data, [[-1.0], [1.0]], atol=1e-5)

    def test_running_stats_update(self):
        stats = RunningStats(1)
        batch_norm([[0.0], [2.0]], [1.0], [0.0], TRAIN, stats)
        assert_allclose(stats.mean, [0.1])
        # unbiased batch variance is 2
        assert_allclose(stats.var, [0.9 + 0.2])

    def test_eval_uses_running_stats(self):
        stats = RunningStats(1)
        stats.mean[:] = 1.0
        stats.var[:] = 4.0
        y = batch_norm([[3.0]], [1.0], [0.0], EVAL, stats)
        assert_allclose(y.data, [[2.0 / np.sqrt(4.0 + 1e-5)]])
        assert_array_equal(stats.mean, [1.0])

    def test_single_row_train_rejected(self):
        with self.assertRaises(DimensionError):
            batch_norm([[1.0, 2.0]], [1.0, 1.0], [0.0, 0.0], TRAIN, RunningStats(2))

    def test_zero_variance_feature(self):
        y = batch_norm([[1.0], [1.0]], [1.0], [0.0], TRAIN, RunningStats(1))
        assert_array_equal(y.data, [[0.0], [0.0]])

    def test_gradients(self):
        for seed in SEEDS:
            rng = np.random.default_rng(seed)
            x = rng.normal(size=(5, 3))
            gamma = rng.normal(size=3)
            beta = rng.normal(size=3)
            weights = rng.normal(size=(5, 3))
            for mode in (TRAIN, EVAL):
                stats = RunningStats(3)
                stats.mean = rng.normal(size=3)
                stats.var = rng.uniform(0.5, 2.0, size=3)
                f = lambda t: (batch_norm(t, gamma, beta, mode, stats.copy()) * weights).sum()
                self.assertLess(grad_check(f, x), TOLERANCE)
                g = lambda t: (batch_norm(x, t, beta, mode, stats.copy()) * weights).sum()
                self.assertLess(grad_check(g, gamma), TOLERANCE)


class test_activations(unittest.TestCase):
    def test_relu(self):
        assert_array_equal(relu([-1.0, 0.0, 2.0]).data, [0.0, 0.0, 2.0])

    def test_relu_kink_gradient(self):
        x = Tensor([0.0, 1.0], requires_grad=True)
        relu(x).sum().backward()
        assert_array_equal(x.grad, [0.0, 1.0])

    def test_sigmoid(self):
        assert_array_equal(sigmoid([0.0]).data, [0.5])
        assert_allclose(sigmoid([np.log(3.0)]).data, [0.75], rtol=1e-12)

    def test_gradients(self):
        for seed in SEEDS:
            x = np.random.default_rng(seed).normal(size=6)
            self.assertLess(grad_check(lambda t: (sigmoid(t) ** 2).sum(), x), TOLERANCE)
            # keep away from the kink
            x = np.where(np.abs(x) < 0.1, 0.5, x)
            self.assertLess(grad_check(lambda t: (relu(t) ** 2).sum(), x), TOLERANCE)


class test_bce_loss(unittest.TestCase):
    def test_perfect_prediction(self):
        self.assertLessEqual(bce_loss([0.0, 1.0, 1.0], [0.0, 1.0, 1.0]).item(), 1e-6)

    def test_uninformative(self):
        assert_allclose(bce_loss([0.5, 0.5], [0.0, 1.0]).item(), np.log(2.0), rtol=1e-12)

    def test_hand_computed(self):
        assert_allclose(bce_loss([0.9], [1.0]).item(), 0.10536051565782628, rtol=1e-9)

    def test_labels_checked(self):
        with self.assertRaises(LabelError):
            bce_loss([0.5, 0.5], [0.0, 0.5])
        with self.assertRaises(DimensionError):
            bce_loss([0.5, 0.5], [0.0])

    def test_gradients(self):
        for seed in SEEDS:
            rng = np.random.default_rng(seed)
            p = rng.uniform(0.1, 0.9, size=8)
            t = (rng.random(8) > 0.5).astype(float)
            self.assertLess(grad_check(lambda q: bce_loss(q, t), p), TOLERANCE)

    def test_composite_gradient(self):
        rng = np.random.default_rng(3)
        W = rng.normal(size=(4, 1))
        t = np.array([0.0, 1.0, 1.0, 0.0, 1.0])
        f = lambda x: bce_loss(sigmoid(linear(x, W, [0.1])).reshape(5), t)
        self.assertLess(grad_check(f, rng.normal(size=(5, 4))), TOLERANCE)


class test_conv2d(unittest.TestCase):
    def test_matches_direct_sum(self):
        rng = np.random.default_rng(0)
        x = rng.normal(size=(2, 2, 6, 6))
        W = rng.normal(size=(3, 2, 3, 3))
        b = rng.normal(size=3)
        y = conv2d(x, W, b, stride=2, padding=1).data
        padded = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)))
        expected = np.zeros((2, 3, 3, 3))
        for i in range(3):
            for j in range(3):
                window = padded[:, :, 2 * i:2 * i + 3, 2 * j:2 * j + 3]
                expected[:, :, i, j] = np.einsum('ncij,ocij->no', window, W) + b
        assert_allclose(y, expected, atol=1e-12)

    def test_gradients(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(1, 2, 5, 5))
        W = rng.normal(size=(2, 2, 3, 3))
        b = rng.normal(size=2)
        self.assertLess(grad_check(lambda t: (conv2d(t, W, b, 2, 1) ** 2).sum(), x), TOLERANCE)
        self.assertLess(grad_check(lambda t: (conv2d(x, t, b, 2, 1) ** 2).sum(), W), TOLERANCE)


class test_adam(unittest.TestCase):
    def test_zero_gradient_is_noop(self):
        p = Tensor([1.0, -2.0], requires_grad=True)
        state = AdamState([p])
        adam_step([p], [np.zeros(2)], state)
        assert_array_equal(p.data, [1.0, -2.0])
        self.assertEqual(state.step_count, 1)

    def test_first_step(self):
        for g, sign in ((1.0, -1.0), (-1.0, 1.0)):
            p = Tensor([0.0], requires_grad=True)
            adam_step([p], [np.array([g])], AdamState([p], learning_rate=1e-4))
            assert_allclose(p.data, [sign * 1e-4 / (1.0 + 1e-8)], rtol=1e-12)

    def test_untouched_entries_keep_moments(self):
        p = Tensor(np.zeros((2, 2)), requires_grad=True)
        state = AdamState([p])
        adam_step([p], [np.array([[1.0, 1.0], [0.0, 0.0]])], state)
        assert_array_equal(p.data[1], [0.0, 0.0])
        assert_array_equal(state.m[0][1], [0.0, 0.0])

    def test_shape_mismatch(self):
        p = Tensor([0.0, 0.0], requires_grad=True)
        with self.assertRaises(DimensionError):
            adam_step([p], [np.zeros(3)], AdamState([p]))

    def test_non_finite_gradient(self):
        p = Tensor([0.0], requires_grad=True)
        with self.assertRaises(NumericError):
            adam_step([p], [np.array([np.nan])], AdamState([p]))


class test_grad_check(unittest.TestCase):
    def test_quadratic(self):
        x = np.random.default_rng(0).normal(size=5)
        self.assertLess(grad_check(lambda t: (t * t).sum(), x), 1e-8)

    def test_constant(self):
        self.assertEqual(grad_check(lambda t: Tensor(4.0), np.ones(3)), 0.0)


if __name__ == '__main__':
    unittest.main()
