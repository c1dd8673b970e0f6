import unittest
import numpy as np
from flashsynth import tensor as ops
from flashsynth.exceptions import (
    NonScalarLoss, ShapeMismatch, TapeMismatch, TapeReplayError, TensorError)
from flashsynth.gradcheck import grad_check
from flashsynth.params import ParamStore


class TestTensor(unittest.TestCase):

    def test_square_gradient(self):
        tape = ops.Tape()
        x = tape.parameter('x', [1.0, 2.0, 3.0])
        grads = ops.backward(ops.reduce_sum(x * x))
        np.testing.assert_allclose(grads['x'], [2.0, 4.0, 6.0])

    def test_chain(self):
        tape = ops.Tape()
        w = tape.parameter('w', [[1.0, 2.0], [3.0, 4.0]])
        v = tape.parameter('v', [1.0, -1.0])
        loss = ops.reduce_sum(ops.tanh(ops.matmul(w, v)))
        grads = ops.backward(loss)
        hidden = np.array([-1.0, -1.0])
        local = 1.0 - np.tanh(hidden) ** 2
        np.testing.assert_allclose(grads['w'], np.outer(local, [1.0, -1.0]))
        np.testing.assert_allclose(grads['v'], np.array([[1.0, 2.0], [3.0, 4.0]]).T @ local)

    def test_operators(self):
        tape = ops.Tape()
        x = tape.parameter('x', [1.0, 2.0])
        loss = (2.0 * x - x + 1.0 - (-x)).sum()
        grads = ops.backward(loss)
        np.testing.assert_allclose(grads['x'], [2.0, 2.0])
        self.assertEqual(loss.item(), 8.0)

    def test_constants_do_not_record(self):
        first = ops.constant([1.0, 2.0])
        result = ops.tanh(first + first)
        self.assertIsNone(result.tape)
        self.assertEqual(ops.backward(ops.reduce_sum(result)), {})

    def test_tape_replay(self):
        tape = ops.Tape()
        x = tape.parameter('x', [1.0])
        loss = ops.reduce_sum(x * x)
        ops.backward(loss)
        with self.assertRaises(TapeReplayError):
            ops.backward(loss)
        with self.assertRaises(TapeReplayError):
            ops.tanh(x)

    def test_non_scalar_loss(self):
        tape = ops.Tape()
        x = tape.parameter('x', [1.0, 2.0])
        with self.assertRaises(NonScalarLoss):
            ops.backward(x * x)

    def test_shape_mismatch(self):
        passes = [
            lambda: ops.add(np.zeros(3), np.zeros(4)),
            lambda: ops.matmul(np.zeros((2, 3)), np.zeros((2, 3))),
            lambda: ops.matmul(np.zeros((2, 2, 3)), np.zeros((3, 3, 2))),
            lambda: ops.concat([np.zeros((2, 3)), np.zeros((3, 2))], axis=1),
            lambda: ops.stack([np.zeros(2), np.zeros(3)]),
            lambda: ops.reshape(np.zeros(6), (4, 2)),
            lambda: ops.split(np.zeros(5), [2, 2]),
            lambda: ops.embedding_lookup(np.zeros((3, 2)), [0, 3]),
        ]
        for make in passes:
            with self.assertRaises(ShapeMismatch):
                make()
        with self.assertRaises(TensorError):
            ops.concat([])

    def test_tape_mismatch(self):
        first = ops.Tape().parameter('x', [1.0])
        second = ops.Tape().parameter('y', [1.0])
        with self.assertRaises(TapeMismatch):
            ops.add(first, second)

    def test_select_accumulates(self):
        tape = ops.Tape()
        x = tape.parameter('x', [1.0, 2.0, 3.0])
        grads = ops.backward(ops.reduce_sum(ops.select(x, np.array([0, 0, 2]))))
        np.testing.assert_allclose(grads['x'], [2.0, 0.0, 1.0])
        tape = ops.Tape()
        table = tape.parameter('table', np.arange(6.0).reshape(3, 2))
        rows = ops.embedding_lookup(table, [[1, 1], [2, 1]])
        self.assertEqual(rows.shape, (2, 2, 2))
        grads = ops.backward(ops.reduce_sum(rows))
        np.testing.assert_allclose(grads['table'], [[0.0, 0.0], [3.0, 3.0], [1.0, 1.0]])

    def test_backward_into_store(self):
        store = ParamStore()
        store.add('x', (2,), value=[1.0, -2.0])
        loss = ops.reduce_sum(ops.exp(store.bind(ops.Tape())['x']))
        ops.backward(loss, store)
        loss = ops.reduce_sum(ops.exp(store.bind(ops.Tape())['x']))
        ops.backward(loss, store)
        np.testing.assert_allclose(store.grads['x'], 2.0 * np.exp([1.0, -2.0]))

    def test_stable_functions(self):
        values = ops.constant([-800.0, 0.0, 800.0])
        np.testing.assert_allclose(ops.sigmoid(values).numpy(), [0.0, 0.5, 1.0])
        np.testing.assert_allclose(ops.softmax(values).numpy(), [0.0, 0.0, 1.0])
        self.assertTrue(np.all(np.isfinite(ops.log_softmax(values).numpy())))

    def test_split_and_transpose(self):
        pieces = ops.split(ops.constant(np.arange(12.0).reshape(3, 4)), [1, 3], axis=1)
        self.assertEqual([piece.shape for piece in pieces], [(3, 1), (3, 3)])
        self.assertEqual(ops.transpose(ops.constant(np.zeros((2, 3, 4))), (0, 2, 1)).shape,
                         (2, 4, 3))

    def test_gradient_checks(self):
        def loss_fn(params):
            hidden = ops.sigmoid(ops.matmul(params['w'], params['x']))
            return ops.reduce_sum(ops.log_softmax(hidden * params['x']))
        store = ParamStore(seed=4)
        store.add('w', (3, 3))
        store.add('x', (3,), value=[0.5, -1.0, 2.0])
        self.assertLess(grad_check(loss_fn, store), 1e-6)


if __name__ == '__main__':
    unittest.main()
