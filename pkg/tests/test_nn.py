import unittest
import numpy as np
from flashsynth import tensor as ops
from flashsynth.nn import BiLSTM, Dense, FeedForward, LSTMLayer
from flashsynth.params import ParamStore


class TestLayers(unittest.TestCase):

    def setUp(self):
        self.store = ParamStore(seed=7)
        self.params = self.store.bind(None)

    def test_dense(self):
        layer = Dense(self.store, 'dense', 3, 2)
        self.assertEqual(layer(self.params, ops.constant(np.ones((4, 3)))).shape, (4, 2))
        np.testing.assert_array_equal(self.store.get('dense/b'), np.zeros(2))

    def test_feed_forward(self):
        network = FeedForward(self.store, 'ff', [3, 5, 2])
        outputs = network(self.params, ops.constant(np.ones(3)))
        self.assertEqual(outputs.shape, (2,))
        self.assertTrue(np.all(np.abs(outputs.numpy()) < 1.0))
        self.assertIn('ff/1/w', self.store)

    def test_forget_gate_bias(self):
        LSTMLayer(self.store, 'lstm', 2, 3)
        np.testing.assert_array_equal(self.store.get('lstm/b'), [0, 0, 0, 1, 1, 1, 0, 0, 0, 0, 0, 0])

    def test_mask_keeps_state(self):
        layer = LSTMLayer(self.store, 'lstm', 2, 3)
        inputs = np.random.default_rng(0).normal(size=(1, 3, 2))
        mask = np.array([[1.0, 1.0, 0.0]])
        outputs, (hidden, cell) = layer.run(self.params, ops.constant(inputs), mask)
        _, (short_hidden, short_cell) = layer.run(self.params, ops.constant(inputs[:, :2]))
        np.testing.assert_allclose(hidden.numpy(), short_hidden.numpy())
        np.testing.assert_allclose(cell.numpy(), short_cell.numpy())
        np.testing.assert_array_equal(outputs[2].numpy(), np.zeros((1, 3)))

    def test_reverse_with_padding(self):
        layer = LSTMLayer(self.store, 'lstm', 2, 3)
        inputs = np.random.default_rng(1).normal(size=(1, 3, 2))
        mask = np.array([[1.0, 1.0, 0.0]])
        _, (hidden, _) = layer.run(self.params, ops.constant(inputs), mask, reverse=True)
        _, (short_hidden, _) = layer.run(
            self.params, ops.constant(inputs[:, :2]), reverse=True)
        np.testing.assert_allclose(hidden.numpy(), short_hidden.numpy())

    def test_bilstm_shapes(self):
        network = BiLSTM(self.store, 'bi', 2, 3, layers=2)
        outputs, final = network(self.params, ops.constant(np.ones((4, 5, 2))), np.ones((4, 5)))
        self.assertEqual(outputs.shape, (4, 5, 6))
        self.assertEqual(final.shape, (4, 6))
        self.assertEqual(network.output_size, 6)
        self.assertIn('bi/1/bwd/w_x', self.store)
        self.assertEqual(self.store.get('bi/1/fwd/w_x').shape, (6, 12))


if __name__ == '__main__':
    unittest.main()
