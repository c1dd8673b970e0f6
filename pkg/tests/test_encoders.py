import unittest
import numpy as np
from flashsynth import tensor as ops
from flashsynth.datagen import Example
from flashsynth.encoders import (
    AUGMENTED_DIFFUSED_CC, CC, DIFFUSED_CC, LSTM, LSTM_SUM_CC, VARIANTS, IOEncoder,
    alignment_indexes, alignment_shifts, cross_correlation, diffused_cross_correlation,
    fold_alignments)
from flashsynth.exceptions import (
    ConfigError, EncodingError, StringTooLong, TooManyPairs, UnknownChar)
from flashsynth.gradcheck import grad_check
from flashsynth.params import ParamStore
from tests import create_config


def brute_cross_correlation(input_block, output_block):
    count, length, _ = input_block.shape
    result = np.zeros((count, 2 * (length - 1)))
    for pair in range(count):
        for alignment, shift in enumerate(alignment_shifts(length)):
            for row in range(length):
                if 0 <= row - shift < length:
                    result[pair, alignment] += np.dot(
                        input_block[pair, row], output_block[pair, row - shift])
    return result


class TestCrossCorrelation(unittest.TestCase):

    def setUp(self):
        rng = np.random.default_rng(11)
        self.input_block = rng.normal(size=(2, 4, 3))
        self.output_block = rng.normal(size=(2, 4, 3))

    def test_alignment_indexes(self):
        rows, cols = alignment_indexes(3)
        np.testing.assert_array_equal(rows, [[0, 1, 2]] * 4)
        np.testing.assert_array_equal(cols, [[2, 3, 3], [1, 2, 3], [0, 1, 2], [3, 0, 1]])
        self.assertEqual(alignment_shifts(3), [-2, -1, 0, 1])

    def test_cross_correlation(self):
        result = cross_correlation(
            ops.constant(self.input_block), ops.constant(self.output_block))
        np.testing.assert_allclose(
            result.numpy(), brute_cross_correlation(self.input_block, self.output_block))

    def test_diffused(self):
        diffused = diffused_cross_correlation(
            ops.constant(self.input_block), ops.constant(self.output_block)).numpy()
        self.assertEqual(diffused.shape, (2, 6, 4))
        # shift 1 pairs input row 2 with output row 1, and leaves input row 0 unmatched
        np.testing.assert_allclose(
            diffused[0, 4, 2], np.dot(self.input_block[0, 2], self.output_block[0, 1]))
        self.assertEqual(diffused[0, 4, 0], 0.0)

    def test_fold(self):
        diffused = np.arange(2 * 6 * 4, dtype=np.float64).reshape(2, 6, 4)
        folded = fold_alignments(ops.constant(diffused)).numpy()
        self.assertEqual(folded.shape, (2, 3, 4))
        np.testing.assert_array_equal(folded[:, 0], diffused[:, 3] + diffused[:, 2])
        np.testing.assert_array_equal(folded[:, 2], diffused[:, 5] + diffused[:, 0])


class TestIOEncoder(unittest.TestCase):

    def setUp(self):
        self.synth_config = create_config('tiny')
        self.examples = (Example('ab cd', 'a'), Example('b', 'b'))

    def test_pair_dims(self):
        passes = {
            LSTM: 4 * 4 * 8,
            CC: 14,
            DIFFUSED_CC: 14 * 8,
            LSTM_SUM_CC: 8 * 14,
            AUGMENTED_DIFFUSED_CC: 16 + 8 * 7,
        }
        for variant, pair_dim in passes.items():
            encoder = IOEncoder(ParamStore(), self.synth_config, variant)
            self.assertEqual(encoder.pair_dim, pair_dim, variant)
            self.assertEqual(encoder.output_dim, 2 * pair_dim)

    def test_encode_shapes(self):
        for variant in VARIANTS:
            store = ParamStore()
            encoder = IOEncoder(store, self.synth_config, variant)
            encoding = encoder.encode_io_set(store.bind(None), self.examples)
            self.assertEqual(encoding.shape, (encoder.output_dim,), variant)
            self.assertTrue(np.all(np.isfinite(encoding.numpy())))

    def test_padding_repeats_the_last_pair(self):
        store = ParamStore()
        encoder = IOEncoder(store, self.synth_config, CC)
        params = store.bind(None)
        padded = encoder.encode_io_set(params, self.examples[:1])
        repeated = encoder.encode_io_set(params, self.examples[:1] * 2)
        np.testing.assert_array_equal(padded.numpy(), repeated.numpy())

    def test_errors(self):
        store = ParamStore()
        encoder = IOEncoder(store, self.synth_config, CC)
        params = store.bind(None)
        with self.assertRaises(StringTooLong):
            encoder.encode_io_set(params, [Example('a' * 9, 'a')])
        with self.assertRaises(UnknownChar):
            encoder.encode_io_set(params, [Example('é', 'a')])
        with self.assertRaises(TooManyPairs):
            encoder.encode_io_set(params, self.examples * 2)
        with self.assertRaises(EncodingError):
            encoder.encode_io_set(params, [])
        with self.assertRaises(ConfigError):
            IOEncoder(ParamStore(), self.synth_config, 'Transformer')

    def test_fields(self):
        encoder = IOEncoder(ParamStore(), self.synth_config)
        self.assertEqual(encoder.fields()['encoder'], CC)
        self.assertEqual(encoder.fields()['max_length'], 8)

    def test_gradients(self):
        synth_config = create_config(
            'tiny', max_length=4, hidden_size=2, embedding_size=2, encoder_layers=1)
        examples = (Example('ab', 'a'), Example('b a', 'ab'))
        for variant in (CC, LSTM_SUM_CC, AUGMENTED_DIFFUSED_CC):
            store = ParamStore(seed=3)
            encoder = IOEncoder(store, synth_config, variant)
            weights = ops.constant(np.random.default_rng(5).normal(size=encoder.output_dim))

            def loss_fn(params, encoder=encoder, weights=weights):
                return ops.reduce_sum(encoder.encode_io_set(params, examples) * weights)
            self.assertLess(grad_check(loss_fn, store, max_coords=20, seed=1), 1e-4, variant)


if __name__ == '__main__':
    unittest.main()
