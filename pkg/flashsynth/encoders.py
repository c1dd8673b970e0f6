"""encoders of input/output example sets: an LSTM baseline and cross-correlation variants

Feature blocks are the top bidirectional LSTM outputs of a string, one row
per position, zero at padding. An alignment is a relative shift s between the
output block and the input block; the shifts run from -(T-1) to T-2, giving
2(T-1) alignments. Alignment a = s + T - 1 pairs input row t with output row
t - s.
"""
import numpy as np

from flashsynth import tensor as ops
from flashsynth import utils
from flashsynth.exceptions import (
    ConfigError, EncodingError, StringTooLong, TooManyPairs, UnknownChar)
from flashsynth.nn import BiLSTM


LSTM = 'LSTM'
CC = 'CC'
DIFFUSED_CC = 'DiffusedCC'
LSTM_SUM_CC = 'LSTMSumCC'
AUGMENTED_DIFFUSED_CC = 'AugmentedDiffusedCC'

VARIANTS = (LSTM, CC, DIFFUSED_CC, LSTM_SUM_CC, AUGMENTED_DIFFUSED_CC)


def alignment_shifts(length):
    return list(range(-(length - 1), length - 1))


def alignment_indexes(length):
    """(rows, cols) of shape (alignments, length): input row t meets output row t - s

    Output rows outside the block point at index length, a zero padding row.
    """
    shifts = np.array(alignment_shifts(length))
    rows = np.tile(np.arange(length), (len(shifts), 1))
    cols = rows - shifts[:, None]
    cols = np.where((cols < 0) | (cols >= length), length, cols)
    return rows, cols


def output_alignment_indexes(length):
    """(rows, cols) pairing output row u with input row u + s, padded like alignment_indexes"""
    shifts = np.array(alignment_shifts(length))
    cols = np.tile(np.arange(length), (len(shifts), 1))
    rows = cols + shifts[:, None]
    rows = np.where((rows < 0) | (rows >= length), length, rows)
    return rows, cols


def correlation_matrix(input_block, output_block):
    """(n, T, T) dot products of every input row with every output row"""
    return ops.matmul(input_block, ops.transpose(output_block, (0, 2, 1)))


def _pad_square(matrix):
    """append a zero row and a zero column to each (n, T, T) matrix"""
    count, length = matrix.shape[0], matrix.shape[1]
    matrix = ops.concat([matrix, ops.constant(np.zeros((count, length, 1)))], axis=2)
    return ops.concat([matrix, ops.constant(np.zeros((count, 1, length + 1)))], axis=1)


def diffused_cross_correlation(input_block, output_block):
    """(n, 2(T-1), T): per alignment, the dot product at every input position, zero off overlap"""
    length = input_block.shape[1]
    rows, cols = alignment_indexes(length)
    padded = _pad_square(correlation_matrix(input_block, output_block))
    return ops.select(padded, (slice(None), rows, cols))


def output_diffused_cross_correlation(input_block, output_block):
    """(n, 2(T-1), T): as diffused_cross_correlation but laid out by output position"""
    length = input_block.shape[1]
    rows, cols = output_alignment_indexes(length)
    padded = _pad_square(correlation_matrix(input_block, output_block))
    return ops.select(padded, (slice(None), rows, cols))


def cross_correlation(input_block, output_block):
    """(n, 2(T-1)): overlap dot products summed per alignment"""
    return ops.reduce_sum(diffused_cross_correlation(input_block, output_block), axis=2)


def fold_alignments(diffused):
    """(n, T-1, T): shift j summed with shift -(j+1), for j from 0 to T-2"""
    length = diffused.shape[2]
    positive = np.arange(length - 1) + length - 1
    negative = length - 2 - np.arange(length - 1)
    return (ops.select(diffused, (slice(None), positive))
            + ops.select(diffused, (slice(None), negative)))


class IOEncoder(object):

    def __init__(self, store, synth_config, variant=None, prefix='encoder'):
        self.variant = variant or synth_config.get('encoder', CC)
        if self.variant not in VARIANTS:
            raise ConfigError('unknown encoder %s' % self.variant)
        self.prefix = prefix
        self.length = synth_config.get('max_length', 32)
        self.hidden_size = synth_config.get('hidden_size', 32)
        self.embedding_size = synth_config.get('embedding_size', 16)
        self.layers = synth_config.get('encoder_layers', 2)
        self.n_pairs = synth_config.get('n_examples', 5)
        self.chars = utils.charset(synth_config)
        self.char_index = {char: index for index, char in enumerate(self.chars)}
        store.add(prefix + '/embedding', (len(self.chars), self.embedding_size))
        self.input_lstm = BiLSTM(
            store, prefix + '/input', self.embedding_size, self.hidden_size, self.layers)
        self.output_lstm = BiLSTM(
            store, prefix + '/output', self.embedding_size, self.hidden_size, self.layers)
        alignments = 2 * (self.length - 1)
        if self.variant == LSTM_SUM_CC:
            self.align_lstm = BiLSTM(
                store, prefix + '/align', 4 * self.hidden_size, self.hidden_size)
        if self.variant == AUGMENTED_DIFFUSED_CC:
            self.input_stream_lstm = BiLSTM(
                store, prefix + '/input_stream', alignments + self.embedding_size,
                self.hidden_size)
            self.output_stream_lstm = BiLSTM(
                store, prefix + '/output_stream', alignments + self.embedding_size,
                self.hidden_size)

    @property
    def pair_dim(self):
        length, hidden = self.length, self.hidden_size
        return {
            LSTM: 4 * hidden * length,
            CC: 2 * (length - 1),
            DIFFUSED_CC: 2 * (length - 1) * length,
            LSTM_SUM_CC: 2 * hidden * 2 * (length - 1),
            AUGMENTED_DIFFUSED_CC: 4 * hidden + length * (length - 1),
        }[self.variant]

    @property
    def output_dim(self):
        return self.n_pairs * self.pair_dim

    def fields(self):
        """encoder description recorded in checkpoint manifests"""
        return {
            'encoder': self.variant,
            'max_length': self.length,
            'hidden_size': self.hidden_size,
            'embedding_size': self.embedding_size,
            'encoder_layers': self.layers,
            'n_examples': self.n_pairs,
        }

    def char_indexes(self, value):
        if len(value) > self.length:
            raise StringTooLong('%r is longer than %s' % (value, self.length))
        indexes = np.zeros(self.length, dtype=np.int64)
        mask = np.zeros(self.length)
        for position, char in enumerate(value):
            if char not in self.char_index:
                raise UnknownChar('%r is outside the character set' % char)
            indexes[position] = self.char_index[char]
            mask[position] = 1.0
        return indexes, mask

    def embed_strings(self, params, values):
        """(n, T, E) embeddings, zero at padding, and the (n, T) mask"""
        pairs = [self.char_indexes(value) for value in values]
        indexes = np.stack([index for index, _ in pairs])
        mask = np.stack([mask for _, mask in pairs])
        embedded = ops.embedding_lookup(params[self.prefix + '/embedding'], indexes)
        return embedded * ops.constant(mask[:, :, None]), mask

    def embed_string(self, params, value):
        embedded, mask = self.embed_strings(params, [value])
        return embedded[0], mask[0]

    def feature_blocks(self, params, inputs, outputs):
        input_embedded, input_mask = self.embed_strings(params, inputs)
        output_embedded, output_mask = self.embed_strings(params, outputs)
        input_block, _ = self.input_lstm(params, input_embedded, input_mask)
        output_block, _ = self.output_lstm(params, output_embedded, output_mask)
        return {
            'input_block': input_block, 'output_block': output_block,
            'input_mask': input_mask, 'output_mask': output_mask,
            'input_embedded': input_embedded, 'output_embedded': output_embedded,
        }

    def encode_pairs(self, params, pairs):
        """(n, pair_dim) encodings of (input, output) string pairs"""
        inputs = [pair[0] for pair in pairs]
        outputs = [pair[1] for pair in pairs]
        blocks = self.feature_blocks(params, inputs, outputs)
        count = len(pairs)
        input_block, output_block = blocks['input_block'], blocks['output_block']
        if self.variant == LSTM:
            return ops.concat([input_block.reshape(count, -1),
                               output_block.reshape(count, -1)], axis=1)
        if self.variant == CC:
            return cross_correlation(input_block, output_block)
        if self.variant == DIFFUSED_CC:
            return diffused_cross_correlation(input_block, output_block).reshape(count, -1)
        if self.variant == LSTM_SUM_CC:
            return self._lstm_sum(params, blocks, count)
        return self._augmented(params, blocks, count)

    def _lstm_sum(self, params, blocks, count):
        length, width = self.length, 2 * self.hidden_size
        rows, cols = alignment_indexes(length)
        alignments = rows.shape[0]
        output_block = ops.concat(
            [blocks['output_block'], ops.constant(np.zeros((count, 1, width)))], axis=1)
        pairs = ops.concat([
            ops.select(blocks['input_block'], (slice(None), rows)),
            ops.select(output_block, (slice(None), cols))], axis=3)
        output_mask = np.concatenate([blocks['output_mask'], np.zeros((count, 1))], axis=1)
        mask = blocks['input_mask'][:, rows] * output_mask[:, cols]
        _, final = self.align_lstm(
            params, pairs.reshape(count * alignments, length, 2 * width),
            mask.reshape(count * alignments, length))
        return final.reshape(count, alignments * width)

    def _augmented(self, params, blocks, count):
        input_block, output_block = blocks['input_block'], blocks['output_block']
        diffused = diffused_cross_correlation(input_block, output_block)
        by_output = output_diffused_cross_correlation(input_block, output_block)
        input_stream = ops.concat(
            [ops.transpose(diffused, (0, 2, 1)), blocks['input_embedded']], axis=2)
        output_stream = ops.concat(
            [ops.transpose(by_output, (0, 2, 1)), blocks['output_embedded']], axis=2)
        _, input_final = self.input_stream_lstm(params, input_stream, blocks['input_mask'])
        _, output_final = self.output_stream_lstm(params, output_stream, blocks['output_mask'])
        folded = fold_alignments(diffused).reshape(count, -1)
        return ops.concat([input_final, output_final, folded], axis=1)

    def encode_io_set(self, params, examples):
        """encodings of all example pairs concatenated in order, padded by repeating the last"""
        examples = list(examples)
        if len(examples) > self.n_pairs:
            raise TooManyPairs('%s examples for an encoder of %s pairs' % (
                len(examples), self.n_pairs))
        if not examples:
            raise EncodingError('no examples to encode')
        examples += [examples[-1]] * (self.n_pairs - len(examples))
        pairs = [(example.input, example.output) for example in examples]
        return self.encode_pairs(params, pairs).reshape(-1)
