"""dense layers and masked, optionally bidirectional, LSTMs over the tape"""
import numpy as np

from flashsynth import tensor as ops
from flashsynth.params import ZEROS


class Dense(object):

    def __init__(self, store, name, input_size, output_size):
        self.name = name
        self.input_size = input_size
        self.output_size = output_size
        store.add(name + '/w', (input_size, output_size))
        store.add(name + '/b', (output_size,), ZEROS)

    def __call__(self, params, inputs):
        return ops.matmul(inputs, params[self.name + '/w']) + params[self.name + '/b']


class FeedForward(object):
    """tanh after every layer, sizes lists the input then each layer width"""

    def __init__(self, store, name, sizes):
        self.layers = [Dense(store, '%s/%d' % (name, index), sizes[index], sizes[index + 1])
                       for index in range(len(sizes) - 1)]

    def __call__(self, params, inputs):
        for layer in self.layers:
            inputs = ops.tanh(layer(params, inputs))
        return inputs


class LSTMLayer(object):
    """single direction LSTM; a masked step keeps its state and emits zeros"""

    def __init__(self, store, name, input_size, hidden_size):
        self.name = name
        self.input_size = input_size
        self.hidden_size = hidden_size
        store.add(name + '/w_x', (input_size, 4 * hidden_size))
        store.add(name + '/w_h', (hidden_size, 4 * hidden_size))
        bias = np.zeros(4 * hidden_size)
        # gates are ordered input, forget, cell, output
        bias[hidden_size:2 * hidden_size] = 1.0
        store.add(name + '/b', (4 * hidden_size,), value=bias)

    def initial_state(self, batch):
        zeros = ops.constant(np.zeros((batch, self.hidden_size)))
        return zeros, zeros

    def step(self, params, projected, state, mask=None):
        """one time step from the input already multiplied by w_x"""
        hidden, cell = state
        gates = (projected + ops.matmul(hidden, params[self.name + '/w_h'])
                 + params[self.name + '/b'])
        size = self.hidden_size
        input_gate, forget_gate, candidate, output_gate = ops.split(
            gates, [size, size, size, size], axis=1)
        new_cell = (ops.sigmoid(forget_gate) * cell
                    + ops.sigmoid(input_gate) * ops.tanh(candidate))
        new_hidden = ops.sigmoid(output_gate) * ops.tanh(new_cell)
        if mask is None:
            return (new_hidden, new_cell), new_hidden
        keep = ops.constant(mask.reshape(-1, 1))
        carry = ops.constant(1.0 - mask.reshape(-1, 1))
        next_state = (keep * new_hidden + carry * hidden, keep * new_cell + carry * cell)
        return next_state, keep * new_hidden

    def project(self, params, inputs):
        return ops.matmul(inputs, params[self.name + '/w_x'])

    def run(self, params, inputs, mask=None, reverse=False, initial=None):
        """outputs in time order and the final (hidden, cell) for (batch, time, input) inputs"""
        batch, steps = inputs.shape[0], inputs.shape[1]
        projected = self.project(params, inputs)
        state = initial if initial is not None else self.initial_state(batch)
        outputs = [None] * steps
        order = range(steps - 1, -1, -1) if reverse else range(steps)
        for step in order:
            step_mask = None if mask is None else mask[:, step]
            state, outputs[step] = self.step(
                params, projected[:, step], state, step_mask)
        return outputs, state


class BiLSTM(object):
    """stacked bidirectional LSTM, each layer reading both directions below it"""

    def __init__(self, store, name, input_size, hidden_size, layers=1):
        self.hidden_size = hidden_size
        self.layers = []
        size = input_size
        for index in range(layers):
            self.layers.append((
                LSTMLayer(store, '%s/%d/fwd' % (name, index), size, hidden_size),
                LSTMLayer(store, '%s/%d/bwd' % (name, index), size, hidden_size)))
            size = 2 * hidden_size

    @property
    def output_size(self):
        return 2 * self.hidden_size

    def __call__(self, params, inputs, mask=None):
        """(batch, time, 2H) outputs and the (batch, 2H) final forward and backward states"""
        forward_state = backward_state = None
        for forward_layer, backward_layer in self.layers:
            forward_outputs, forward_state = forward_layer.run(params, inputs, mask)
            backward_outputs, backward_state = backward_layer.run(
                params, inputs, mask, reverse=True)
            inputs = ops.concat([ops.stack(forward_outputs, axis=1),
                                 ops.stack(backward_outputs, axis=1)], axis=2)
        final = ops.concat([forward_state[0], backward_state[0]], axis=1)
        return inputs, final
