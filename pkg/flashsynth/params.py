"""named parameters, their gradients, initialization and the Adam optimizer"""
import numpy as np

from flashsynth import utils
from flashsynth.exceptions import TensorError
from flashsynth.tensor import Tensor


GLOROT = 'glorot'
ZEROS = 'zeros'


class ParamStore(object):

    def __init__(self, seed=0):
        self.seed = seed
        self.params = {}
        self.grads = {}

    def __contains__(self, name):
        return name in self.params

    def __len__(self):
        return len(self.params)

    def names(self):
        """parameter names in creation order"""
        return list(self.params)

    def add(self, name, shape, init=GLOROT, value=None):
        """create a parameter; each name draws from its own seed stream"""
        if name in self.params:
            raise TensorError('duplicate parameter %s' % name)
        shape = tuple(shape)
        if value is not None:
            data = np.array(value, dtype=np.float64).reshape(shape)
        elif init == ZEROS:
            data = np.zeros(shape)
        elif init == GLOROT:
            fan_in = shape[0] if len(shape) > 1 else 1
            fan_out = shape[-1]
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            data = utils.seeded_rng('param', self.seed, name).uniform(-bound, bound, size=shape)
        else:
            raise TensorError('unknown initializer %s' % init)
        self.params[name] = data
        self.grads[name] = np.zeros(shape)
        return data

    def get(self, name):
        return self.params[name]

    def set(self, name, value):
        value = np.asarray(value, dtype=np.float64)
        if value.shape != self.params[name].shape:
            raise TensorError('parameter %s has shape %s, not %s' % (
                name, self.params[name].shape, value.shape))
        self.params[name] = value.copy()

    def zero_grad(self):
        for name in self.grads:
            self.grads[name].fill(0.0)

    def num_parameters(self):
        return int(sum(value.size for value in self.params.values()))

    def bind(self, tape=None):
        return BoundParams(self, tape)


class BoundParams(object):
    """parameters as tensors on one tape, or as constants when tape is None"""

    def __init__(self, store, tape):
        self.store = store
        self.tape = tape
        self._tensors = {}

    def __getitem__(self, name):
        tensor = self._tensors.get(name)
        if tensor is None:
            data = self.store.params[name]
            if self.tape is None:
                tensor = Tensor(data)
            else:
                tensor = self.tape.parameter(name, data)
            self._tensors[name] = tensor
        return tensor

    def __contains__(self, name):
        return name in self.store


class Adam(object):

    def __init__(self, store, learning_rate=1e-3, beta1=0.9, beta2=0.999, eps=1e-8):
        self.store = store
        self.learning_rate = learning_rate
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.steps = 0
        self.first_moments = {name: np.zeros_like(value) for name, value in store.params.items()}
        self.second_moments = {name: np.zeros_like(value) for name, value in store.params.items()}

    @classmethod
    def from_config(cls, store, synth_config):
        return cls(store, synth_config.get('learning_rate', 1e-3),
                   synth_config.get('adam_beta1', 0.9), synth_config.get('adam_beta2', 0.999),
                   synth_config.get('adam_eps', 1e-8))

    def step(self):
        self.steps += 1
        correction1 = 1.0 - self.beta1 ** self.steps
        correction2 = 1.0 - self.beta2 ** self.steps
        for name, value in self.store.params.items():
            grad = self.store.grads[name]
            first = self.first_moments[name]
            second = self.second_moments[name]
            first *= self.beta1
            first += (1.0 - self.beta1) * grad
            second *= self.beta2
            second += (1.0 - self.beta2) * grad * grad
            value -= self.learning_rate * (first / correction1) / (
                np.sqrt(second / correction2) + self.eps)
