"""interpreter goldens and gradient checks run by the selfcheck command"""
import logging
from dataclasses import dataclass

import numpy as np

from flashsynth import tensor as ops
from flashsynth import utils
from flashsynth.datagen import Example, Task
from flashsynth.dsl import try_eval
from flashsynth.encoders import VARIANTS, IOEncoder
from flashsynth.gradcheck import grad_check
from flashsynth.model import R3NN_ENGINE, Model
from flashsynth.params import ParamStore
from flashsynth.syntax import parse_program
from flashsynth.train import prepare, task_loss


logger = logging.getLogger(__name__)

GOLDENS = [
    ('Concat(SubStr(Match(Tok(" "), -1, End), ConstPos(-1)), ConstStr(", "), '
     'SubStr(ConstPos(0), ConstPos(1)), ConstStr("."))',
     'William Henry Charles', 'Charles, W.'),
    ('Concat(SubStr(ConstPos(0), Match(Digits, -1, End)), ConstStr("]"))',
     '[CPT-00350', '[CPT-00350]'),
    ('Concat(ConstStr("0x"), SubStr(ConstPos(0), ConstPos(2)))',
     '732606129', '0x73'),
]

PRIMITIVE_TOLERANCE = 1e-6
MODEL_TOLERANCE = 1e-4


@dataclass
class CheckResult:
    name: str
    ok: bool
    detail: str = ''

    def to_dict(self):
        return {'name': self.name, 'ok': self.ok, 'detail': self.detail}


def interpreter_goldens():
    results = []
    for text, value, expected in GOLDENS:
        output = try_eval(parse_program(text), value)
        results.append(CheckResult(
            'golden %s' % value, output == expected, 'got %r expected %r' % (output, expected)))
    return results


def _weights(shape, name):
    return ops.constant(utils.seeded_rng('selfcheck', name).normal(size=shape))


def _weighted_sum(tensor, name):
    """scalar mixing every element with fixed random weights"""
    return ops.reduce_sum(tensor * _weights(tensor.shape, name))


def primitive_cases():
    """name -> (parameter shapes, loss function of bound parameters)"""
    matrix = {'x': (3, 4), 'y': (3, 4)}
    return {
        'add': (matrix, lambda p: _weighted_sum(p['x'] + p['y'], 'add')),
        'sub': (matrix, lambda p: _weighted_sum(p['x'] - p['y'], 'sub')),
        'mul': (matrix, lambda p: _weighted_sum(p['x'] * p['y'], 'mul')),
        'broadcast': ({'x': (3, 4), 'y': (4,)},
                      lambda p: _weighted_sum(p['x'] * p['y'] + p['y'], 'broadcast')),
        'scale': ({'x': (3, 4)}, lambda p: _weighted_sum(ops.scale(p['x'], -2.5), 'scale')),
        'matmul': ({'x': (3, 4), 'y': (4, 2)},
                   lambda p: _weighted_sum(ops.matmul(p['x'], p['y']), 'matmul')),
        'matmul_vector': ({'x': (4,), 'y': (4, 2)},
                          lambda p: _weighted_sum(ops.matmul(p['x'], p['y']), 'matmul_vector')),
        'matmul_batched': ({'x': (2, 3, 4), 'y': (4, 2)},
                           lambda p: _weighted_sum(ops.matmul(p['x'], p['y']), 'matmul_batched')),
        'matmul_batched_pairs': (
            {'x': (2, 3, 4), 'y': (2, 4, 3)},
            lambda p: _weighted_sum(ops.matmul(p['x'], p['y']), 'matmul_batched_pairs')),
        'tanh': ({'x': (3, 4)}, lambda p: _weighted_sum(ops.tanh(p['x']), 'tanh')),
        'sigmoid': ({'x': (3, 4)}, lambda p: _weighted_sum(ops.sigmoid(p['x']), 'sigmoid')),
        'exp': ({'x': (3, 4)}, lambda p: _weighted_sum(ops.exp(p['x']), 'exp')),
        'log': ({'x': (3, 4)},
                lambda p: _weighted_sum(ops.log(p['x'] * p['x'] + 1.0), 'log')),
        'softmax': ({'x': (3, 4)}, lambda p: _weighted_sum(ops.softmax(p['x']), 'softmax')),
        'log_softmax': ({'x': (3, 4)},
                        lambda p: _weighted_sum(ops.log_softmax(p['x'], axis=0), 'log_softmax')),
        'reduce_sum': ({'x': (3, 4)},
                       lambda p: _weighted_sum(ops.reduce_sum(p['x'], axis=1), 'reduce_sum')),
        'concat': (matrix, lambda p: _weighted_sum(ops.concat([p['x'], p['y']], axis=1), 'concat')),
        'split': ({'x': (3, 4)}, lambda p: _weighted_sum(
            ops.split(p['x'], [1, 3], axis=1)[1], 'split')),
        'stack': (matrix, lambda p: _weighted_sum(ops.stack([p['x'], p['y']], axis=1), 'stack')),
        'reshape': ({'x': (3, 4)}, lambda p: _weighted_sum(p['x'].reshape(2, 6), 'reshape')),
        'transpose': ({'x': (2, 3, 4)},
                      lambda p: _weighted_sum(ops.transpose(p['x'], (0, 2, 1)), 'transpose')),
        'select': ({'x': (3, 4)}, lambda p: _weighted_sum(
            ops.select(p['x'], (np.array([0, 2, 0]), np.array([1, 1, 1]))), 'select')),
        'embedding_lookup': ({'x': (5, 3)}, lambda p: _weighted_sum(
            ops.embedding_lookup(p['x'], [[0, 4], [4, 1]]), 'embedding_lookup')),
    }


def primitive_checks(seed=0, tolerance=PRIMITIVE_TOLERANCE):
    results = []
    for name, (shapes, loss_fn) in primitive_cases().items():
        store = ParamStore(seed)
        for param_name, shape in shapes.items():
            store.add(param_name, shape, value=utils.seeded_rng(name, param_name).normal(
                size=shape))
        error = grad_check(loss_fn, store)
        results.append(CheckResult('grad %s' % name, error < tolerance,
                                   'max relative error %.3g' % error))
    return results


def tiny_task():
    examples = (Example('ab cd', 'a'), Example('b', 'b'))
    return Task(examples, parse_program('Concat(SubStr(ConstPos(0), ConstPos(1)))'), 'tiny')


def r3nn_check(synth_config, max_coords=60, seed=0, tolerance=MODEL_TOLERANCE):
    model = Model(synth_config, R3NN_ENGINE, seed)
    example = prepare(model, [tiny_task()])[0]
    error = grad_check(lambda params: task_loss(model, params, example), model.store,
                       max_coords=max_coords, seed=seed)
    return CheckResult('grad r3nn', error < tolerance, 'max relative error %.3g' % error)


def encoder_checks(synth_config, max_coords=60, seed=0, tolerance=MODEL_TOLERANCE):
    results = []
    task = tiny_task()
    for variant in VARIANTS:
        store = ParamStore(seed)
        encoder = IOEncoder(store, synth_config, variant)

        def loss_fn(params, encoder=encoder, variant=variant):
            return _weighted_sum(encoder.encode_io_set(params, task.examples), variant)
        error = grad_check(loss_fn, store, max_coords=max_coords, seed=seed)
        results.append(CheckResult('grad encoder %s' % variant, error < tolerance,
                                   'max relative error %.3g' % error))
    return results


def run_selfcheck(synth_config, max_coords=60, seed=0):
    results = interpreter_goldens()
    results += primitive_checks(seed)
    results += encoder_checks(synth_config, max_coords, seed)
    results.append(r3nn_check(synth_config, max_coords, seed))
    for result in results:
        if not result.ok:
            logger.warning('%s failed: %s', result.name, result.detail)
    return results
