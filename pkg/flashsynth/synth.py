"""sampling programs from a trained model and checking them against the examples"""
import logging
from dataclasses import dataclass

from flashsynth import utils
from flashsynth.datagen import consistent
from flashsynth.dsl import try_eval
from flashsynth.exceptions import ConfigError
from flashsynth.io2seq import PROGRAM
from flashsynth.model import IO2SEQ_ENGINE
from flashsynth.r3nn import GREEDY, SAMPLE
from flashsynth.syntax import serialize_program


logger = logging.getLogger(__name__)

GREEDY_SOURCE = 'greedy'
SAMPLE_SOURCE = 'sample'


def equivalent_wrt(program_a, program_b, inputs):
    """true if both programs run on every input and give the same strings"""
    for value in inputs:
        first = try_eval(program_a, value)
        second = try_eval(program_b, value)
        if first is None or second is None or first != second:
            return False
    return True


@dataclass
class Candidate:
    program: object
    log_prob: float
    source: str
    # position in the draw order: 0 is greedy, i is the i-th sample
    draw: int = 0

    def to_dict(self):
        return {
            'program': serialize_program(self.program),
            'log_prob': self.log_prob,
            'source': self.source,
        }


@dataclass
class Draw:
    """one generation attempt, program is None when it did not finish as a program"""
    program: object
    log_prob: float
    source: str
    draw: int


def _generate(model, params, io_enc, mode, rng_seed):
    if model.engine == IO2SEQ_ENGINE:
        result = model.network.generate(
            params, io_enc, mode, model.synth_config.get('max_tokens', 80), rng_seed)
        program = result.program if result.status == PROGRAM else None
    else:
        result = model.network.generate(
            params, io_enc, mode, model.synth_config.get('max_program_size', 13), rng_seed)
        program = result.program
    return program, result.log_prob


def draw_programs(model, task, k_samples, seed=0, stream=None):
    """greedy draw then k_samples samples

    Sample i reads its own seed stream, so the draws for a smaller k are a
    prefix of the draws for a larger one.
    """
    if k_samples < 0:
        raise ConfigError('k_samples must not be negative')
    stream = () if stream is None else tuple(stream)
    params = model.store.bind(None)
    io_enc = model.encode(params, task)
    program, log_prob = _generate(model, params, io_enc, GREEDY, 0)
    draws = [Draw(program, log_prob, GREEDY_SOURCE, 0)]
    for index in range(1, k_samples + 1):
        rng = utils.seeded_rng('sample', seed, *(stream + (index,)))
        program, log_prob = _generate(model, params, io_enc, SAMPLE, rng)
        draws.append(Draw(program, log_prob, SAMPLE_SOURCE, index))
    return draws


def rank_candidates(draws, task, held_out_inputs=None):
    """consistent draws, most probable first, one per behaviour

    With held-out inputs two programs count as the same candidate when they
    agree on the task inputs and the held-out inputs. Without them every
    consistent program agrees on the task inputs, so candidates are kept per
    distinct program.
    """
    inputs = list(task.inputs) + list(held_out_inputs or [])
    ordered = sorted(
        (item for item in draws if item.program is not None),
        key=lambda item: (-item.log_prob, item.draw))
    candidates = []
    keys = set()
    for item in ordered:
        if not consistent(item.program, task.examples):
            continue
        if held_out_inputs:
            key = tuple(try_eval(item.program, value) for value in inputs)
        else:
            key = item.program
        if key in keys:
            continue
        keys.add(key)
        candidates.append(Candidate(item.program, item.log_prob, item.source, item.draw))
    return candidates


def synthesize(model, task, k_samples=0, seed=0, held_out_inputs=None):
    """ranked programs consistent with every example of task, empty on failure

    k_samples of 0 draws the greedy program only.
    """
    draws = draw_programs(model, task, k_samples, seed)
    candidates = rank_candidates(draws, task, held_out_inputs)
    logger.debug('%s of %s draws consistent for %s', len(candidates), len(draws), task.name)
    return candidates


def evaluate(model, tasks, k_list=None, seed=0, split=None):
    """solve rate for every sample budget in k_list, from one set of draws per task

    Each task draws max(k_list) samples once from its own seed stream and a
    budget k looks at the greedy draw and the first k samples, so the rates
    never decrease with k.
    """
    if not tasks:
        raise ConfigError('no tasks to evaluate')
    k_list = sorted(set(k_list if k_list is not None else
                        model.synth_config.get('samples', [0, 1, 10, 50, 100])))
    max_k = k_list[-1]
    results = {k: {'k': k, 'solved': 0, 'total': len(tasks), 'tasks': []} for k in k_list}
    finished = 0
    attempts = 0
    for index, task in enumerate(tasks):
        draws = draw_programs(model, task, max_k, seed, stream=(index,))
        attempts += len(draws)
        finished += sum(1 for item in draws if item.program is not None)
        for k in k_list:
            candidates = rank_candidates(draws[:k + 1], task)
            # independent re-check through the interpreter
            solved = bool(candidates) and consistent(candidates[0].program, task.examples)
            detail = {
                'index': index,
                'name': task.name,
                'solved': solved,
                'program': serialize_program(candidates[0].program) if solved else None,
            }
            if solved:
                results[k]['solved'] += 1
            results[k]['tasks'].append(detail)
    report = {
        'engine': model.engine,
        'split': split,
        'seed': seed,
        'results': [results[k] for k in k_list],
        'validity_rate': finished / float(attempts),
    }
    for k in k_list:
        logger.info('k=%s solved %s of %s', k, results[k]['solved'], len(tasks))
    return report


def solve_rates(report):
    """k -> solved fraction, from an evaluate report"""
    return {row['k']: row['solved'] / float(row['total']) for row in report['results']}
