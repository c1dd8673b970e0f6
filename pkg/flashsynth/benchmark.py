"""benchmark files and runs of every engine over them"""
import glob
import json
import logging
import os
import time
from collections import Counter
from dataclasses import dataclass

from flashsynth.corpus import examples_from_records
from flashsynth.datagen import Task, consistent
from flashsynth.enum_search import FOUND, SearchLimits, enum_search
from flashsynth.exceptions import FormatError, InvariantViolation, ProgramSyntaxError
from flashsynth.grammar import build_grammar, program_size
from flashsynth.synth import synthesize
from flashsynth.syntax import parse_program, serialize_program


logger = logging.getLogger(__name__)

ENUM_ENGINE = 'enum'

SOLVED = 'solved'
UNSOLVED = 'unsolved'


@dataclass(frozen=True)
class Benchmark:
    name: str
    train: tuple
    test: tuple = ()
    # a known solution, used only for reporting
    program: object = None

    @property
    def task(self):
        return Task(self.train, None, self.name)


def benchmark_from_dict(data, name=None):
    if not isinstance(data, dict):
        raise FormatError(None, 'benchmark must be a JSON object')
    train = examples_from_records(data.get('train'))
    if not train:
        raise FormatError(None, 'benchmark needs at least one train example')
    test = examples_from_records(data.get('test', []))
    program = None
    if data.get('program'):
        try:
            program = parse_program(data['program'])
        except ProgramSyntaxError as exception:
            raise FormatError(None, 'bad program: %s' % exception)
    return Benchmark(data.get('name') or name, train, test, program)


def load_benchmark(path):
    with open(path, 'r', encoding='utf-8') as open_file:
        try:
            data = json.load(open_file)
        except ValueError as exception:
            raise FormatError(None, '%s is not JSON: %s' % (path, exception))
    name = os.path.splitext(os.path.basename(path))[0]
    return benchmark_from_dict(data, name)


def load_benchmarks(path):
    """one benchmark file, or every *.json file of a directory in name order"""
    if os.path.isdir(path):
        return [load_benchmark(file_name)
                for file_name in sorted(glob.glob(os.path.join(path, '*.json')))]
    return [load_benchmark(path)]


def check_benchmark(benchmark, synth_config):
    """raise FormatError for strings the encoders cannot read"""
    max_length = synth_config.get('max_length', 32)
    for example in benchmark.train + benchmark.test:
        for value in (example.input, example.output):
            if len(value) > max_length:
                raise FormatError(None, '%s: %r is longer than %s' % (
                    benchmark.name, value, max_length))


def solve(benchmark, engine, synth_config, model=None, k_samples=0, seed=0, limits=None):
    """(program or None, details) for one benchmark"""
    task = benchmark.task
    if engine == ENUM_ENGINE:
        grammar = build_grammar(synth_config)
        result = enum_search(grammar, task, limits or SearchLimits.from_config(synth_config))
        details = result.to_dict()
        return (result.program if result.status == FOUND else None), details
    held_out_inputs = [example.input for example in benchmark.test]
    candidates = synthesize(model, task, k_samples, seed, held_out_inputs)
    details = {'candidates': [candidate.to_dict() for candidate in candidates]}
    return (candidates[0].program if candidates else None), details


def run_benchmark(benchmark, engine, synth_config, model=None, k_samples=0, seed=0,
                  limits=None):
    started = time.monotonic()
    program, details = solve(benchmark, engine, synth_config, model, k_samples, seed, limits)
    millis = int((time.monotonic() - started) * 1000)
    if program is not None and not consistent(program, benchmark.train):
        raise InvariantViolation('%s reported a program inconsistent with %s' % (
            engine, benchmark.name))
    result = {
        'name': benchmark.name,
        'engine': engine,
        'status': SOLVED if program is not None else UNSOLVED,
        'program': serialize_program(program) if program is not None else None,
        'size': program_size(program) if program is not None else None,
        'generalizes': None,
        'reference_size': (program_size(benchmark.program)
                           if benchmark.program is not None else None),
        'millis': millis,
    }
    if program is not None and benchmark.test:
        result['generalizes'] = consistent(program, benchmark.test)
    if engine == ENUM_ENGINE:
        result['expansions'] = details['expansions']
    else:
        result['candidates'] = len(details['candidates'])
    logger.info('%s %s with %s', benchmark.name, result['status'], engine)
    return result


def size_histogram(results, key):
    """size -> [benchmark count, solved count]"""
    histogram = {}
    for result in results:
        size = result[key]
        if size is None:
            continue
        row = histogram.setdefault(size, [0, 0])
        row[0] += 1
        if result['status'] == SOLVED:
            row[1] += 1
    return {size: histogram[size] for size in sorted(histogram)}


def run_benchmarks(benchmarks, engine, synth_config, model=None, k_samples=0, seed=0,
                   limits=None):
    results = [run_benchmark(benchmark, engine, synth_config, model, k_samples, seed, limits)
               for benchmark in benchmarks]
    max_size = synth_config.get('max_program_size', 13)
    within = [result for result in results
              if result['reference_size'] is not None and result['reference_size'] <= max_size]
    statuses = Counter(result['status'] for result in results)
    return {
        'engine': engine,
        'samples': k_samples,
        'seed': seed,
        'solved': statuses[SOLVED],
        'total': len(results),
        'generalized': sum(1 for result in results if result['generalizes']),
        'within_max_size': {
            'max_size': max_size,
            'solved': sum(1 for result in within if result['status'] == SOLVED),
            'total': len(within),
        },
        'reference_sizes': size_histogram(results, 'reference_size'),
        'solved_sizes': dict(sorted(Counter(
            result['size'] for result in results if result['size'] is not None).items())),
        'benchmarks': results,
    }
