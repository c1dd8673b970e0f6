"""command line entry point"""
import argparse
import json
import logging
import os
import sys

from flashsynth import conf, corpus, datagen
from flashsynth.benchmark import (
    ENUM_ENGINE, check_benchmark, load_benchmarks, run_benchmark, run_benchmarks)
from flashsynth.datagen import consistent
from flashsynth.enum_search import FOUND, SearchLimits, enum_search
from flashsynth.exceptions import (
    CheckpointError, ConfigError, EncodingError, FormatError, InvariantViolation, ProgramError)
from flashsynth.grammar import build_grammar
from flashsynth.io2seq import Vocabulary
from flashsynth.model import ENGINES, R3NN_ENGINE, Model, load_model
from flashsynth.overfit import run_overfit
from flashsynth.selfcheck import run_selfcheck
from flashsynth.synth import evaluate
from flashsynth.train import train


logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NO_SOLUTION = 2
EXIT_CONFIG = 3
EXIT_INTERNAL = 4

USER_ERRORS = (
    ConfigError, FormatError, CheckpointError, ProgramError, EncodingError, OSError)


def emit(data):
    sys.stdout.write(json.dumps(data, ensure_ascii=False))
    sys.stdout.write('\n')
    sys.stdout.flush()


def emit_error(exception):
    sys.stderr.write(json.dumps({
        'error': exception.__class__.__name__, 'message': str(exception)}))
    sys.stderr.write('\n')


def load_synth_config(args, **overrides):
    if args.config and not os.path.exists(args.config):
        raise ConfigError('config file %s not found' % args.config)
    if args.seed is not None:
        overrides['seed'] = args.seed
    return conf.build_config(args.section, args.config, **overrides)


def neural_model(args):
    if not args.checkpoint:
        raise ConfigError('the %s engine needs --checkpoint' % args.engine)
    model = load_model(args.checkpoint)
    if model.engine != args.engine:
        raise ConfigError('checkpoint holds a %s model, not %s' % (model.engine, args.engine))
    return model


def search_limits(args, synth_config):
    return SearchLimits.from_config(
        synth_config, max_size=args.max_size, time_budget_ms=args.time_budget_ms)


def command_gen_data(args):
    synth_config = load_synth_config(args)
    seed = synth_config.get('seed', 0)
    tasks = datagen.generate_corpus(synth_config, args.count, seed, args.max_size, args.workers)
    splits = corpus.split_tasks(tasks, synth_config.get('split_ratios', (0.8, 0.1, 0.1)))
    os.makedirs(args.out, exist_ok=True)
    manifest = {'seed': seed, 'config_hash': conf.config_hash(synth_config), 'files': {}}
    for name in corpus.SPLIT_NAMES:
        path = os.path.join(args.out, '%s.jsonl' % name)
        corpus.write_dataset(splits[name], path)
        manifest['files'][name] = {'tasks': len(splits[name]), 'sha256': corpus.dataset_hash(path)}
    # training programs with fresh examples
    fresh = datagen.regenerate_examples(splits['train'], synth_config, seed)
    path = os.path.join(args.out, 'train_fresh.jsonl')
    corpus.write_dataset(fresh, path)
    manifest['files']['train_fresh'] = {'tasks': len(fresh), 'sha256': corpus.dataset_hash(path)}
    with open(os.path.join(args.out, 'manifest.json'), 'w', encoding='utf-8') as open_file:
        json.dump(manifest, open_file, indent=2, sort_keys=True)
    emit(manifest)
    return EXIT_OK


def command_train(args):
    synth_config = load_synth_config(args)
    tasks = corpus.read_dataset(args.data)
    if args.test:
        corpus.check_disjoint(tasks, corpus.read_dataset(args.test))
    model = Model(synth_config, args.engine)
    history = train(model, tasks, synth_config, args.log, args.checkpoint, args.dump,
                    args.epochs)
    emit({'engine': args.engine, 'epochs': len(history.rows),
          'final': history.rows[-1] if history.rows else None,
          'checkpoint': args.checkpoint})
    return EXIT_OK


def _benchmarks(args, synth_config):
    benchmarks = load_benchmarks(args.benchmark)
    for benchmark in benchmarks:
        check_benchmark(benchmark, synth_config)
    return benchmarks


def command_synth(args):
    synth_config = load_synth_config(args)
    model = None if args.engine == ENUM_ENGINE else neural_model(args)
    solved = True
    for benchmark in _benchmarks(args, synth_config):
        result = run_benchmark(benchmark, args.engine, synth_config, model,
                               max(args.samples), synth_config.get('seed', 0),
                               search_limits(args, synth_config))
        emit(result)
        solved = solved and result['program'] is not None
    return EXIT_OK if solved else EXIT_NO_SOLUTION


def command_enum(args):
    """one search result per benchmark: status, program, expansions and millis"""
    synth_config = load_synth_config(args)
    grammar = build_grammar(synth_config)
    limits = search_limits(args, synth_config)
    solved = True
    for benchmark in _benchmarks(args, synth_config):
        result = enum_search(grammar, benchmark.task, limits)
        if result.status == FOUND and not consistent(result.program, benchmark.train):
            raise InvariantViolation('enum returned a program inconsistent with %s' % (
                benchmark.name))
        emit(result.to_dict())
        solved = solved and result.status == FOUND
    return EXIT_OK if solved else EXIT_NO_SOLUTION


def command_eval(args):
    synth_config = load_synth_config(args)
    model = neural_model(args)
    tasks = corpus.read_dataset(args.data)
    report = evaluate(model, tasks, args.samples, synth_config.get('seed', 0), args.split)
    emit(report)
    return EXIT_OK


def command_bench(args):
    synth_config = load_synth_config(args)
    model = None if args.engine == ENUM_ENGINE else neural_model(args)
    benchmarks = _benchmarks(args, synth_config)
    budgets = [0] if args.engine == ENUM_ENGINE else sorted(set(args.samples))
    for k_samples in budgets:
        emit(run_benchmarks(benchmarks, args.engine, synth_config, model, k_samples,
                            synth_config.get('seed', 0), search_limits(args, synth_config)))
    return EXIT_OK


def command_grammar_dump(args):
    synth_config = load_synth_config(args)
    grammar = build_grammar(synth_config)
    if args.vocabulary:
        sys.stdout.write(Vocabulary(grammar).dump())
    else:
        sys.stdout.write(grammar.dump())
    sys.stdout.write('\n')
    return EXIT_OK


def command_selfcheck(args):
    args.section = args.section or 'tiny'
    synth_config = load_synth_config(args)
    results = run_selfcheck(synth_config, args.max_coords, synth_config.get('seed', 0))
    for result in results:
        emit(result.to_dict())
    return EXIT_OK if all(result.ok for result in results) else EXIT_INTERNAL


def command_overfit(args):
    args.section = args.section or 'overfit'
    synth_config = load_synth_config(args)
    emit(run_overfit(synth_config, args.count, synth_config.get('seed', 0), args.epochs,
                     args.samples, args.engines))
    return EXIT_OK


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='INI configuration file')
    common.add_argument('--section', help='configuration profile section')
    common.add_argument('--seed', type=int, help='overrides the configured seed')
    common.add_argument('--verbose', action='store_true', help='debug logging on stderr')

    engines = list(ENGINES) + [ENUM_ENGINE]
    parser = argparse.ArgumentParser(
        prog='flashsynth', description='string transformation programs from examples')
    subparsers = parser.add_subparsers(dest='command', required=True)

    gen_data = subparsers.add_parser('gen-data', parents=[common], help='generate a corpus')
    gen_data.add_argument('--out', required=True, help='output directory')
    gen_data.add_argument('--count', type=int, default=1000, help='number of tasks')
    gen_data.add_argument('--max-size', type=int)
    gen_data.add_argument('--workers', type=int, default=1)
    gen_data.set_defaults(handler=command_gen_data)

    train_parser = subparsers.add_parser('train', parents=[common], help='train a model')
    train_parser.add_argument('--data', required=True, help='training JSONL file')
    train_parser.add_argument('--test', help='test JSONL file that must share no program')
    train_parser.add_argument('--engine', choices=list(ENGINES), default=R3NN_ENGINE)
    train_parser.add_argument('--checkpoint', required=True, help='checkpoint to write')
    train_parser.add_argument('--log', help='training curve CSV')
    train_parser.add_argument('--dump', help='diagnostic JSON written on a non-finite loss')
    train_parser.add_argument('--epochs', type=int)
    train_parser.set_defaults(handler=command_train)

    for name, handler, help_text in (
            ('synth', command_synth, 'synthesize programs for benchmark files'),
            ('enum', command_enum, 'enumerative search only'),
            ('bench', command_bench, 'run an engine over a benchmark directory')):
        command = subparsers.add_parser(name, parents=[common], help=help_text)
        command.add_argument('--benchmark', '--benchmarks', dest='benchmark', required=True,
                             help='benchmark file or directory')
        if name != 'enum':
            command.add_argument('--engine', choices=engines, default=R3NN_ENGINE)
        command.add_argument('--checkpoint')
        command.add_argument('--samples', type=int, nargs='+', default=[100])
        command.add_argument('--max-size', type=int)
        command.add_argument('--time-budget-ms', type=int)
        command.set_defaults(handler=handler)

    eval_parser = subparsers.add_parser('eval', parents=[common], help='solve rates per budget')
    eval_parser.add_argument('--data', required=True, help='JSONL split to evaluate')
    eval_parser.add_argument('--split', help='label recorded in the report')
    eval_parser.add_argument('--engine', choices=list(ENGINES), default=R3NN_ENGINE)
    eval_parser.add_argument('--checkpoint', required=True)
    eval_parser.add_argument('--samples', type=int, nargs='+', default=[0, 1, 10, 50, 100])
    eval_parser.set_defaults(handler=command_eval)

    dump = subparsers.add_parser('grammar-dump', parents=[common], help='print the grammar')
    dump.add_argument('--vocabulary', action='store_true', help='print the io2seq tokens')
    dump.set_defaults(handler=command_grammar_dump)

    selfcheck = subparsers.add_parser('selfcheck', parents=[common], help='goldens and grad checks')
    selfcheck.add_argument('--max-coords', type=int, default=60)
    selfcheck.set_defaults(handler=command_selfcheck)

    overfit = subparsers.add_parser(
        'overfit', parents=[common], help='train and evaluate on one small generated corpus')
    overfit.add_argument('--count', type=int, default=50, help='number of tasks')
    overfit.add_argument('--epochs', type=int)
    overfit.add_argument('--samples', type=int, nargs='+', default=[0, 1, 10, 50, 100])
    overfit.add_argument('--engines', choices=list(ENGINES), nargs='+', default=list(ENGINES))
    overfit.set_defaults(handler=command_overfit)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO, stream=sys.stderr,
        format='%(asctime)s %(levelname)s %(name)s %(message)s')
    try:
        return args.handler(args)
    except USER_ERRORS as exception:
        emit_error(exception)
        return EXIT_CONFIG
    except Exception as exception:
        logger.debug('command failed', exc_info=True)
        emit_error(exception)
        return EXIT_INTERNAL


if __name__ == '__main__':
    sys.exit(main())
