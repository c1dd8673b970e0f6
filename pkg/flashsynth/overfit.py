"""train each engine on one small generated corpus and measure how well it reproduces it"""
import logging

from flashsynth import datagen
from flashsynth.exceptions import ConfigError
from flashsynth.model import ENGINES, R3NN_ENGINE, Model
from flashsynth.synth import evaluate, solve_rates
from flashsynth.train import greedy_accuracy, train


logger = logging.getLogger(__name__)

GREEDY_TARGET = 0.9
SAMPLED_TARGET = 0.98
SAMPLED_TARGET_K = 100


def non_decreasing(values):
    return all(first <= second for first, second in zip(values, values[1:]))


def engine_report(model, tasks, synth_config, seed, epochs, k_list):
    history = train(model, tasks, synth_config, epochs=epochs)
    evaluation = evaluate(model, tasks, k_list, seed, split='train')
    rates = solve_rates(evaluation)
    report = {
        'epochs': len(history.rows),
        'final_loss': history.rows[-1]['mean_loss'],
        'greedy_train_acc': greedy_accuracy(model, tasks),
        'solve_rates': [{'k': k, 'rate': rates[k]} for k in sorted(rates)],
        'monotone': non_decreasing([rates[k] for k in sorted(rates)]),
        'validity_rate': evaluation['validity_rate'],
    }
    if model.engine == R3NN_ENGINE and SAMPLED_TARGET_K in rates:
        report['meets_targets'] = (report['greedy_train_acc'] >= GREEDY_TARGET
                                   and rates[SAMPLED_TARGET_K] >= SAMPLED_TARGET)
    return report


def run_overfit(synth_config, n_tasks=50, seed=0, epochs=None, k_list=None, engines=ENGINES):
    """one report per engine, every engine trained on the same corpus

    Rates are measured on the training tasks themselves, so a model with
    enough capacity should come close to reproducing all of them.
    """
    if n_tasks < 1:
        raise ConfigError('the corpus needs at least one task')
    for engine in engines:
        if engine not in ENGINES:
            raise ConfigError('unknown engine %s' % engine)
    k_list = sorted(set(k_list if k_list is not None else
                        synth_config.get('samples', [0, 1, 10, 50, 100])))
    tasks = datagen.generate_corpus(synth_config, n_tasks, seed)
    report = {'tasks': len(tasks), 'seed': seed, 'max_size': synth_config.get('max_size', 9),
              'engines': {}}
    for engine in engines:
        model = Model(synth_config, engine, seed)
        report['engines'][engine] = engine_report(
            model, tasks, synth_config, seed, epochs, k_list)
        logger.info('%s greedy accuracy %.3f validity %.3f', engine,
                    report['engines'][engine]['greedy_train_acc'],
                    report['engines'][engine]['validity_rate'])
    return report
