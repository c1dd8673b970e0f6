"""supervised training of the generator networks on derivation traces"""
import csv
import json
import logging
import math
import os
from dataclasses import dataclass, field

from flashsynth import utils
from flashsynth import tensor as ops
from flashsynth.exceptions import ConfigError, NonFiniteLoss
from flashsynth.grammar import leaf, node_at, open_leaves, program_to_tree
from flashsynth.io2seq import linearize
from flashsynth.model import IO2SEQ_ENGINE
from flashsynth.params import Adam
from flashsynth.r3nn import GREEDY, Expansion, apply_expansion
from flashsynth.syntax import serialize_program


logger = logging.getLogger(__name__)

LOG_FIELDS = ['epoch', 'mean_loss', 'greedy_train_acc']


def derivation_trace(program, grammar):
    """expansions rebuilding program, always at the leftmost non-terminal leaf"""
    target = program_to_tree(program, grammar)
    tree = leaf(grammar.start)
    trace = []
    while True:
        leaves = open_leaves(tree, grammar)
        if not leaves:
            return trace
        path, _ = leaves[0]
        expansion = Expansion(path, node_at(target, path).rule)
        trace.append(expansion)
        tree = apply_expansion(tree, expansion, grammar)


def replay(trace, grammar):
    """(partial tree, expansion) before every step, then the finished tree"""
    tree = leaf(grammar.start)
    steps = []
    for expansion in trace:
        steps.append((tree, expansion))
        tree = apply_expansion(tree, expansion, grammar)
    return steps, tree


def step_loss(model, params, ppt, target, io_enc):
    return model.network.step_loss(params, ppt, target, io_enc)


@dataclass
class TrainingExample:
    task: object
    # (partial tree, target expansion) pairs for r3nn, linear tokens for io2seq
    targets: list
    steps: int


def prepare(model, tasks):
    examples = []
    for task in tasks:
        if model.engine == IO2SEQ_ENGINE:
            tokens = linearize(task.program, model.grammar)
            examples.append(TrainingExample(task, tokens, len(tokens) + 1))
        else:
            steps, _ = replay(derivation_trace(task.program, model.grammar), model.grammar)
            examples.append(TrainingExample(task, steps, len(steps)))
    return examples


def task_loss(model, params, example):
    """summed loss over every target of one task, encoding its examples once"""
    io_enc = model.encode(params, example.task)
    if model.engine == IO2SEQ_ENGINE:
        return model.network.sequence_loss(params, example.targets, io_enc)
    losses = [step_loss(model, params, ppt, target, io_enc) for ppt, target in example.targets]
    return ops.reduce_sum(ops.stack(losses))


def greedy_accuracy(model, tasks):
    """fraction of tasks whose program greedy generation reproduces exactly"""
    if not tasks:
        return 0.0
    params = model.store.bind(None)
    hits = 0
    for task in tasks:
        io_enc = model.encode(params, task)
        if model.engine == IO2SEQ_ENGINE:
            result = model.network.generate(
                params, io_enc, GREEDY, model.synth_config.get('max_tokens', 80))
        else:
            result = model.network.generate(
                params, io_enc, GREEDY, model.synth_config.get('max_program_size', 13))
        if result.program is not None and result.program == task.program:
            hits += 1
    return hits / float(len(tasks))


@dataclass
class TrainingHistory:
    rows: list = field(default_factory=list)

    def losses(self):
        return [row['mean_loss'] for row in self.rows]


def _dump_non_finite(dump_path, epoch, batch_index, example, value):
    details = {
        'epoch': epoch,
        'batch': batch_index,
        'program': serialize_program(example.task.program),
        'examples': [[item.input, item.output] for item in example.task.examples],
        'loss': repr(value),
    }
    if dump_path:
        with open(dump_path, 'w', encoding='utf-8') as open_file:
            json.dump(details, open_file, indent=2)
    return details


def train(model, tasks, synth_config=None, log_path=None, checkpoint_path=None,
          dump_path=None, epochs=None):
    """minimize the mean per-step loss over the tasks, in minibatches of whole tasks"""
    if not tasks:
        raise ConfigError('no training tasks')
    if any(task.program is None for task in tasks):
        raise ConfigError('every training task needs its source program')
    synth_config = synth_config or model.synth_config
    epochs = synth_config.get('epochs', 500) if epochs is None else epochs
    batch_size = synth_config.get('batch_size', 8)
    accuracy_every = synth_config.get('accuracy_every', 10)
    seed = synth_config.get('seed', 0)
    optimizer = Adam.from_config(model.store, synth_config)
    examples = prepare(model, tasks)
    history = TrainingHistory()
    log_file = None
    writer = None
    if log_path:
        log_file = open(log_path, 'w', newline='', encoding='utf-8')
        writer = csv.DictWriter(log_file, fieldnames=LOG_FIELDS)
        writer.writeheader()
    try:
        for epoch in range(1, epochs + 1):
            order = list(range(len(examples)))
            utils.seeded_random('epoch', seed, epoch).shuffle(order)
            total_loss = 0.0
            total_steps = 0
            for batch_index, start in enumerate(range(0, len(order), batch_size)):
                batch = [examples[index] for index in order[start:start + batch_size]]
                batch_steps = sum(example.steps for example in batch)
                model.store.zero_grad()
                for example in batch:
                    tape = ops.Tape()
                    loss = task_loss(model, model.store.bind(tape), example)
                    value = loss.item()
                    if not math.isfinite(value):
                        details = _dump_non_finite(dump_path, epoch, batch_index, example, value)
                        raise NonFiniteLoss('non-finite loss %s at epoch %s batch %s' % (
                            details['loss'], epoch, batch_index))
                    ops.backward(ops.scale(loss, 1.0 / batch_steps), model.store)
                    total_loss += value
                total_steps += batch_steps
                optimizer.step()
            row = {'epoch': epoch, 'mean_loss': total_loss / max(1, total_steps),
                   'greedy_train_acc': ''}
            if epoch % accuracy_every == 0 or epoch == epochs:
                row['greedy_train_acc'] = greedy_accuracy(model, tasks)
            history.rows.append(row)
            logger.info('epoch %s mean loss %.6f accuracy %s', epoch, row['mean_loss'],
                        row['greedy_train_acc'])
            if writer:
                writer.writerow(row)
                log_file.flush()
    finally:
        if log_file:
            log_file.close()
    if checkpoint_path:
        model.save(checkpoint_path)
        logger.info('saved checkpoint to %s', os.path.abspath(checkpoint_path))
    return history
