import csv
import json
import math
import os
import shutil
import tempfile
import unittest
from unittest.mock import patch
from flashsynth import tensor as ops
from flashsynth.corpus import read_dataset
from flashsynth.datagen import Task
from flashsynth.exceptions import ConfigError, NonFiniteLoss
from flashsynth.grammar import program_size, program_to_tree
from flashsynth.model import IO2SEQ_ENGINE, R3NN_ENGINE, Model
from flashsynth.train import (
    LOG_FIELDS, derivation_trace, greedy_accuracy, prepare, replay, train)
from tests import TEST_DATA_PATH, create_config


class TestDerivationTrace(unittest.TestCase):

    def setUp(self):
        self.tasks = read_dataset(TEST_DATA_PATH + 'tasks.jsonl')
        self.model = Model(create_config('tiny'))

    def test_trace(self):
        grammar = self.model.grammar
        for task in self.tasks:
            trace = derivation_trace(task.program, grammar)
            self.assertEqual(len(trace), program_size(task.program))
            steps, tree = replay(trace, grammar)
            self.assertEqual(tree, program_to_tree(task.program, grammar))
            self.assertEqual(len(steps), len(trace))
            self.assertEqual(steps[0][0].symbol, 'e')

    def test_prepare(self):
        examples = prepare(self.model, self.tasks)
        self.assertEqual([example.steps for example in examples], [6, 9, 10])
        io2seq = Model(create_config('tiny'), IO2SEQ_ENGINE)
        examples = prepare(io2seq, self.tasks[:1])
        self.assertEqual(examples[0].steps, len(examples[0].targets) + 1)


class TestTrain(unittest.TestCase):

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.tasks = read_dataset(TEST_DATA_PATH + 'tasks.jsonl')
        self.synth_config = create_config('tiny')

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_log_and_checkpoint(self):
        log_path = os.path.join(self.temp_dir, 'train.csv')
        checkpoint_path = os.path.join(self.temp_dir, 'model.ckpt')
        history = train(Model(self.synth_config), self.tasks, self.synth_config, log_path,
                        checkpoint_path)
        self.assertEqual(len(history.rows), 2)
        self.assertTrue(os.path.exists(checkpoint_path))
        with open(log_path, newline='', encoding='utf-8') as open_file:
            rows = list(csv.DictReader(open_file))
        self.assertEqual(list(rows[0].keys()), LOG_FIELDS)
        self.assertEqual(rows[0]['greedy_train_acc'], '')
        self.assertLessEqual(float(rows[1]['greedy_train_acc']), 1.0)
        for loss in history.losses():
            self.assertTrue(math.isfinite(loss))

    def test_deterministic(self):
        first = train(Model(self.synth_config), self.tasks, self.synth_config)
        second = train(Model(self.synth_config), self.tasks, self.synth_config)
        self.assertEqual(first.losses(), second.losses())

    def test_loss_decreases(self):
        synth_config = create_config('tiny', learning_rate=0.01, epochs=20, accuracy_every=20)
        history = train(Model(synth_config), self.tasks[:1], synth_config)
        self.assertLess(history.losses()[-1], history.losses()[0])

    def test_io2seq(self):
        model = Model(self.synth_config, IO2SEQ_ENGINE)
        history = train(model, self.tasks, self.synth_config, epochs=1)
        self.assertEqual(len(history.rows), 1)
        self.assertGreater(history.losses()[0], 0.0)
        self.assertIn(greedy_accuracy(model, self.tasks), (0.0, 1 / 3.0, 2 / 3.0, 1.0))

    @patch('flashsynth.train.task_loss')
    def test_non_finite_loss(self, fake_loss):
        fake_loss.return_value = ops.constant(float('nan'))
        dump_path = os.path.join(self.temp_dir, 'dump.json')
        with self.assertRaises(NonFiniteLoss):
            train(Model(self.synth_config), self.tasks, self.synth_config, dump_path=dump_path)
        with open(dump_path, encoding='utf-8') as open_file:
            details = json.load(open_file)
        self.assertEqual(details['epoch'], 1)
        self.assertEqual(details['loss'], 'nan')

    def test_bad_input(self):
        model = Model(self.synth_config, R3NN_ENGINE)
        with self.assertRaises(ConfigError):
            train(model, [], self.synth_config)
        with self.assertRaises(ConfigError):
            train(model, [Task(self.tasks[0].examples)], self.synth_config)


if __name__ == '__main__':
    unittest.main()
