import os
import shutil
import tempfile
import unittest
from unittest.mock import patch
import numpy as np
from flashsynth import checkpoint
from flashsynth.encoders import LSTM_SUM_CC
from flashsynth.exceptions import CheckpointError, ConfigError
from flashsynth.io2seq import Io2Seq
from flashsynth.model import IO2SEQ_ENGINE, R3NN_ENGINE, Model, load_model
from flashsynth.params import ParamStore
from flashsynth.r3nn import R3NN
from tests import create_config


class TestModel(unittest.TestCase):

    def setUp(self):
        self.temp_dir = tempfile.mkdtemp()
        self.path = os.path.join(self.temp_dir, 'model.ckpt')
        self.synth_config = create_config('tiny')

    def tearDown(self):
        shutil.rmtree(self.temp_dir)

    def test_engines(self):
        model = Model(self.synth_config, R3NN_ENGINE)
        self.assertIsInstance(model.network, R3NN)
        self.assertEqual(model.encoder.variant, 'CC')
        model = Model(self.synth_config, IO2SEQ_ENGINE)
        self.assertIsInstance(model.network, Io2Seq)
        self.assertEqual(model.encoder.variant, LSTM_SUM_CC)
        self.assertEqual(self.synth_config['encoder'], 'CC')
        with self.assertRaises(ConfigError):
            Model(self.synth_config, 'transformer')

    def test_save_and_load(self):
        for engine in (R3NN_ENGINE, IO2SEQ_ENGINE):
            model = Model(self.synth_config, engine, seed=3)
            model.save(self.path)
            loaded = load_model(self.path, self.synth_config)
            self.assertEqual(loaded.engine, engine)
            self.assertEqual(loaded.store.names(), model.store.names())
            for name in model.store.names():
                np.testing.assert_array_equal(loaded.store.get(name), model.store.get(name))

    def test_mismatched_configuration(self):
        Model(self.synth_config).save(self.path)
        with self.assertRaises(CheckpointError):
            load_model(self.path, create_config('tiny', constant_strings=['@']))
        with self.assertRaises(CheckpointError):
            load_model(self.path, create_config('tiny', hidden_size=6))

    def test_checkpoint_without_hyperparameters(self):
        store = ParamStore()
        store.add('w', (2,))
        checkpoint.save_checkpoint(self.path, store)
        with self.assertRaises(CheckpointError):
            load_model(self.path)

    @patch('flashsynth.model.utils.get_last_commit')
    def test_provenance(self, fake_commit):
        fake_commit.return_value = 'abc123'
        manifest = Model(self.synth_config).save(self.path, provenance=True)
        self.assertEqual(manifest['commit'], 'abc123')
        self.assertEqual(manifest['encoder_fields']['hidden_size'], 4)
        self.assertNotIn('commit', Model(self.synth_config).manifest())


if __name__ == '__main__':
    unittest.main()
