import configparser
import unittest
from flashsynth import conf
from flashsynth.exceptions import ConfigError
from tests import CONFIG_FILE, create_config


class TestConf(unittest.TestCase):

    def test_load_config(self):
        """test loading when no config file is specified for test coverage"""
        self.assertIsNotNone(conf.load_config(None))

    def test_profile_section(self):
        synth_config = create_config('tiny')
        self.assertEqual(synth_config.get('max_length'), 8)
        self.assertEqual(synth_config.get('model_dim'), 8)
        self.assertEqual(synth_config.get('constant_strings'), ['@', ', '])
        self.assertEqual(synth_config.get('conditioning'), ['pre'])
        self.assertEqual(synth_config.get('leaf_lstm'), False)
        self.assertEqual(synth_config.get('adam_eps'), 1e-8)

    def test_unknown_section_falls_back_to_default(self):
        synth_config = conf.parse_raw_config(conf.raw_config('not_a_section', CONFIG_FILE))
        self.assertEqual(synth_config.get('max_length'), 32)
        self.assertEqual(synth_config.get('samples'), [0, 1, 10, 50, 100])

    def test_build_config_overrides(self):
        synth_config = conf.build_config('tiny', CONFIG_FILE, seed=7)
        self.assertEqual(synth_config.get('seed'), 7)

    def test_bad_values(self):
        passes = [
            {'encoder': 'Transformer'},
            {'conditioning': ['pre', 'middle']},
            {'cond_net': 'gru'},
            {'split_ratios': [0.5, 0.5, 0.5]},
            {'max_length': 0},
            {'leaf_lstm': True, 'model_dim': 7},
        ]
        for overrides in passes:
            with self.assertRaises(ConfigError, msg=str(overrides)):
                conf.build_config('tiny', CONFIG_FILE, **overrides)

    def test_unparseable_value(self):
        config = configparser.ConfigParser(interpolation=None)
        config.read_string('[DEFAULT]\nmax_length: many\n')
        with self.assertRaises(ConfigError):
            conf.parse_raw_config(config['DEFAULT'])

    def test_config_hash(self):
        first = create_config('tiny')
        second = create_config('tiny')
        self.assertEqual(conf.config_hash(first), conf.config_hash(second))
        second['seed'] = 99
        self.assertNotEqual(conf.config_hash(first), conf.config_hash(second))


if __name__ == '__main__':
    unittest.main()
