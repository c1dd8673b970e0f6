import unittest
from unittest.mock import patch
import git
from flashsynth import utils
from flashsynth.exceptions import ConfigError
from tests import create_config


class TestUtils(unittest.TestCase):

    def test_printable_chars(self):
        chars = utils.printable_chars()
        self.assertEqual(len(chars), 95)
        self.assertEqual(chars[0], ' ')
        self.assertEqual(chars[-1], '~')

    def test_named_chars(self):
        self.assertEqual(utils.named_chars(None), '')
        self.assertEqual(utils.named_chars('none'), '')
        self.assertEqual(utils.named_chars('"ab "'), 'ab ')
        self.assertEqual(len(utils.named_chars('letters')), 52)
        with self.assertRaises(ConfigError):
            utils.named_chars('emoji')

    def test_constant_universe(self):
        self.assertEqual(utils.constant_universe(create_config('tiny')),
                         ['a', 'b', ' ', '@', ', '])
        self.assertEqual(utils.constant_universe(create_config('uniform')), ['@', '-'])

    def test_constant_universe_drops_duplicates(self):
        synth_config = {'constant_chars': '"ab"', 'constant_strings': ['b', 'ab']}
        self.assertEqual(utils.constant_universe(synth_config), ['a', 'b', 'ab'])

    def test_seed_streams(self):
        self.assertEqual(utils.seed_int('corpus', 1, 2), utils.seed_int('corpus', 1, 2))
        self.assertNotEqual(utils.seed_int('corpus', 1, 2), utils.seed_int('corpus', 2, 1))
        first = utils.seeded_rng('x', 3).normal(size=4)
        second = utils.seeded_rng('x', 3).normal(size=4)
        self.assertEqual(list(first), list(second))
        self.assertEqual(utils.seeded_random('y').random(), utils.seeded_random('y').random())

    def test_hashes(self):
        self.assertEqual(utils.text_hash('abc'), utils.bytes_hash(b'abc'))
        self.assertEqual(len(utils.text_hash('')), 64)

    @patch('flashsynth.utils.git.Repo')
    def test_get_last_commit(self, fake_repo):
        fake_repo.return_value.head.commit.hexsha = 'abc123'
        self.assertEqual(utils.get_last_commit(), 'abc123')

    @patch('flashsynth.utils.git.Repo')
    def test_get_last_commit_outside_a_repository(self, fake_repo):
        fake_repo.side_effect = git.InvalidGitRepositoryError('no repo')
        self.assertEqual(utils.get_last_commit(), 'unknown')


if __name__ == '__main__':
    unittest.main()
