import math
import unittest
import numpy as np
from flashsynth import tensor as ops
from flashsynth.exceptions import (
    CompleteTree, ConfigError, DimensionMismatch, InvalidExpansion)
from flashsynth.gradcheck import grad_check
from flashsynth.grammar import (
    build_grammar, expand_leaf, leaf, program_size, program_to_tree, tree_size, validate_tree)
from flashsynth.params import ParamStore
from flashsynth.r3nn import (
    COMPLETE, INCOMPLETE, SAMPLE, Expansion, R3NN, apply_expansion, valid_expansions)
from flashsynth.syntax import parse_program
from tests import create_config

IO_DIM = 6


class TestR3NN(unittest.TestCase):

    def setUp(self):
        self.grammar = build_grammar(create_config('tiny'))
        self.store = ParamStore(seed=2)
        self.network = R3NN(self.store, self.grammar, 8, IO_DIM)
        self.params = self.store.bind(None)
        self.io_enc = ops.constant(np.random.default_rng(3).normal(size=IO_DIM))

    def sub_str_tree(self):
        tree = expand_leaf(self.grammar.tagged_rule('e_end'))
        return apply_expansion(
            tree, Expansion((0,), self.grammar.tagged_rule('SubStr')), self.grammar)

    def test_distribution_sums_to_one(self):
        for tree in (leaf('e'), self.sub_str_tree()):
            expansions, probabilities = self.network.expansion_distribution(
                self.params, tree, self.io_enc)
            self.assertEqual(len(expansions), len(valid_expansions(tree, self.grammar)))
            self.assertAlmostEqual(float(probabilities.sum()), 1.0)
            self.assertTrue(np.all(probabilities > 0))

    def test_uniform_scores(self):
        self.store.set('r3nn/omega', np.zeros(self.store.get('r3nn/omega').shape))
        root_rule = self.grammar.tagged_rule('e_end')
        loss = self.network.step_loss(self.params, leaf('e'), Expansion((), root_rule),
                                      self.io_enc)
        self.assertAlmostEqual(loss.item(), math.log(2))
        tree = expand_leaf(self.grammar.tagged_rule('e_cons'))
        loss = self.network.step_loss(
            self.params, tree, Expansion((1,), root_rule), self.io_enc)
        self.assertAlmostEqual(loss.item(), math.log(4))

    def test_sibling_leaves_differ(self):
        leaves, matrix = self.network.leaf_representations(
            self.params, self.sub_str_tree(), self.io_enc)
        self.assertEqual([path for path, _ in leaves], [(0, 0), (0, 1)])
        self.assertFalse(np.allclose(matrix.numpy()[0], matrix.numpy()[1]))

    def test_complete_tree(self):
        tree = program_to_tree(parse_program('Concat(ConstStr("@"))'), self.grammar)
        self.assertEqual(valid_expansions(tree, self.grammar), [])
        with self.assertRaises(CompleteTree):
            self.network.expansion_scores(self.params, tree, self.io_enc)

    def test_invalid_expansion(self):
        sub_str = self.grammar.tagged_rule('SubStr')
        with self.assertRaises(InvalidExpansion):
            apply_expansion(leaf('e'), Expansion((), sub_str))
        with self.assertRaises(InvalidExpansion):
            apply_expansion(leaf('e'), Expansion((5,), sub_str))
        with self.assertRaises(InvalidExpansion):
            self.network.step_loss(self.params, leaf('e'), Expansion((), sub_str), self.io_enc)

    def test_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatch):
            self.network.expansion_scores(self.params, leaf('e'), ops.constant(np.zeros(3)))

    def test_random_expansions_stay_valid(self):
        rng = np.random.default_rng(9)
        steps = 0
        while steps < 10000:
            tree = leaf('e')
            while tree_size(tree) < 15:
                expansions = valid_expansions(tree, self.grammar)
                if not expansions:
                    break
                tree = apply_expansion(
                    tree, expansions[rng.integers(len(expansions))], self.grammar)
                validate_tree(tree, self.grammar)
                steps += 1

    def test_generate(self):
        for seed in range(5):
            result = self.network.generate(self.params, self.io_enc, SAMPLE, 13, seed)
            self.assertIn(result.status, (COMPLETE, INCOMPLETE))
            validate_tree(result.tree, self.grammar)
            if result.status == COMPLETE:
                self.assertLessEqual(program_size(result.program), 13)
                self.assertEqual(program_size(result.program), tree_size(result.tree))
            else:
                self.assertIsNone(result.program)
            self.assertLessEqual(result.log_prob, 0.0)
            again = self.network.generate(self.params, self.io_enc, SAMPLE, 13, seed)
            self.assertEqual(again.tree, result.tree)
        result = self.network.generate(self.params, self.io_enc, max_size=2)
        self.assertEqual(result.status, INCOMPLETE)

    def test_conditioning_variants(self):
        passes = [
            {'conditioning': ('root',)},
            {'conditioning': ('post',)},
            {'conditioning': ('pre', 'root', 'post')},
            {'conditioning': ('pre',), 'cond_net': 'lstm'},
            {'leaf_lstm': True},
            {'rule_net_depth': 2},
        ]
        for options in passes:
            store = ParamStore()
            network = R3NN(store, self.grammar, 8, IO_DIM, **options)
            _, probabilities = network.expansion_distribution(
                store.bind(None), self.sub_str_tree(), self.io_enc)
            self.assertAlmostEqual(float(probabilities.sum()), 1.0, msg=str(options))
        with self.assertRaises(ConfigError):
            R3NN(ParamStore(), self.grammar, 7, IO_DIM, leaf_lstm=True)

    def test_gradients(self):
        target = Expansion((0, 1), self.grammar.tagged_rule('Match'))

        def loss_fn(params):
            return self.network.step_loss(params, self.sub_str_tree(), target, self.io_enc)
        self.assertLess(grad_check(loss_fn, self.store, max_coords=40, seed=2), 1e-4)


if __name__ == '__main__':
    unittest.main()
