"""Recursive-Reverse-Recursive neural network over partial program trees

Every symbol has an embedding phi and every rule an embedding omega. A
bottom-up pass with one network f_r per rule gives the root a global tree
vector; a top-down pass with one network g_r per rule hands every leaf a vector
that depends on the whole tree. An expansion (leaf, rule) scores the dot
product of the leaf vector and omega(rule); a softmax over all valid
expansions gives the generation distribution.
"""
import logging
from dataclasses import dataclass

import numpy as np

from flashsynth import tensor as ops
from flashsynth import utils
from flashsynth.exceptions import (
    CompleteTree, ConfigError, DimensionMismatch, InvalidExpansion)
from flashsynth.grammar import (
    Rule, expand_leaf, iter_leaves, leaf, node_at, replace_at, tree_size, tree_to_program)
from flashsynth.nn import BiLSTM, Dense, FeedForward
from flashsynth.params import ZEROS


logger = logging.getLogger(__name__)

GREEDY = 'greedy'
SAMPLE = 'sample'

COMPLETE = 'complete'
INCOMPLETE = 'incomplete'


@dataclass(frozen=True)
class Expansion:
    path: tuple
    rule: Rule


@dataclass
class Generation:
    status: str
    tree: object
    log_prob: float
    program: object = None


def valid_expansions(ppt, grammar):
    """every (non-terminal leaf, applicable rule) pair, leaves left to right"""
    return [Expansion(path, rule)
            for path, item in iter_leaves(ppt) if not grammar.is_terminal(item.symbol)
            for rule in grammar.rules_for(item.symbol)]


def apply_expansion(ppt, expansion, grammar=None):
    """ppt with the expansion's leaf replaced by a node of its rule"""
    try:
        target = node_at(ppt, expansion.path)
    except (IndexError, TypeError):
        raise InvalidExpansion('no node at %s' % (expansion.path,))
    if not target.is_leaf or target.symbol != expansion.rule.lhs:
        raise InvalidExpansion('rule %s does not apply to %s at %s' % (
            expansion.rule, target.symbol, expansion.path))
    if grammar is not None and grammar.is_terminal(target.symbol):
        raise InvalidExpansion('terminal leaf at %s' % (expansion.path,))
    return replace_at(ppt, expansion.path, expand_leaf(expansion.rule))


class R3NN(object):

    def __init__(self, store, grammar, model_dim, io_dim, rule_net_depth=1,
                 conditioning=('pre',), cond_net='feedforward', leaf_lstm=False,
                 prefix='r3nn'):
        self.grammar = grammar
        self.model_dim = model_dim
        self.io_dim = io_dim
        self.conditioning = tuple(conditioning)
        self.cond_net = cond_net
        self.leaf_lstm = None
        self.prefix = prefix
        if (leaf_lstm or ('pre' in self.conditioning and cond_net == 'lstm')) and model_dim % 2:
            raise ConfigError('bidirectional leaf networks need an even model_dim')
        store.add(prefix + '/phi', (len(grammar.symbols), model_dim))
        store.add(prefix + '/omega', (len(grammar.rules), model_dim))
        hidden = [model_dim] * rule_net_depth
        self.rule_nets = []
        self.reverse_nets = []
        for rule in grammar.rules:
            width = rule.arity * model_dim
            self.rule_nets.append(FeedForward(
                store, '%s/f/%d' % (prefix, rule.index), [width] + hidden + [model_dim]))
            self.reverse_nets.append(FeedForward(
                store, '%s/g/%d' % (prefix, rule.index), [model_dim] + hidden + [width]))
        if 'pre' in self.conditioning:
            if cond_net == 'lstm':
                self.cond_lstm = BiLSTM(store, prefix + '/cond', model_dim + io_dim, model_dim // 2)
            else:
                store.add(prefix + '/cond/w_phi', (model_dim, model_dim))
                store.add(prefix + '/cond/w_io', (io_dim, model_dim))
                store.add(prefix + '/cond/b', (model_dim,), ZEROS)
                self.cond_out = FeedForward(store, prefix + '/cond/out', [model_dim, model_dim])
        if 'root' in self.conditioning:
            self.root_net = Dense(store, prefix + '/root', model_dim + io_dim, model_dim)
        if 'post' in self.conditioning:
            self.post_net = Dense(store, prefix + '/post', model_dim + io_dim, model_dim)
        if leaf_lstm:
            self.leaf_lstm = BiLSTM(store, prefix + '/leaf', model_dim, model_dim // 2)

    def _io(self, io_enc):
        io_enc = ops.as_tensor(io_enc)
        if io_enc.shape != (self.io_dim,):
            raise DimensionMismatch('example encoding has shape %s, expected (%s,)' % (
                io_enc.shape, self.io_dim))
        return io_enc

    def _with_io(self, rows, io_enc):
        """rows of a (L, M) matrix each concatenated with the example encoding"""
        count = rows.shape[0]
        tiled = ops.concat([io_enc.reshape(1, -1)] * count, axis=0)
        return ops.concat([rows, tiled], axis=1)

    def leaf_inputs(self, params, ppt, io_enc):
        """(leaves, (L, M) matrix) of symbol embeddings, pre-conditioned when configured"""
        leaves = list(iter_leaves(ppt))
        indexes = [self.grammar.symbol_index[item.symbol] for _, item in leaves]
        rows = ops.embedding_lookup(params[self.prefix + '/phi'], indexes)
        if 'pre' not in self.conditioning:
            return leaves, rows
        io_enc = self._io(io_enc)
        if self.cond_net == 'lstm':
            outputs, _ = self.cond_lstm(params, self._with_io(rows, io_enc).reshape(
                1, len(leaves), -1))
            return leaves, outputs.reshape(len(leaves), self.model_dim)
        hidden = ops.tanh(
            ops.matmul(rows, params[self.prefix + '/cond/w_phi'])
            + ops.matmul(io_enc, params[self.prefix + '/cond/w_io'])
            + params[self.prefix + '/cond/b'])
        return leaves, self.cond_out(params, hidden)

    def recursive_pass(self, params, ppt, leaf_matrix):
        """vector of every node by path, the root's at ()"""
        values = {}
        counter = [0]

        def visit(node, path):
            if node.is_leaf:
                values[path] = leaf_matrix[counter[0]]
                counter[0] += 1
                return values[path]
            children = [visit(child, path + (index,)) for index, child in enumerate(node.children)]
            values[path] = self.rule_nets[node.rule.index](params, ops.concat(children, axis=0))
            return values[path]
        visit(ppt, ())
        return values

    def reverse_recursive_pass(self, params, ppt, root_value):
        """top-down vectors of the leaves, left to right"""
        leaf_values = []

        def visit(node, value):
            if node.is_leaf:
                leaf_values.append(value)
                return
            blocks = ops.split(self.reverse_nets[node.rule.index](params, value),
                               [self.model_dim] * node.rule.arity, axis=0)
            for child, block in zip(node.children, blocks):
                visit(child, block)
        visit(ppt, root_value)
        return leaf_values

    def leaf_representations(self, params, ppt, io_enc):
        """(leaves, (L, M) matrix) of globally informed leaf vectors"""
        leaves, rows = self.leaf_inputs(params, ppt, io_enc)
        values = self.recursive_pass(params, ppt, rows)
        root = values[()]
        if 'root' in self.conditioning:
            root = ops.tanh(self.root_net(params, ops.concat([root, self._io(io_enc)], axis=0)))
        matrix = ops.stack(self.reverse_recursive_pass(params, ppt, root), axis=0)
        if 'post' in self.conditioning:
            matrix = ops.tanh(self.post_net(params, self._with_io(matrix, self._io(io_enc))))
        if self.leaf_lstm is not None:
            outputs, _ = self.leaf_lstm(params, matrix.reshape(1, len(leaves), self.model_dim))
            matrix = outputs.reshape(len(leaves), self.model_dim)
        return leaves, matrix

    def expansion_scores(self, params, ppt, io_enc):
        """(expansions, log probabilities tensor) over the valid expansions of ppt"""
        leaves, matrix = self.leaf_representations(params, ppt, io_enc)
        expansions = []
        leaf_rows = []
        rule_rows = []
        for position, (path, item) in enumerate(leaves):
            if self.grammar.is_terminal(item.symbol):
                continue
            for rule in self.grammar.rules_for(item.symbol):
                expansions.append(Expansion(path, rule))
                leaf_rows.append(position)
                rule_rows.append(rule.index)
        if not expansions:
            raise CompleteTree('the tree has no non-terminal leaf')
        scores = ops.reduce_sum(
            ops.select(matrix, np.array(leaf_rows))
            * ops.embedding_lookup(params[self.prefix + '/omega'], rule_rows), axis=1)
        return expansions, ops.log_softmax(scores)

    def expansion_distribution(self, params, ppt, io_enc):
        expansions, log_probs = self.expansion_scores(params, ppt, io_enc)
        return expansions, np.exp(log_probs.data)

    def step_loss(self, params, ppt, target, io_enc):
        """negative log probability of the target expansion"""
        expansions, log_probs = self.expansion_scores(params, ppt, io_enc)
        try:
            index = expansions.index(target)
        except ValueError:
            raise InvalidExpansion('%s is not a valid expansion' % (target,))
        return ops.scale(log_probs[index], -1.0)

    def generate(self, params, io_enc, mode=GREEDY, max_size=13, rng_seed=0):
        """expand from the start symbol until complete or max_size rule nodes"""
        rng = rng_seed if isinstance(rng_seed, np.random.Generator) else utils.seeded_rng(
            'generate', rng_seed)
        tree = leaf(self.grammar.start)
        log_prob = 0.0
        while True:
            expansions = valid_expansions(tree, self.grammar)
            if not expansions:
                return Generation(COMPLETE, tree, log_prob, tree_to_program(tree))
            if tree_size(tree) >= max_size:
                return Generation(INCOMPLETE, tree, log_prob)
            expansions, log_probs = self.expansion_scores(params, tree, io_enc)
            if mode == GREEDY:
                index = int(np.argmax(log_probs.data))
            else:
                probabilities = np.exp(log_probs.data)
                index = int(rng.choice(len(expansions), p=probabilities / probabilities.sum()))
            log_prob += float(log_probs.data[index])
            tree = apply_expansion(tree, expansions[index])
