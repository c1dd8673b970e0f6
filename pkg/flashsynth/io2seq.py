"""sequence baseline: an LSTM decoder emitting a linearized derivation tree"""
import json
import logging
from dataclasses import dataclass

import numpy as np

from flashsynth import tensor as ops
from flashsynth import utils
from flashsynth.exceptions import InvalidProgram, InvalidSequence
from flashsynth.grammar import Node, program_to_tree, tree_to_program
from flashsynth.nn import Dense, LSTMLayer


logger = logging.getLogger(__name__)

OPEN = 'open'
CLOSE = 'close'
TERMINAL = 'terminal'
EOS = 'eos'

PROGRAM = 'program'
INVALID = 'invalid'
INCOMPLETE = 'incomplete'

GREEDY = 'greedy'
SAMPLE = 'sample'


@dataclass(frozen=True)
class LinearToken:
    kind: str
    value: str = ''

    def __str__(self):
        if self.kind == OPEN:
            return '(_' + self.value
        if self.kind == CLOSE:
            return ')_' + self.value
        if self.kind == EOS:
            return '<eos>'
        return self.value


END = LinearToken(EOS)


class Vocabulary(object):
    """every Open, Close and Terminal token of a grammar plus the end marker"""

    def __init__(self, grammar):
        self.grammar = grammar
        # tag -> (lhs, rule or None for terminal rules of lhs)
        self.tags = {}
        for rule in grammar.rules:
            if rule.terminal:
                self.tags.setdefault(rule.tag, (rule.lhs, None))
            else:
                self.tags[rule.tag] = (rule.lhs, rule)
        self.tokens = [END]
        for tag in self.tags:
            self.tokens.append(LinearToken(OPEN, tag))
            self.tokens.append(LinearToken(CLOSE, tag))
        for terminal in grammar.terminals:
            self.tokens.append(LinearToken(TERMINAL, terminal))
        self.index = {token: position for position, token in enumerate(self.tokens)}

    def __len__(self):
        return len(self.tokens)

    def dump(self):
        return json.dumps([str(token) for token in self.tokens], indent=2)


def linearize(program, grammar):
    """typed parenthesis pre-order tokens of the canonical derivation of program"""
    tokens = []

    def visit(node):
        if node.is_leaf:
            tokens.append(LinearToken(TERMINAL, node.symbol))
            return
        tokens.append(LinearToken(OPEN, node.rule.tag))
        for child in node.children:
            visit(child)
        tokens.append(LinearToken(CLOSE, node.rule.tag))
    visit(program_to_tree(program, grammar))
    return tokens


def delinearize(tokens, grammar):
    """Program of a token sequence, InvalidSequence naming the first offending token"""
    vocabulary = Vocabulary(grammar)
    tokens = list(tokens)
    position = [0]
    # list nodes seen so far, one per Concat part
    parts = [0]

    def peek():
        if position[0] >= len(tokens):
            raise InvalidSequence('sequence ends early', position[0])
        return tokens[position[0]]

    def parse(symbol):
        token = peek()
        if token.kind != OPEN or token.value not in vocabulary.tags:
            raise InvalidSequence('expected an opening %s tag' % symbol, position[0])
        lhs, rule = vocabulary.tags[token.value]
        if lhs != symbol:
            raise InvalidSequence('%s cannot derive %s' % (token.value, symbol), position[0])
        if symbol == grammar.list_symbol:
            parts[0] += 1
            if grammar.max_list_length and parts[0] > grammar.max_list_length:
                raise InvalidSequence('more than %s Concat parts' % grammar.max_list_length,
                                      position[0])
        position[0] += 1
        if rule is None:
            value = peek()
            if value.kind != TERMINAL or not grammar.has_terminal_rule(symbol, value.value):
                raise InvalidSequence('expected a value of %s' % symbol, position[0])
            position[0] += 1
            rule = grammar.terminal_rule(symbol, value.value)
            children = (Node(value.value),)
        else:
            children = tuple(parse(child) for child in rule.rhs)
        close = peek()
        if close.kind != CLOSE or close.value != token.value:
            raise InvalidSequence('expected closing %s' % token.value, position[0])
        position[0] += 1
        return Node(symbol, rule, children)

    tree = parse(grammar.start)
    if position[0] != len(tokens):
        raise InvalidSequence('tokens after the program', position[0])
    try:
        return tree_to_program(tree)
    except InvalidProgram as exception:
        raise InvalidSequence(str(exception), position[0])


@dataclass
class SequenceResult:
    status: str
    tokens: list
    log_prob: float
    program: object = None
    reason: str = None


class Io2Seq(object):
    """decoder whose initial states are tanh affine maps of the example encoding"""

    def __init__(self, store, grammar, io_dim, hidden_size=64, layers=2, prefix='io2seq'):
        self.grammar = grammar
        self.vocabulary = Vocabulary(grammar)
        self.hidden_size = hidden_size
        self.prefix = prefix
        store.add(prefix + '/embedding', (len(self.vocabulary), hidden_size))
        self.layers = []
        self.initial_hidden = []
        self.initial_cell = []
        for index in range(layers):
            self.layers.append(LSTMLayer(
                store, '%s/decoder/%d' % (prefix, index), hidden_size, hidden_size))
            self.initial_hidden.append(Dense(
                store, '%s/init_h/%d' % (prefix, index), io_dim, hidden_size))
            self.initial_cell.append(Dense(
                store, '%s/init_c/%d' % (prefix, index), io_dim, hidden_size))
        self.output = Dense(store, prefix + '/output', hidden_size, len(self.vocabulary))

    def initial_states(self, params, io_enc):
        io_enc = ops.as_tensor(io_enc).reshape(1, -1)
        return [(ops.tanh(hidden(params, io_enc)), ops.tanh(cell(params, io_enc)))
                for hidden, cell in zip(self.initial_hidden, self.initial_cell)]

    def step(self, params, token, states):
        """log probabilities of the next token after feeding token"""
        inputs = ops.embedding_lookup(
            params[self.prefix + '/embedding'], [self.vocabulary.index[token]])
        next_states = []
        for layer, state in zip(self.layers, states):
            state, inputs = layer.step(params, layer.project(params, inputs), state)
            next_states.append(state)
        return ops.log_softmax(self.output(params, inputs).reshape(-1)), next_states

    def sequence_loss(self, params, tokens, io_enc):
        """summed negative log likelihood of tokens then the end marker, fed with teacher forcing"""
        states = self.initial_states(params, io_enc)
        previous = END
        losses = []
        for token in list(tokens) + [END]:
            log_probs, states = self.step(params, previous, states)
            losses.append(log_probs[self.vocabulary.index[token]])
            previous = token
        return ops.scale(ops.reduce_sum(ops.stack(losses)), -1.0)

    def generate(self, params, io_enc, mode=GREEDY, max_tokens=80, rng_seed=0):
        """decode until the end marker or max_tokens; the result never raises"""
        rng = rng_seed if isinstance(rng_seed, np.random.Generator) else utils.seeded_rng(
            'io2seq', rng_seed)
        states = self.initial_states(params, io_enc)
        previous = END
        tokens = []
        log_prob = 0.0
        while len(tokens) < max_tokens:
            log_probs, states = self.step(params, previous, states)
            if mode == GREEDY:
                index = int(np.argmax(log_probs.data))
            else:
                probabilities = np.exp(log_probs.data)
                index = int(rng.choice(len(probabilities), p=probabilities / probabilities.sum()))
            log_prob += float(log_probs.data[index])
            token = self.vocabulary.tokens[index]
            if token == END:
                return self.finish(tokens, log_prob)
            tokens.append(token)
            previous = token
        return SequenceResult(INCOMPLETE, tokens, log_prob)

    def finish(self, tokens, log_prob):
        try:
            program = delinearize(tokens, self.grammar)
        except InvalidSequence as exception:
            return SequenceResult(INVALID, tokens, log_prob, reason=str(exception))
        return SequenceResult(PROGRAM, tokens, log_prob, program)
