"""uniform program sampling and well-formed input generation for training corpora"""
import logging
import random
import string
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from flashsynth import utils
from flashsynth.dsl import ConstPos, TokenMatch, try_eval
from flashsynth.exceptions import GenerationFailed, NoPrograms
from flashsynth.grammar import Node, build_grammar, tree_to_program
from flashsynth.syntax import serialize_program
from flashsynth.tokens import TokenKind


logger = logging.getLogger(__name__)

DEFAULT_RETRY_CAP = 50

# token kinds whose matches grow into neighbouring lowercase filler
LETTER_KINDS = (
    TokenKind.PROPER_CASE, TokenKind.CAPS, TokenKind.LOWERCASE,
    TokenKind.ALPHABETS, TokenKind.ALPHANUMERIC)

LOWER_FILLER = string.ascii_lowercase + ' '
SEPARATOR_FILLER = ' .,;-/'


@dataclass(frozen=True)
class Example:
    input: str
    output: str


@dataclass(frozen=True)
class Task:
    examples: tuple
    program: object = None
    name: str = None

    @property
    def inputs(self):
        return [example.input for example in self.examples]


def consistent(program, examples):
    """true if program maps every example input to its output"""
    return all(try_eval(program, example.input) == example.output for example in examples)


class DerivationCountTable(object):
    """exact number of complete derivations per symbol and rule-node count

    The list symbol is counted per number of remaining list elements so the
    Concat arity bound holds for counting and sampling alike.
    """

    def __init__(self, grammar, max_size):
        self.grammar = grammar
        self.max_size = max_size
        self.max_parts = grammar.max_list_length or max_size
        self._symbol_cache = {}
        self._sequence_cache = {}
        self.counts = {
            symbol: [self.count(symbol, size) for size in range(max_size + 1)]
            for symbol in grammar.nonterminals}

    def parts_for(self, symbol, parts):
        if symbol != self.grammar.list_symbol:
            return 0
        return self.max_parts if parts is None else parts

    def count(self, symbol, size, parts=None):
        parts = self.parts_for(symbol, parts)
        if self.grammar.is_terminal(symbol):
            return 1 if size == 0 else 0
        if size < 1:
            return 0
        key = (symbol, size, parts)
        if key not in self._symbol_cache:
            self._symbol_cache[key] = sum(
                self.rule_count(rule, size, parts) for rule in self.grammar.rules_for(symbol))
        return self._symbol_cache[key]

    def child_parts(self, rule, parts):
        """remaining list elements available below a node of rule"""
        if rule.lhs == self.grammar.list_symbol:
            return parts - 1
        return None

    def rule_count(self, rule, size, parts=None):
        parts = self.parts_for(rule.lhs, parts)
        if size < 1:
            return 0
        child_parts = self.child_parts(rule, parts)
        if child_parts is not None and child_parts < 0:
            return 0
        if child_parts == 0 and self.grammar.list_symbol in rule.rhs:
            return 0
        return self.sequence_count(rule.rhs, size - 1, child_parts)

    def sequence_count(self, symbols, size, parts=None):
        """derivations of a symbol sequence sharing size rule nodes between them"""
        if not symbols:
            return 1 if size == 0 else 0
        key = (symbols, size, parts)
        if key not in self._sequence_cache:
            total = 0
            for head_size in range(size + 1):
                head = self.count(symbols[0], head_size, self.list_parts(symbols[0], parts))
                if head:
                    total += head * self.sequence_count(symbols[1:], size - head_size, parts)
            self._sequence_cache[key] = total
        return self._sequence_cache[key]

    def list_parts(self, symbol, parts):
        if symbol == self.grammar.list_symbol and parts:
            return parts
        return None

    def total(self, max_size=None):
        """number of complete programs up to max_size"""
        if max_size is None:
            max_size = self.max_size
        return sum(self.count(self.grammar.start, size) for size in range(max_size + 1))


def count_programs(grammar, max_size):
    return DerivationCountTable(grammar, max_size)


def _choose(rng, weighted):
    """pick an item with probability proportional to its integer weight"""
    total = sum(weight for _, weight in weighted)
    point = rng.randrange(total)
    for item, weight in weighted:
        if point < weight:
            return item
        point -= weight
    # unreachable, weights sum to total
    raise NoPrograms('empty weighted choice')


def _random(rng_seed, *keys):
    if isinstance(rng_seed, random.Random):
        return rng_seed
    return utils.seeded_random(*keys, rng_seed)


def sample_tree_uniform(table, max_size, rng):
    grammar = table.grammar
    weighted = [(size, table.count(grammar.start, size)) for size in range(max_size + 1)]
    weighted = [(size, weight) for size, weight in weighted if weight]
    if not weighted:
        raise NoPrograms('no program of size %s or less' % max_size)
    size = _choose(rng, weighted)
    return _sample_symbol(table, grammar.start, size, None, rng)


def _sample_symbol(table, symbol, size, parts, rng):
    if table.grammar.is_terminal(symbol):
        return Node(symbol)
    parts = table.parts_for(symbol, parts)
    weighted = [(rule, table.rule_count(rule, size, parts))
                for rule in table.grammar.rules_for(symbol)]
    rule = _choose(rng, [(rule, weight) for rule, weight in weighted if weight])
    child_parts = table.child_parts(rule, parts)
    children = []
    remaining = size - 1
    for index, child in enumerate(rule.rhs):
        rest = rule.rhs[index + 1:]
        child_list_parts = table.list_parts(child, child_parts)
        weighted = []
        for child_size in range(remaining + 1):
            weight = table.count(child, child_size, child_list_parts) * table.sequence_count(
                rest, remaining - child_size, child_parts)
            if weight:
                weighted.append((child_size, weight))
        child_size = _choose(rng, weighted)
        children.append(_sample_symbol(table, child, child_size, child_list_parts, rng))
        remaining -= child_size
    return Node(symbol, rule, tuple(children))


def sample_program_uniform(grammar, table, max_size, rng_seed):
    """program drawn uniformly from all complete programs of size max_size or less"""
    if table.grammar is not grammar:
        table = count_programs(grammar, max_size)
    rng = _random(rng_seed, 'program')
    return tree_to_program(sample_tree_uniform(table, max_size, rng))


# input generation


def _token_sample(kind, rng):
    """one maximal match of a character class token"""
    length = rng.randint(1, 4)
    if kind == TokenKind.PROPER_CASE:
        return rng.choice(string.ascii_uppercase) + ''.join(
            rng.choice(string.ascii_lowercase) for _ in range(length))
    if kind == TokenKind.CAPS:
        alphabet = string.ascii_uppercase
    elif kind == TokenKind.LOWERCASE:
        alphabet = string.ascii_lowercase
    elif kind == TokenKind.DIGITS:
        alphabet = string.digits
    elif kind == TokenKind.ALPHABETS:
        alphabet = string.ascii_letters
    else:
        alphabet = string.ascii_letters + string.digits
    return ''.join(rng.choice(alphabet) for _ in range(length))


def _required_matches(program):
    """(token, count) pairs: each token needs at least count matches"""
    required = {}
    for position in _program_positions(program):
        if isinstance(position, TokenMatch):
            token = position.token
            required[token] = max(required.get(token, 0), abs(position.k))
    return required


def _program_positions(program):
    for part in program.parts:
        if hasattr(part, 'left'):
            yield part.left
            yield part.right


def _min_length(program):
    """shortest input every constant position of program can index"""
    length = 0
    for position in _program_positions(program):
        if isinstance(position, ConstPos):
            length = max(length, position.k if position.k >= 0 else -position.k - 1)
    return length


def _filler_chars(required, chars):
    kinds = [token.kind for token in required]
    filler = LOWER_FILLER
    if any(kind in LETTER_KINDS for kind in kinds):
        filler = SEPARATOR_FILLER
    if chars:
        allowed = ''.join(char for char in filler if char in chars)
        filler = allowed or chars
    return filler


def _plant(program, rng, max_length, chars):
    required = _required_matches(program)
    filler = _filler_chars(required, chars)
    pieces = []
    for token, count in required.items():
        if token.kind in (TokenKind.START_OF_STRING, TokenKind.END_OF_STRING):
            continue
        for _ in range(count):
            if token.kind == TokenKind.CONST:
                pieces.append(token.literal)
            else:
                pieces.append(_token_sample(token.kind, rng))
    rng.shuffle(pieces)
    chunks = []
    for piece in pieces:
        # at least one filler character keeps neighbouring pieces from merging
        gap = rng.randint(1 if chunks else 0, 3)
        chunks.append(''.join(rng.choice(filler) for _ in range(gap)))
        chunks.append(piece)
    chunks.append(''.join(rng.choice(filler) for _ in range(rng.randint(0, 3))))
    value = ''.join(chunks)
    target = _min_length(program)
    while len(value) < target:
        value += rng.choice(filler)
    if not value and max_length:
        value = ''.join(rng.choice(filler) for _ in range(rng.randint(1, min(max_length, 6))))
    return value


def gen_input(program, rng_seed, max_length, retry_cap=DEFAULT_RETRY_CAP, chars=None):
    """input string on which program evaluates without error

    Matches of every token the program's positions refer to are planted
    between filler characters, then the candidate is checked by running it.
    """
    rng = _random(rng_seed, 'input')
    for _ in range(retry_cap):
        value = _plant(program, rng, max_length, chars)
        if len(value) > max_length:
            continue
        if chars and any(char not in chars for char in value):
            continue
        if try_eval(program, value) is not None:
            return value
    raise GenerationFailed('no valid input for %s after %s attempts' % (
        serialize_program(program), retry_cap))


def gen_task(program, n_examples, rng_seed, max_length=32, retry_cap=DEFAULT_RETRY_CAP,
             chars=None):
    """task of n_examples distinct inputs with the outputs of program"""
    rng = _random(rng_seed, 'task')
    inputs = []
    attempts = 0
    while len(inputs) < n_examples:
        if attempts >= retry_cap * n_examples:
            raise GenerationFailed('only %s distinct inputs for %s' % (
                len(inputs), serialize_program(program)))
        attempts += 1
        value = gen_input(program, rng, max_length, retry_cap, chars)
        if value not in inputs:
            inputs.append(value)
    examples = tuple(Example(value, try_eval(program, value)) for value in inputs)
    return Task(examples, program)


# grammar, count table and character set shared by every task of one corpus run
_corpus_state = {}


def _init_corpus(synth_config, max_size):
    grammar = build_grammar(synth_config)
    _corpus_state.clear()
    _corpus_state.update({
        'synth_config': synth_config,
        'grammar': grammar,
        'table': count_programs(grammar, max_size),
        'chars': utils.charset(synth_config),
        'max_size': max_size,
    })


def _generate_one(arguments):
    """worker: the task at a corpus index, resampling programs that fail input generation"""
    seed, index = arguments
    synth_config = _corpus_state['synth_config']
    attempt = 0
    while True:
        rng = utils.seeded_random('corpus', seed, index, attempt)
        program = sample_program_uniform(
            _corpus_state['grammar'], _corpus_state['table'], _corpus_state['max_size'], rng)
        try:
            return gen_task(
                program, synth_config.get('n_examples', 5), rng,
                synth_config.get('max_length', 32),
                synth_config.get('retry_cap', DEFAULT_RETRY_CAP), _corpus_state['chars'])
        except GenerationFailed as exception:
            logger.info('dropped program at index %s attempt %s: %s', index, attempt, exception)
            attempt += 1


def generate_corpus(synth_config, n_tasks, seed=None, max_size=None, workers=1):
    """n_tasks tasks, identical for any number of workers"""
    if seed is None:
        seed = synth_config.get('seed', 0)
    if max_size is None:
        max_size = synth_config.get('max_size', 9)
    arguments = [(seed, index) for index in range(n_tasks)]
    if workers and workers > 1:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_corpus,
                                 initargs=(synth_config, max_size)) as executor:
            tasks = list(executor.map(_generate_one, arguments))
    else:
        _init_corpus(synth_config, max_size)
        tasks = [_generate_one(argument) for argument in arguments]
    logger.info('generated %s tasks with max_size %s and seed %s', n_tasks, max_size, seed)
    return tasks


def regenerate_examples(tasks, synth_config, seed):
    """same programs with freshly drawn inputs, for input/output generalization"""
    fresh = []
    chars = utils.charset(synth_config)
    for index, task in enumerate(tasks):
        rng = utils.seeded_random('fresh', seed, index)
        try:
            fresh.append(gen_task(
                task.program, len(task.examples), rng, synth_config.get('max_length', 32),
                synth_config.get('retry_cap', DEFAULT_RETRY_CAP), chars))
        except GenerationFailed as exception:
            logger.info('no fresh examples for task %s: %s', index, exception)
    return fresh
