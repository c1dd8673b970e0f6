"""explicit context free grammar of the language and its derivation trees"""
import hashlib
import json
from dataclasses import dataclass

from flashsynth import utils
from flashsynth.dsl import ConstPos, ConstStr, Direction, Program, SubStr, TokenMatch
from flashsynth.exceptions import GrammarError, InvalidProgram
from flashsynth.tokens import NAMED_KINDS, TokenKind, const_token, named_token


START = 'e'
NONTERMINALS = ('e', 'f', 'p', 'r', 'k', 'c', 'd', 's')

# tags of rules whose right hand side holds non-terminals only
TAG_LAST = 'e_end'
TAG_CONS = 'e_cons'
TAG_CONST_STR = 'ConstStr'
TAG_SUB_STR = 'SubStr'
TAG_CONST_POS = 'ConstPos'
TAG_MATCH = 'Match'
TAG_TOK = 'Tok'


@dataclass(frozen=True)
class Rule:
    index: int
    lhs: str
    rhs: tuple
    tag: str
    # a terminal rule rewrites its lhs to exactly one terminal symbol
    terminal: bool = False

    @property
    def arity(self):
        return len(self.rhs)

    def __str__(self):
        return '%s -> %s' % (self.lhs, ' '.join(self.rhs))


@dataclass(frozen=True)
class Node:
    """derivation tree node; inner nodes carry a rule, leaves only a symbol"""
    symbol: str
    rule: Rule = None
    children: tuple = ()

    @property
    def is_leaf(self):
        return self.rule is None


class Grammar(object):

    def __init__(self, nonterminals, terminals, rules, start, list_symbol=None,
                 max_list_length=None):
        self.nonterminals = tuple(nonterminals)
        self.terminals = tuple(terminals)
        self.start = start
        self.list_symbol = list_symbol
        self.max_list_length = max_list_length
        self.rules = []
        for index, (lhs, rhs, tag) in enumerate(rules):
            if lhs not in self.nonterminals:
                raise GrammarError('rule lhs %s is not a non-terminal' % lhs)
            for symbol in rhs:
                if symbol not in self.nonterminals and symbol not in self.terminals:
                    raise GrammarError('unknown symbol %s in rule for %s' % (symbol, lhs))
            is_terminal = len(rhs) == 1 and rhs[0] in self.terminals
            self.rules.append(Rule(index, lhs, tuple(rhs), tag, is_terminal))
        self.symbols = self.nonterminals + self.terminals
        self.symbol_index = {symbol: index for index, symbol in enumerate(self.symbols)}
        self._rules_for = {symbol: [] for symbol in self.nonterminals}
        self._terminal_rules = {}
        self._tagged_rules = {}
        for rule in self.rules:
            self._rules_for[rule.lhs].append(rule)
            if rule.terminal:
                self._terminal_rules[(rule.lhs, rule.rhs[0])] = rule
            else:
                self._tagged_rules[rule.tag] = rule
        self.min_sizes = minimal_sizes(self)

    def is_terminal(self, symbol):
        return symbol in self.terminals

    def rules_for(self, symbol):
        return self._rules_for.get(symbol, [])

    def terminal_rule(self, lhs, terminal):
        rule = self._terminal_rules.get((lhs, terminal))
        if rule is None:
            raise InvalidProgram('%s is not a value of %s in this grammar' % (terminal, lhs))
        return rule

    def tagged_rule(self, tag):
        return self._tagged_rules[tag]

    def has_terminal_rule(self, lhs, terminal):
        return (lhs, terminal) in self._terminal_rules

    def to_dict(self):
        return {
            'start': self.start,
            'nonterminals': list(self.nonterminals),
            'terminals': list(self.terminals),
            'list_symbol': self.list_symbol,
            'max_list_length': self.max_list_length,
            'rules': [
                {'index': rule.index, 'lhs': rule.lhs, 'rhs': list(rule.rhs), 'tag': rule.tag}
                for rule in self.rules],
        }

    def dump(self):
        """rule list as JSON text"""
        return json.dumps(self.to_dict(), indent=2)

    def grammar_hash(self):
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def minimal_sizes(grammar):
    """fewest rule nodes needed to derive a complete tree from each symbol"""
    sizes = {symbol: 0 for symbol in grammar.terminals}
    for symbol in grammar.nonterminals:
        sizes[symbol] = None
    changed = True
    while changed:
        changed = False
        for rule in grammar.rules:
            if any(sizes[symbol] is None for symbol in rule.rhs):
                continue
            size = 1 + sum(sizes[symbol] for symbol in rule.rhs)
            if sizes[rule.lhs] is None or size < sizes[rule.lhs]:
                sizes[rule.lhs] = size
                changed = True
    for symbol in grammar.nonterminals:
        if sizes[symbol] is None:
            raise GrammarError('symbol %s derives no complete tree' % symbol)
    return sizes


def const_terminal(constant):
    return json.dumps(constant)


def pos_terminal(k):
    return 'c=%d' % k


def index_terminal(k):
    return 'k=%d' % k


def signed_range(bound, with_zero):
    values = list(range(0 if with_zero else 1, bound + 1))
    return values + [-value for value in range(1, bound + 1)]


def build_grammar(synth_config):
    """grammar for the configured constant universe and index bounds"""
    universe = utils.constant_universe(synth_config)
    if not universe:
        raise GrammarError('the constant universe is empty')
    match_indexes = signed_range(synth_config.get('max_match_index', 3), False)
    const_positions = signed_range(synth_config.get('max_const_pos', 5), True)

    rules = [
        ('e', ('f',), TAG_LAST),
        ('e', ('f', 'e'), TAG_CONS),
        ('f', ('s',), TAG_CONST_STR),
        ('f', ('p', 'p'), TAG_SUB_STR),
        ('p', ('c',), TAG_CONST_POS),
        ('p', ('r', 'k', 'd'), TAG_MATCH),
    ]
    terminals = []
    for kind in NAMED_KINDS:
        terminals.append(kind.value)
        rules.append(('r', (kind.value,), 'r'))
    rules.append(('r', ('s',), TAG_TOK))
    for k in match_indexes:
        terminals.append(index_terminal(k))
        rules.append(('k', (index_terminal(k),), 'k'))
    for k in const_positions:
        terminals.append(pos_terminal(k))
        rules.append(('c', (pos_terminal(k),), 'c'))
    for direction in Direction:
        terminals.append(direction.value)
        rules.append(('d', (direction.value,), 'd'))
    for constant in universe:
        terminals.append(const_terminal(constant))
        rules.append(('s', (const_terminal(constant),), 's'))
    return Grammar(NONTERMINALS, terminals, rules, START, list_symbol='e',
                   max_list_length=synth_config.get('max_concat'))


# derivation tree helpers


def leaf(symbol):
    return Node(symbol)


def expand_leaf(rule):
    """inner node for rule with a fresh leaf per right hand side symbol"""
    return Node(rule.lhs, rule, tuple(Node(symbol) for symbol in rule.rhs))


def iter_leaves(node, path=()):
    """(path, leaf) pairs in left to right order"""
    if node.is_leaf:
        yield path, node
        return
    for index, child in enumerate(node.children):
        yield from iter_leaves(child, path + (index,))


def open_leaves(node, grammar):
    """leaves still carrying a non-terminal symbol, left to right"""
    return [(path, item) for path, item in iter_leaves(node)
            if not grammar.is_terminal(item.symbol)]


def is_complete(node, grammar):
    return not open_leaves(node, grammar)


def node_at(node, path):
    for index in path:
        node = node.children[index]
    return node


def replace_at(node, path, new_node):
    """copy of node with the subtree at path replaced, sharing untouched subtrees"""
    if not path:
        return new_node
    children = list(node.children)
    children[path[0]] = replace_at(children[path[0]], path[1:], new_node)
    return Node(node.symbol, node.rule, tuple(children))


def tree_size(node):
    """number of rule applications"""
    if node.is_leaf:
        return 0
    return 1 + sum(tree_size(child) for child in node.children)


def min_completion_size(node, grammar):
    return tree_size(node) + sum(
        grammar.min_sizes[item.symbol] for _, item in open_leaves(node, grammar))


def tree_key(node):
    """canonical text of a (partial) derivation, injective over trees"""
    if node.is_leaf:
        return node.symbol
    return '%d(%s)' % (node.rule.index, ','.join(tree_key(child) for child in node.children))


def validate_tree(node, grammar):
    """raise GrammarError unless every inner node matches its rule"""
    if node.is_leaf:
        if node.symbol not in grammar.symbol_index:
            raise GrammarError('unknown leaf symbol %s' % node.symbol)
        return
    rule = node.rule
    if grammar.rules[rule.index] != rule or rule.lhs != node.symbol:
        raise GrammarError('node %s carries a foreign rule %s' % (node.symbol, rule))
    if tuple(child.symbol for child in node.children) != rule.rhs:
        raise GrammarError('children of %s do not match %s' % (node.symbol, rule))
    for child in node.children:
        validate_tree(child, grammar)


# programs and derivation trees


def program_to_tree(program, grammar):
    """canonical derivation tree of a program under grammar"""
    parts = list(program.parts)
    return _list_tree(parts, grammar)


def _list_tree(parts, grammar):
    head = _part_tree(parts[0], grammar)
    if len(parts) == 1:
        return Node('e', grammar.tagged_rule(TAG_LAST), (head,))
    return Node('e', grammar.tagged_rule(TAG_CONS), (head, _list_tree(parts[1:], grammar)))


def _terminal_tree(grammar, lhs, terminal):
    return Node(lhs, grammar.terminal_rule(lhs, terminal), (Node(terminal),))


def _part_tree(part, grammar):
    if isinstance(part, ConstStr):
        return Node('f', grammar.tagged_rule(TAG_CONST_STR), (
            _terminal_tree(grammar, 's', const_terminal(part.s)),))
    return Node('f', grammar.tagged_rule(TAG_SUB_STR), (
        _position_tree(part.left, grammar), _position_tree(part.right, grammar)))


def _position_tree(position, grammar):
    if isinstance(position, ConstPos):
        return Node('p', grammar.tagged_rule(TAG_CONST_POS), (
            _terminal_tree(grammar, 'c', pos_terminal(position.k)),))
    if position.token.kind == TokenKind.CONST:
        regex = Node('r', grammar.tagged_rule(TAG_TOK), (
            _terminal_tree(grammar, 's', const_terminal(position.token.literal)),))
    else:
        regex = _terminal_tree(grammar, 'r', position.token.kind.value)
    return Node('p', grammar.tagged_rule(TAG_MATCH), (
        regex,
        _terminal_tree(grammar, 'k', index_terminal(position.k)),
        _terminal_tree(grammar, 'd', position.direction.value)))


def tree_to_program(node):
    """Program of a complete derivation tree"""
    parts = []
    while True:
        if node.is_leaf:
            raise InvalidProgram('derivation is incomplete')
        parts.append(tree_to_part(node.children[0]))
        if node.rule.tag == TAG_LAST:
            return Program(tuple(parts))
        node = node.children[1]


def _terminal_value(node):
    if node.is_leaf or node.children[0].rule is not None:
        raise InvalidProgram('derivation is incomplete')
    return node.children[0].symbol


def tree_to_part(node):
    if node.is_leaf:
        raise InvalidProgram('derivation is incomplete')
    if node.rule.tag == TAG_CONST_STR:
        return ConstStr(json.loads(_terminal_value(node.children[0])))
    return SubStr(tree_to_position(node.children[0]), tree_to_position(node.children[1]))


def tree_to_position(node):
    if node.is_leaf:
        raise InvalidProgram('derivation is incomplete')
    if node.rule.tag == TAG_CONST_POS:
        return ConstPos(int(_terminal_value(node.children[0])[2:]))
    regex_node, index_node, direction_node = node.children
    if regex_node.is_leaf:
        raise InvalidProgram('derivation is incomplete')
    if regex_node.rule.tag == TAG_TOK:
        token = const_token(json.loads(_terminal_value(regex_node.children[0])))
    else:
        token = named_token(_terminal_value(regex_node))
    return TokenMatch(token, int(_terminal_value(index_node)[2:]),
                      Direction(_terminal_value(direction_node)))


def program_size(program):
    """rule applications in the canonical derivation of program"""
    return sum(2 + _part_size(part) for part in program.parts)


def _part_size(part):
    if isinstance(part, ConstStr):
        return 1
    return _position_size(part.left) + _position_size(part.right)


def _position_size(position):
    if isinstance(position, ConstPos):
        return 2
    regex_size = 2 if position.token.kind == TokenKind.CONST else 1
    return 1 + regex_size + 2


def check_program(program, grammar):
    """raise InvalidProgram if program falls outside the configured language"""
    if grammar.max_list_length and len(program.parts) > grammar.max_list_length:
        raise InvalidProgram('program concatenates %s parts, at most %s allowed' % (
            len(program.parts), grammar.max_list_length))
    program_to_tree(program, grammar)
