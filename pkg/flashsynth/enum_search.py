"""top-down enumerative search over partial derivations, the symbolic baseline"""
import heapq
import logging
import time
from dataclasses import dataclass

from flashsynth.datagen import consistent
from flashsynth.dsl import eval_part, eval_position, try_eval
from flashsynth.exceptions import ConfigError, EvaluationError, InvalidProgram
from flashsynth.grammar import (
    TAG_LAST, TAG_SUB_STR, expand_leaf, is_complete, leaf, min_completion_size, open_leaves,
    replace_at, tree_key, tree_size, tree_to_part, tree_to_position, tree_to_program)
from flashsynth.syntax import serialize_program


logger = logging.getLogger(__name__)

FOUND = 'found'
NOT_FOUND = 'not_found'


@dataclass(frozen=True)
class SearchLimits:
    max_size: int
    max_expansions: int
    time_budget_ms: int

    def __post_init__(self):
        for name in ('max_size', 'max_expansions', 'time_budget_ms'):
            if getattr(self, name) < 1:
                raise ConfigError('search limit %s must be positive' % name)

    @classmethod
    def from_config(cls, synth_config, **overrides):
        values = {
            'max_size': synth_config.get('max_program_size', 13),
            'max_expansions': synth_config.get('max_expansions', 200000),
            'time_budget_ms': synth_config.get('time_budget_ms', 60000),
        }
        values.update({key: value for key, value in overrides.items() if value is not None})
        return cls(**values)


@dataclass(frozen=True)
class PartialDerivation:
    tree: object
    size: int
    min_completion_size: int

    @classmethod
    def from_tree(cls, tree, grammar):
        return cls(tree, tree_size(tree), min_completion_size(tree, grammar))


@dataclass
class SearchResult:
    status: str
    program: object = None
    expansions: int = 0
    millis: int = 0
    reason: str = None

    def to_dict(self):
        return {
            'status': self.status,
            'program': serialize_program(self.program) if self.program is not None else None,
            'expansions': self.expansions,
            'millis': self.millis,
        }


class SeenStore(object):
    """canonical keys of enqueued partials and output signatures of complete programs"""

    def __init__(self):
        self.keys = set()
        self.signatures = {}

    def add(self, partial, task=None, grammar=None):
        self.keys.add(tree_key(partial.tree))
        if task is not None and grammar is not None and is_complete(partial.tree, grammar):
            signature = output_signature(tree_to_program(partial.tree), task)
            previous = self.signatures.get(signature)
            if previous is None or partial.size < previous:
                self.signatures[signature] = partial.size


def output_signature(program, task):
    return tuple(try_eval(program, value) for value in task.inputs)


def rank_nonterminals(partial, grammar):
    """non-terminal leaves of a partial derivation, leftmost first"""
    return open_leaves(partial.tree, grammar)


def rule_min_size(rule, grammar):
    return 1 + sum(grammar.min_sizes[symbol] for symbol in rule.rhs)


def rank_rules(symbol, grammar):
    """rules for symbol by smallest completion, declaration order on ties"""
    return sorted(grammar.rules_for(symbol),
                  key=lambda rule: (rule_min_size(rule, grammar), rule.index))


def subsumed(candidate, seen_store, task, grammar=None):
    """true if candidate was already enqueued or a no larger program has the same outputs"""
    if tree_key(candidate.tree) in seen_store.keys:
        return True
    if grammar is None or not is_complete(candidate.tree, grammar):
        return False
    signature = output_signature(tree_to_program(candidate.tree), task)
    previous = seen_store.signatures.get(signature)
    return previous is not None and previous <= candidate.size


def _list_heads(tree):
    """f subtrees of the Concat list in order, and whether the list is closed"""
    heads = []
    node = tree
    while not node.is_leaf:
        heads.append(node.children[0])
        if node.rule.tag == TAG_LAST:
            return heads, True
        node = node.children[1]
    return heads, False


def viable(partial, task, grammar):
    """false only when no completion of partial can satisfy the task

    Complete leading parts must produce a prefix of every output. A complete
    left position of the first open substring must evaluate on every input.
    """
    heads, closed = _list_heads(partial.tree)
    prefixes = [''] * len(task.examples)
    for head in heads:
        if not is_complete(head, grammar):
            return _open_part_viable(head, task, grammar)
        part = tree_to_part(head)
        for index, example in enumerate(task.examples):
            try:
                prefixes[index] += eval_part(part, example.input)
            except EvaluationError:
                return False
            if not example.output.startswith(prefixes[index]):
                return False
    if closed:
        return all(prefix == example.output for prefix, example in zip(prefixes, task.examples))
    return True


def _open_part_viable(head, task, grammar):
    if head.is_leaf or head.rule.tag != TAG_SUB_STR:
        return True
    left = head.children[0]
    if not is_complete(left, grammar):
        return True
    try:
        position = tree_to_position(left)
    except InvalidProgram:
        return True
    for value in task.inputs:
        try:
            eval_position(position, value)
        except EvaluationError:
            return False
    return True


def enum_search(grammar, task, limits, rank_nonterminals=rank_nonterminals, rank_rules=rank_rules):
    """smallest program consistent with every example of task, within limits"""
    started = time.monotonic()
    seen = SeenStore()
    counter = 0
    root = PartialDerivation.from_tree(leaf(grammar.start), grammar)
    seen.add(root)
    worklist = [(root.min_completion_size, counter, root)]
    expansions = 0

    def result(status, program=None, reason=None):
        millis = int((time.monotonic() - started) * 1000)
        if reason:
            logger.debug('search stopped after %s expansions: %s', expansions, reason)
        return SearchResult(status, program, expansions, millis, reason)

    while worklist:
        if expansions >= limits.max_expansions:
            return result(NOT_FOUND, reason='max_expansions')
        if (time.monotonic() - started) * 1000 > limits.time_budget_ms:
            return result(NOT_FOUND, reason='time_budget')
        _, _, partial = heapq.heappop(worklist)
        if is_complete(partial.tree, grammar):
            program = tree_to_program(partial.tree)
            if consistent(program, task.examples):
                return result(FOUND, program)
            continue
        path, open_leaf = rank_nonterminals(partial, grammar)[0]
        expansions += 1
        for rule in rank_rules(open_leaf.symbol, grammar):
            child = PartialDerivation.from_tree(
                replace_at(partial.tree, path, expand_leaf(rule)), grammar)
            if child.min_completion_size > limits.max_size:
                continue
            if not _within_list_bound(child.tree, grammar):
                continue
            if subsumed(child, seen, task, grammar):
                continue
            if not viable(child, task, grammar):
                continue
            seen.add(child, task, grammar)
            counter += 1
            heapq.heappush(worklist, (child.min_completion_size, counter, child))
    return result(NOT_FOUND, reason='exhausted')


def _within_list_bound(tree, grammar):
    """false once the Concat list holds, or must still grow to, more parts than allowed"""
    if not grammar.max_list_length:
        return True
    heads, closed = _list_heads(tree)
    return len(heads) + (0 if closed else 1) <= grammar.max_list_length
