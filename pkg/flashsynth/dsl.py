"""abstract syntax and interpreter for Concat / ConstStr / SubStr programs"""
from dataclasses import dataclass
from enum import Enum

from flashsynth.exceptions import (
    EmptyRange, IndexOutOfRange, InvalidProgram, MatchNotFound)
from flashsynth.tokens import RegexToken, match_token


class Direction(Enum):
    START = 'Start'
    END = 'End'


@dataclass(frozen=True)
class ConstPos:
    k: int


@dataclass(frozen=True)
class TokenMatch:
    token: RegexToken
    k: int
    direction: Direction

    def __post_init__(self):
        if self.k == 0:
            raise InvalidProgram('match index must be non-zero')


@dataclass(frozen=True)
class ConstStr:
    s: str

    def __post_init__(self):
        if not self.s:
            raise InvalidProgram('constant string must be non-empty')


@dataclass(frozen=True)
class SubStr:
    left: object
    right: object


@dataclass(frozen=True)
class Program:
    parts: tuple

    def __post_init__(self):
        if not self.parts:
            raise InvalidProgram('a program concatenates at least one part')
        # accept any sequence but store a tuple so programs stay hashable
        object.__setattr__(self, 'parts', tuple(self.parts))


def eval_position(position, value):
    """index into value selected by a position logic"""
    if isinstance(position, ConstPos):
        # negative offsets count from one past the end, so ConstPos(-1) is len(value)
        index = position.k if position.k >= 0 else len(value) + position.k + 1
    else:
        spans = match_token(position.token, value)
        if abs(position.k) > len(spans):
            raise MatchNotFound('%s match %s of %s in %r' % (
                position.token.kind.value, position.k, len(spans), value))
        span = spans[position.k - 1] if position.k > 0 else spans[position.k]
        index = span[0] if position.direction == Direction.START else span[1]
    if index < 0 or index > len(value):
        raise IndexOutOfRange('position %s outside %r' % (index, value))
    return index


def eval_part(part, value):
    if isinstance(part, ConstStr):
        return part.s
    start = eval_position(part.left, value)
    end = eval_position(part.right, value)
    if start > end:
        raise EmptyRange('substring %s..%s of %r' % (start, end, value))
    return value[start:end]


def eval_program(program, value):
    return ''.join(eval_part(part, value) for part in program.parts)


def try_eval(program, value):
    """output string or None when evaluation raises"""
    try:
        return eval_program(program, value)
    except (MatchNotFound, IndexOutOfRange, EmptyRange):
        return None


def positions(program):
    """every position logic of a program, left to right"""
    result = []
    for part in program.parts:
        if isinstance(part, SubStr):
            result.append(part.left)
            result.append(part.right)
    return result
