"""regex tokens of the string transformation language and their matching"""
import re
from dataclasses import dataclass
from enum import Enum

from flashsynth.exceptions import InvalidProgram


class TokenKind(Enum):
    PROPER_CASE = 'ProperCase'
    CAPS = 'CAPS'
    LOWERCASE = 'Lowercase'
    DIGITS = 'Digits'
    ALPHABETS = 'Alphabets'
    ALPHANUMERIC = 'Alphanumeric'
    START_OF_STRING = 'StartOfString'
    END_OF_STRING = 'EndOfString'
    CONST = 'ConstTok'


# the 8 non-constant kinds, in grammar declaration order
NAMED_KINDS = (
    TokenKind.PROPER_CASE, TokenKind.CAPS, TokenKind.LOWERCASE, TokenKind.DIGITS,
    TokenKind.ALPHABETS, TokenKind.ALPHANUMERIC, TokenKind.START_OF_STRING,
    TokenKind.END_OF_STRING)

TOKEN_PATTERNS = {
    TokenKind.PROPER_CASE: re.compile(r'[A-Z][a-z]+'),
    TokenKind.CAPS: re.compile(r'[A-Z]+'),
    TokenKind.LOWERCASE: re.compile(r'[a-z]+'),
    TokenKind.DIGITS: re.compile(r'[0-9]+'),
    TokenKind.ALPHABETS: re.compile(r'[A-Za-z]+'),
    TokenKind.ALPHANUMERIC: re.compile(r'[A-Za-z0-9]+'),
}


@dataclass(frozen=True)
class RegexToken:
    kind: TokenKind
    literal: str = None

    def __post_init__(self):
        if self.kind == TokenKind.CONST:
            if not self.literal:
                raise InvalidProgram('constant token needs a non-empty literal')
        elif self.literal is not None:
            raise InvalidProgram('only constant tokens carry a literal')


def named_token(name):
    return RegexToken(TokenKind(name))


def const_token(literal):
    return RegexToken(TokenKind.CONST, literal)


def match_token(token, value):
    """maximal, non-overlapping, left to right (start, end) spans of token in value"""
    if token.kind == TokenKind.START_OF_STRING:
        return [(0, 0)]
    if token.kind == TokenKind.END_OF_STRING:
        return [(len(value), len(value))]
    if token.kind == TokenKind.CONST:
        pattern = re.compile(re.escape(token.literal))
    else:
        pattern = TOKEN_PATTERNS[token.kind]
    return [match.span() for match in pattern.finditer(value)]
