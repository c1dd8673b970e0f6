"""canonical surface syntax: parse_program and serialize_program"""
import json

from lark import Lark, Transformer, v_args
from lark.exceptions import UnexpectedInput, VisitError

from flashsynth.dsl import ConstPos, ConstStr, Direction, Program, SubStr, TokenMatch
from flashsynth.exceptions import InvalidProgram, ProgramSyntaxError
from flashsynth.tokens import TokenKind, const_token, named_token


PROGRAM_GRAMMAR = r'''
    start: "Concat" "(" part ("," part)* ")"
    ?part: const_str | sub_str
    const_str: "ConstStr" "(" STRING ")"
    sub_str: "SubStr" "(" position "," position ")"
    ?position: const_pos | token_match
    const_pos: "ConstPos" "(" SIGNED_INT ")"
    token_match: "Match" "(" regex "," SIGNED_INT "," DIRECTION ")"
    ?regex: NAMED_TOKEN -> named_regex
          | "Tok" "(" STRING ")" -> const_regex
    NAMED_TOKEN: "ProperCase" | "CAPS" | "Lowercase" | "Digits" | "Alphabets"
               | "Alphanumeric" | "StartOfString" | "EndOfString"
    DIRECTION: "Start" | "End"
    STRING: /"(?:[^"\\]|\\.)*"/
    %import common.SIGNED_INT
    %import common.WS
    %ignore WS
'''

_parser = Lark(PROGRAM_GRAMMAR, parser='lalr', propagate_positions=True)


def decode_string(token):
    try:
        return json.loads(str(token))
    except ValueError:
        raise ProgramSyntaxError(token.start_pos, message='bad string escape at offset %s' %
                                 token.start_pos)


@v_args(meta=True)
class ProgramTransformer(Transformer):

    def start(self, meta, children):
        return Program(tuple(children))

    def const_str(self, meta, children):
        return ConstStr(decode_string(children[0]))

    def sub_str(self, meta, children):
        return SubStr(children[0], children[1])

    def const_pos(self, meta, children):
        return ConstPos(int(children[0]))

    def token_match(self, meta, children):
        return TokenMatch(children[0], int(children[1]), Direction(str(children[2])))

    def named_regex(self, meta, children):
        return named_token(str(children[0]))

    def const_regex(self, meta, children):
        return const_token(decode_string(children[0]))


def parse_program(text):
    """parse canonical (or whitespace-varied) program text into a Program"""
    try:
        tree = _parser.parse(text)
    except UnexpectedInput as exception:
        offset = getattr(exception, 'pos_in_stream', None)
        if offset is None or offset < 0:
            offset = len(text)
        expected = getattr(exception, 'expected', None) or getattr(exception, 'allowed', None)
        raise ProgramSyntaxError(offset, expected)
    try:
        return ProgramTransformer().transform(tree)
    except VisitError as exception:
        original = exception.orig_exc
        if isinstance(original, ProgramSyntaxError):
            raise original
        if isinstance(original, InvalidProgram):
            offset = exception.obj.meta.start_pos if hasattr(exception.obj, 'meta') else 0
            raise ProgramSyntaxError(offset, message='%s at offset %s' % (original, offset))
        raise


def serialize_token(token):
    if token.kind == TokenKind.CONST:
        return 'Tok(%s)' % json.dumps(token.literal)
    return token.kind.value


def serialize_position(position):
    if isinstance(position, ConstPos):
        return 'ConstPos(%d)' % position.k
    return 'Match(%s, %d, %s)' % (
        serialize_token(position.token), position.k, position.direction.value)


def serialize_part(part):
    if isinstance(part, ConstStr):
        return 'ConstStr(%s)' % json.dumps(part.s)
    return 'SubStr(%s, %s)' % (serialize_position(part.left), serialize_position(part.right))


def serialize_program(program):
    return 'Concat(%s)' % ', '.join(serialize_part(part) for part in program.parts)
