import unittest
from flashsynth.exceptions import InvalidProgram
from flashsynth.tokens import RegexToken, TokenKind, const_token, match_token, named_token


class TestTokens(unittest.TestCase):

    def setUp(self):
        self.passes = []
        self.passes.append(('ProperCase', 'William Henry Charles', [(0, 7), (8, 13), (14, 21)]))
        self.passes.append(('CAPS', 'ABc DE', [(0, 2), (4, 6)]))
        self.passes.append(('Lowercase', 'ABc de', [(2, 3), (4, 6)]))
        self.passes.append(('Digits', '[CPT-1AB02', [(5, 6), (8, 10)]))
        self.passes.append(('Alphabets', 'ab1Cd e', [(0, 2), (3, 5), (6, 7)]))
        self.passes.append(('Alphanumeric', 'ab1-Cd e', [(0, 3), (4, 6), (7, 8)]))
        self.passes.append(('StartOfString', 'abc', [(0, 0)]))
        self.passes.append(('EndOfString', 'abc', [(3, 3)]))
        self.passes.append(('ProperCase', 'ABC', []))

    def test_match_named_tokens(self):
        for name, value, expected in self.passes:
            self.assertEqual(match_token(named_token(name), value), expected,
                             'Failed match of %s in %r' % (name, value))

    def test_match_constant_token(self):
        self.assertEqual(match_token(const_token(' '), 'a b c'), [(1, 2), (3, 4)])
        self.assertEqual(match_token(const_token('aa'), 'aaaaa'), [(0, 2), (2, 4)])
        self.assertEqual(match_token(const_token('.'), 'a-b'), [])

    def test_anchors_on_empty_string(self):
        self.assertEqual(match_token(named_token('StartOfString'), ''), [(0, 0)])
        self.assertEqual(match_token(named_token('EndOfString'), ''), [(0, 0)])

    def test_token_literals(self):
        with self.assertRaises(InvalidProgram):
            RegexToken(TokenKind.CONST)
        with self.assertRaises(InvalidProgram):
            RegexToken(TokenKind.CAPS, 'A')
        self.assertEqual(const_token('-'), RegexToken(TokenKind.CONST, '-'))


if __name__ == '__main__':
    unittest.main()
