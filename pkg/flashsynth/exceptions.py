"""exceptions raised by the flashsynth library"""


class FlashSynthError(Exception):
    """root of every error the library raises"""


class ConfigError(FlashSynthError):
    pass


class GrammarError(FlashSynthError):
    pass


class ProgramError(FlashSynthError):
    pass


class InvalidProgram(ProgramError):
    pass


class ProgramSyntaxError(ProgramError):

    def __init__(self, offset, expected=None, message=None):
        self.offset = offset
        self.expected = sorted(expected) if expected else []
        if message is None:
            message = 'syntax error at offset %s' % offset
            if self.expected:
                message += ', expected one of: %s' % ', '.join(self.expected)
        super().__init__(message)


class EvaluationError(ProgramError):
    pass


class MatchNotFound(EvaluationError):
    pass


class IndexOutOfRange(EvaluationError):
    pass


class EmptyRange(EvaluationError):
    pass


class NoPrograms(FlashSynthError):
    pass


class GenerationFailed(FlashSynthError):
    pass


class FormatError(FlashSynthError):

    def __init__(self, line, message):
        self.line = line
        if line is None:
            super().__init__(message)
        else:
            super().__init__('line %s: %s' % (line, message))


class TensorError(FlashSynthError):
    pass


class ShapeMismatch(TensorError):

    def __init__(self, op_name, first_shape, second_shape):
        self.shapes = (tuple(first_shape), tuple(second_shape))
        super().__init__('%s: incompatible shapes %s and %s' % (
            op_name, tuple(first_shape), tuple(second_shape)))


class NonScalarLoss(TensorError):
    pass


class TapeReplayError(TensorError):
    pass


class TapeMismatch(TensorError):
    pass


class CheckpointError(FlashSynthError):
    pass


class EncodingError(FlashSynthError):
    pass


class StringTooLong(EncodingError):
    pass


class UnknownChar(EncodingError):
    pass


class TooManyPairs(EncodingError):
    pass


class DimensionMismatch(EncodingError):
    pass


class ModelError(FlashSynthError):
    pass


class CompleteTree(ModelError):
    pass


class InvalidExpansion(ModelError):
    pass


class InvalidSequence(ModelError):

    def __init__(self, reason, index):
        self.reason = reason
        self.index = index
        super().__init__('%s at token %s' % (reason, index))


class NonFiniteLoss(FlashSynthError):
    pass


class InvariantViolation(FlashSynthError):
    pass
