from __future__ import annotations


class SeqSpaceError(Exception):
    """Base class for every error raised by seqspace."""


class InputError(SeqSpaceError):
    """Bad user input: the CLI maps these to exit code 2."""


class SpecFormatError(InputError):
    pass


class ExprSyntaxError(InputError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at byte {offset}")
        self.message = message
        self.offset = offset


class UnknownIdentifier(ExprSyntaxError):
    def __init__(self, name: str, offset: int):
        super().__init__(f"unknown identifier '{name}'", offset)
        self.name = name


class UnbalancedParen(ExprSyntaxError):
    pass


class EmptyInput(ExprSyntaxError):
    def __init__(self, offset: int = 0):
        super().__init__("empty expression", offset)


class EvaluationError(InputError):
    pass


class DivisionByZero(EvaluationError):
    pass


class DomainError(EvaluationError):
    pass


class RationalUnsupported(EvaluationError):
    pass


class UnboundVariable(EvaluationError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable '{name}'")
        self.name = name


class LambdaViolation(InputError):
    def __init__(self, message: str, index: int):
        super().__init__(f"{message} at k={index}")
        self.index = index


class NonPositive(LambdaViolation):
    def __init__(self, index: int):
        super().__init__("lambda is not positive", index)


class NotIncreasing(LambdaViolation):
    def __init__(self, index: int):
        super().__init__("lambda is not strictly increasing", index)


class ExponentError(InputError):
    pass


class UnboundedExponent(ExponentError):
    pass


class NonPositiveExponent(ExponentError):
    def __init__(self, index: int):
        super().__init__(f"exponent is not positive at k={index}")
        self.index = index


class QNotMonotone(ExponentError):
    def __init__(self, index: int):
        super().__init__(f"q is not non-decreasing at n={index}")
        self.index = index


class HypothesisViolated(InputError):
    pass


class MixedExponents(InputError):
    pass


class ConjugateUndefined(InputError):
    pass


class UnsupportedCondition(InputError):
    pass


class BruteForceTooLarge(InputError):
    pass
