"""Exception hierarchy shared by every module."""


class SullivanError(Exception):
    """Base class for all errors raised by this package."""


class DomainMismatch(SullivanError):
    """Operands live in different algebras."""


class GradingUnavailable(SullivanError):
    """A lower-degree slice was requested on an algebra without a second grading."""


class PreconditionError(SullivanError):
    """An operation was called on input outside its domain."""


class CapError(SullivanError):
    """A degree window is too small to certify the requested answer."""


class ChainMapViolation(SullivanError):
    def __init__(self, generator, residual):
        self.generator = generator
        self.residual = residual
        super().__init__(f"not a chain map at generator {generator}: residual {residual}")


class NotMaximalSequence(SullivanError):
    """Relation count differs from generator count."""


class NotRegular(SullivanError):
    """The presentation fails the regular-sequence certificate."""


class TheoryViolation(SullivanError):
    """A step that theory guarantees to succeed failed; indicates a bug or bad input."""


class ParseError(SullivanError):
    def __init__(self, message, line=None, column=None):
        self.reason = message
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class IncompleteContext(SullivanError):
    """A report lacks a value that a requested check needs."""
