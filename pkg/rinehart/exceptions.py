# rinehart/exceptions.py


class RinehartError(Exception):
    """Base class for every error raised by the engine."""

    exit_code = 2


# ----------------------------
# User errors (exit code 2)
# ----------------------------
class UserError(RinehartError):
    exit_code = 2


class ContextMismatch(UserError):
    pass


class ModulusRequired(UserError):
    pass


class IndexOutOfRange(UserError):
    pass


class NotLogarithmic(UserError):
    pass


class UnverifiedPresentation(UserError):
    pass


class PresentationMismatch(UserError):
    pass


class GeneratorMismatch(UserError):
    pass


class DegreeExceeded(UserError):
    pass


class TruncationExceeded(UserError):
    pass


class CounitNonzero(UserError):
    pass


class NonFreePresentation(UserError):
    pass


class LengthMismatch(UserError):
    pass


class UnverifiedSyzygy(UserError):
    pass


class UnknownPoint(UserError):
    pass


class FixtureError(UserError):
    pass


class DuplicateName(UserError):
    pass


class UnknownIdentifier(UserError):
    pass


class UnknownCommand(UserError):
    pass


class ParseError(UserError):
    def __init__(self, message, line=None, column=None, expected=None):
        self.message = message
        self.line = line
        self.column = column
        self.expected = expected
        location = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{location}")


# ----------------------------
# Internal errors (exit code 3)
# ----------------------------
class InternalError(RinehartError):
    exit_code = 3


class RewriteLimitExceeded(InternalError):
    pass


class InvariantBreach(InternalError):
    pass
