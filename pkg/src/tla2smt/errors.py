"""Exceptions raised across the translation pipeline."""


class TranslationError(Exception):
    """Base class for errors raised by the translator."""


class TlaSyntaxError(TranslationError, SyntaxError):
    def __init__(self, line: int, col: int, message: str):
        self.line = line
        self.col = col
        self.message = message
        super().__init__(f"{line}:{col}: {message}")

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.message}"


class UnknownSymbol(TranslationError):
    def __init__(self, name: str, line: int = 0, col: int = 0):
        self.name = name
        self.line = line
        self.col = col
        super().__init__(f"{line}:{col}: unknown symbol {name!r}")


class BoolifyTypeError(TranslationError):
    """A syntactically non-Boolean expression sits where a formula is expected."""


class StepBudgetExceeded(TranslationError):
    pass


class FixpointBudgetExceeded(TranslationError):
    pass


class NonBasicInput(TranslationError):
    pass


class CarrierOverflow(TranslationError):
    pass


class SolverSpawnError(TranslationError):
    pass


class MalformedAnswer(TranslationError):
    pass
