from typing import Optional


class GameLogicError(Exception):
    pass


class ParseError(GameLogicError):
    """
    Raised for malformed formula, model or machine text.
    `line` and `column` are 1-indexed when known.
    """

    def __init__(
        self, message: str, line: Optional[int] = None, column: Optional[int] = None
    ):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class ArityError(ParseError):
    pass


class UndeclaredSymbolError(ParseError):
    pass


class DuplicateLabelError(ParseError):
    pass


class ClockOverflowError(GameLogicError):
    pass


class BudgetError(GameLogicError, ValueError):
    pass


class StrategyError(GameLogicError):
    pass


class RankError(GameLogicError, IndexError):
    pass


class MachineError(GameLogicError):
    pass


class HeadOutOfBoundsError(MachineError):
    pass


class NameClashError(GameLogicError):
    pass
