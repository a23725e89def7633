class ChainUnifyError(Exception):
    """Base class for errors raised by the package."""


class SortError(ChainUnifyError):
    pass


class SignatureError(ChainUnifyError):
    pass


class ParseError(ChainUnifyError):
    def __init__(self, message: str, line: int = 0, column: int = 0):
        super().__init__(f"{line}:{column}: {message}" if line else message)
        self.line = line
        self.column = column


class FormatError(ChainUnifyError):
    pass


class BudgetExceeded(ChainUnifyError):
    pass


class InconsistentInput(ChainUnifyError):
    pass
