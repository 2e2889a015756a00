"""Exception hierarchy shared by every module."""


class SemencError(Exception):
    """Base class for library errors."""


class DomainError(SemencError, ValueError):
    """A neuron value falls outside its declared domain, or a lookup input is unmapped."""


class StateSpaceTooLarge(SemencError):
    """Exhaustive enumeration would exceed the configured cap."""


class NotHopfieldError(SemencError, ValueError):
    """Weights are not symmetric with a zero diagonal, or units are not binary."""


class UniverseMismatch(SemencError, ValueError):
    """Two model sets (or a knowledge base and an encoding) disagree on their atoms."""


class EncodingError(SemencError, ValueError):
    """An encoding cannot interpret a state."""


class TransportError(SemencError):
    """A state map is not a bijection, or does not commute with the dynamics."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class CompileError(SemencError, ValueError):
    """A knowledge base or network does not meet a compiler's preconditions."""


class NonConvergenceError(SemencError):
    """An iterative procedure ran out of budget."""

    def __init__(self, message, period=None):
        super().__init__(message)
        self.period = period


class ParseError(SemencError, ValueError):
    """Malformed input text; carries a 1-based line and column."""

    def __init__(self, message, line=None, column=None):
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
        self.line = line
        self.column = column
