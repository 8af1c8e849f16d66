"""Exception hierarchy shared by the compiler and the simulator."""

from __future__ import annotations


class BatchFheError(Exception):
    """Base class for every error raised by this package."""


class DslError(BatchFheError):
    """An error in user source code, carrying a 1-based line/column."""

    kind = "error"

    def __init__(self, message: str, line: int = 0, column: int = 0):
        self.message = message
        self.line = line
        self.column = column
        loc = f"{line}:{column}: " if line else ""
        super().__init__(f"{loc}{self.kind}: {message}")


class LexError(DslError):
    kind = "lexical error"


class ParseError(DslError):
    kind = "syntax error"

    def __init__(self, message: str, line: int = 0, column: int = 0, expected: frozenset[str] = frozenset()):
        self.expected = expected
        if expected:
            message = f"{message} (expected one of: {', '.join(sorted(expected))})"
        super().__init__(message, line, column)


class TypeCheckError(DslError):
    kind = "type error"


class UnrollError(DslError):
    kind = "unroll error"


class IrParseError(BatchFheError):
    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


class PipelineError(BatchFheError):
    """Bad pass configuration or an internal invariant broken by a pass."""


class ParameterError(BatchFheError):
    """No parameter set in the table can hold the circuit's noise."""


class NoiseBudgetExceeded(BatchFheError):
    def __init__(self, peak_noise: int, budget: int):
        self.peak_noise = peak_noise
        self.budget = budget
        super().__init__(f"noise budget exceeded: peak noise {peak_noise} > budget {budget}")
