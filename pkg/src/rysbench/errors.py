"""
Exceptions and error records shared across rysbench.

Only genuine input or configuration problems are raised.  Undefined
descriptions, partial operations that are off-domain and failed verdicts are
ordinary values carried by the reports.
"""
from __future__ import annotations

from dataclasses import dataclass


class RysbenchError(Exception):
    """Base class for every error the command line maps to exit code 2."""


class ConfigurationError(RysbenchError):
    """A model, family, cover, property, suite or bound is missing or invalid."""


class ModelFileError(ConfigurationError):
    """A model file could not be read or does not match the schema."""

    def __init__(self, message: str, path: str = ''):
        self.path = path
        super().__init__(f'{path}: {message}' if path else message)


class EmptyClassError(RysbenchError):
    """A (lower, upper) pair is not the approximation pair of any subset."""


class BudgetExceededError(RysbenchError):
    """An exhaustive scan or search would exceed its configured budget."""


@dataclass
class ParseError:
    line: int        # 1-based
    column: int      # 0-based
    message: str

    def __str__(self) -> str:
        return f'{self.line}:{self.column}: {self.message}'


class SuiteSyntaxError(RysbenchError):
    """One or more lines of a quasi-identity suite failed to parse."""

    def __init__(self, errors: list[ParseError]):
        self.errors = list(errors)
        super().__init__('; '.join(str(e) for e in self.errors))
