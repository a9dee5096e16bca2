"""Exception types shared across the package.

Validation problems raise ``ValueError`` subclasses so library users can
catch them uniformly; ``InfeasibleError`` is deliberately not a
``ValueError`` because it signals a well-formed analysis with no feasible
answer (the CLI maps it to its own exit code).
"""

from __future__ import annotations


class TraceParseError(ValueError):
    """A trace file row could not be parsed.

    Carries the 1-based line number of the offending row when known.
    """

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class TraceIntegrityError(ValueError):
    """Trace contents contradict the declared metadata (e.g. shot count)."""


class ConfigError(ValueError):
    """A required configuration or metadata field is missing or unusable."""


class InfeasibleError(Exception):
    """The analysis is well-posed but has no feasible answer.

    Raised e.g. when a trace has no statistically significant stopping
    time, or when every (distance, stopping time) candidate is infeasible.
    """
