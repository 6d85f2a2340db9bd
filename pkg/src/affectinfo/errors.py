"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError (and argparse usage
errors) exit with 2, everything else derived from AffectInfoError
exits with 1.
"""


class AffectInfoError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(AffectInfoError):
    """Malformed input file. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class DataError(AffectInfoError):
    """Input data violates a documented precondition (empty input,
    out-of-range value, duplicate word, degenerate weights, ...)."""


class DataIntegrityError(DataError):
    """Count tables are mutually inconsistent (e.g. an n-gram count
    exceeds its own context's (n-1)-gram count)."""


class ConfigError(AffectInfoError):
    """Invalid run configuration: missing paths, unknown scale preset,
    requested context size not covered by the available tables."""
