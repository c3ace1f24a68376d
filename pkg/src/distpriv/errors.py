"""Exception types shared across the package."""


class ConfigError(ValueError):
    """Invalid or inconsistent experiment configuration."""


class EstimationError(ValueError):
    """Too few or unusable samples for parameter estimation."""


class AssumptionViolation(ValueError):
    """A mechanism's modeling assumption fails beyond tolerance.

    Carries the offending pair of secret labels when the violation is
    attributable to a specific protected pair.
    """

    def __init__(self, message, pair=None):
        super().__init__(message)
        self.pair = pair


class NumericError(ArithmeticError):
    """A matrix is singular or indefinite beyond repair tolerance."""


class SamplingError(RuntimeError):
    """A table cannot supply the requested stratified subset."""


class TrainingError(ValueError):
    """Meta-classifier training received unusable inputs."""


class ParseError(ValueError):
    """Malformed input file; carries a 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class FormatError(ParseError):
    """Input file does not match the expected column layout."""
