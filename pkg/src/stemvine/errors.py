"""Exception hierarchy shared by every module."""


class StemVineError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(StemVineError, ValueError):
    pass


class ConvergenceError(StemVineError, RuntimeError):
    """Iterative routine did not converge; ``last`` holds the final iterate."""

    def __init__(self, message, last=None, estimate=None):
        super().__init__(message)
        self.last = last
        self.estimate = estimate


class ParamError(StemVineError, ValueError):
    pass


class LabelError(StemVineError, ValueError):
    pass


class EvalError(StemVineError, ValueError):
    pass


class TemplateError(StemVineError, ValueError):
    pass


class ArchSyntaxError(StemVineError, ValueError):
    """Malformed architecture text. Carries 1-based ``line`` and ``column`` when known."""

    def __init__(self, message, line=None, column=None):
        loc = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + loc)
        self.line = line
        self.column = column


class SemanticError(StemVineError, ValueError):
    """Architecture parsed but violates structural rules."""

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class UnsupportedError(StemVineError, ValueError):
    pass


class ProfileViolation(StemVineError, ValueError):
    pass


class SizeError(StemVineError, ValueError):
    pass


class TrainError(StemVineError, RuntimeError):
    pass


class FormatError(StemVineError, ValueError):
    """Binary file does not match its declared layout."""
