class InputError(ValueError):
    """Bad or degenerate input data / parameters (CLI exit code 1)."""


class NumericalError(ArithmeticError):
    """A linear solve or eigensolver failed (CLI exit code 2)."""
