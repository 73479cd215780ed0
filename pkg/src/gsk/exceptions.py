class InputError(ValueError):
    """Raised for malformed inputs: wrong shapes, invalid parameters, bad files."""


class NumericalError(RuntimeError):
    """Raised when a factorization or objective evaluation cannot be completed."""
