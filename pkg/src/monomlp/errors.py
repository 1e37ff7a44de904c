"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Raised when a caller passes data that violates an interface contract."""


class SchemaError(ValueError):
    """Raised when a serialized document fails validation.

    The message names the offending path inside the document, e.g.
    ``layers[1].weights``.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class NumericError(ArithmeticError):
    """Raised when an evaluation produces a non-finite intermediate."""


class DivergenceError(RuntimeError):
    """Raised when a training loss becomes non-finite."""
