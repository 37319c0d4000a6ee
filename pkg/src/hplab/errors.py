"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """A numerical routine failed to meet its accuracy or convergence contract."""


class ConfigError(ValueError):
    """An experiment configuration is invalid.

    ``code`` is a short machine-readable tag; ``field`` names the offending
    entry when there is one.
    """

    def __init__(self, code, message, field=None):
        self.code = code
        self.field = field
        super().__init__(message)
