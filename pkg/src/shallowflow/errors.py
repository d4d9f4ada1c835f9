class ConfigError(ValueError):
    """Invalid configuration or input file (CLI exit code 2)."""


class NumericalError(RuntimeError):
    """Non-finite values or a violated positivity guarantee (CLI exit code 3)."""


class NegativeDepthError(NumericalError):
    """A stage produced a depth below the round-off tolerance."""
