class ConfigError(Exception):
    """Invalid configuration or arguments. CLI exit code 1."""


class NumericalFailure(Exception):
    """A solver or cross-check breached its tolerance. CLI exit code 2."""
