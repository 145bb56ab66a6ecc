"""Exception types raised across the simulator."""


class SimulationError(Exception):
    """Base class for simulator errors."""


class InvalidArgumentError(SimulationError, ValueError):
    pass


class ConformabilityError(SimulationError, ValueError):
    """Operand dimensions do not agree."""


class DegenerateChannelError(SimulationError, ArithmeticError):
    """A channel needed for normalisation is identically zero."""


class ScenarioError(SimulationError):
    """User placement constraints could not be satisfied."""


class ConfigError(SimulationError, ValueError):
    """Malformed or unknown configuration entry.

    ``line`` is the 1-based line in the source text, when known.
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
