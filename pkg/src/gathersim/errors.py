"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """Non-finite coordinates, out-of-range arguments and similar."""


class DegenerateHullError(InvalidInputError):
    """An operation needs a polygon with at least three vertices."""


class ConfigurationError(ValueError):
    """Simulation parameters violate a precondition."""


class DisconnectedError(ConfigurationError):
    """The initial visibility graph is not connected."""


class GenerationError(RuntimeError):
    """A scenario generator could not produce a valid configuration."""


class ScenarioFormatError(ValueError):
    """A scenario file is malformed, incomplete or of an unknown version."""
