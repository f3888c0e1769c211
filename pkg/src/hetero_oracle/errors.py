"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside its mathematically valid domain."""


class DimensionError(ValueError):
    """Vector lengths are inconsistent with each other or with the grid."""


class VolatilityBoundError(ValueError):
    """A volatility evaluation exceeded its declared upper bound."""


class UnsupportedSignalError(ValueError):
    """The requested operation needs signal metadata that is absent."""


class ConfigError(ValueError):
    """An experiment configuration is invalid; message names the field."""
