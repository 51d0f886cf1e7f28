"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of a formula or operation."""


class SamplingError(DomainError):
    """A field feature is too small to be represented on the sampling grid."""


class CapacityError(RuntimeError):
    """A resource (SLM partitions, addressable sites) is exhausted."""

    def __init__(self, message, required=None, available=None):
        super().__init__(message)
        self.required = required
        self.available = available


class CatalogMissError(KeyError):
    """A canonical pattern has no hologram patch in the catalog."""

    def __init__(self, pattern):
        super().__init__(f"pattern not in catalog: {pattern}")
        self.pattern = pattern

    def __str__(self):
        return self.args[0]


class PatternNotAddressableError(DomainError):
    """A pattern's bounding box does not fit the SLM sub-array."""


class ConfigError(ValueError):
    """Invalid or incomplete tool configuration."""
