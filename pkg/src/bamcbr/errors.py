"""Exception hierarchy shared across the package."""


class BamCbrError(Exception):
    """Base class for all package errors."""


class ConfigurationError(BamCbrError):
    """A schema, similarity, or engine configuration is invalid."""


class SchemaViolation(BamCbrError):
    """A problem or case does not conform to its declared schema."""


class EvaluationError(BamCbrError):
    """A similarity or evaluation computation is missing required values."""


class SimulationError(BamCbrError):
    """An invalid operation was requested on the link simulator."""


class ScenarioError(BamCbrError):
    """A scenario file is missing, malformed, or inconsistent."""
