"""Case-based reasoning engine for bandwidth allocation model management."""

__version__ = "0.1.0"
