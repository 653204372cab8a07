"""Reference embedding provider for the patenteb wire protocol."""

__version__ = "0.1.0"
