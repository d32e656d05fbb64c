"""Fixed-point channel decoders, operation metering and efficiency metrics."""

__version__ = "0.1.0"
