"""Citation-based ranking of CS doctoral programs."""

__version__ = "0.1.0"
