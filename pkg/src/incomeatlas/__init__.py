"""incomeatlas: survey microdata to income-distribution keyframes."""

__version__ = "0.1.0"
