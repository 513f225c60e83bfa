"""Joint maintenance planning and capacitated routing for geo-distributed sites."""

__version__ = "0.1.0"
