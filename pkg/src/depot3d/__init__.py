"""Self-hostable FAIR repository for 3D research data in the humanities."""

__version__ = "0.1.0"
