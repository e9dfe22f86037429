"""Deterministic USV mission simulator and ground-station service."""

__version__ = "0.1.0"
