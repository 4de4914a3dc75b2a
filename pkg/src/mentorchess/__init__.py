"""Mentor-assisted genetic tuning of a compact chess evaluation function."""

__version__ = "0.1.0"
