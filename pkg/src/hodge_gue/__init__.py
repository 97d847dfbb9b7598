"""Exact verification of the cubic Hodge / even-coupling GUE correspondence."""

__version__ = "0.1.0"
