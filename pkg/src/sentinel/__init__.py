"""Centralized Kubernetes misconfiguration logging service."""

__version__ = "0.1.0"
