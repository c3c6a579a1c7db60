"""Quantum state-space exploration of WHILE programs."""
__version__ = "0.1.0"
