"""Conceptor-controlled recurrent neural networks with an adaptive control loop."""

__version__ = "0.1.0"
