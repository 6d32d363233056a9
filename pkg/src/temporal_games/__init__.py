"""Simulation of temporal and spatio-temporal Bayesian quantum games."""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("temporal-games")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"
