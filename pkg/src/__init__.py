"""
UDW Harvest - Unruh-DeWitt detectors in circular and uniform acceleration.

Computes transition probabilities and EDR temperatures of single detectors
with Gaussian switching, and the non-local correlation and concurrence
harvested by pairs of detectors from the Minkowski vacuum.
"""

__version__ = '1.0.0'

# Expose CLI for package usage
from src.cli import main as cli_main

__all__ = ['cli_main']
