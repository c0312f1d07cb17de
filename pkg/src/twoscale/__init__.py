"""
twoscale: two-scale multitype contact process laboratory

Exact simulation of the two-type contact process on graphs cut into patches
joined by long edges, its graphical representation and dual trees, the
oriented percolation comparison of the block construction, and a
config-driven CLI producing reproducible CSV outputs.
"""

__version__ = "1.0.0"
__license__ = "MIT"

from twoscale.main import main

__all__ = ["main"]
