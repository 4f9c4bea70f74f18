"""Progressive-proximity bit-flipping decoder for toric and rotated planar codes."""

__version__ = "0.1.0"
