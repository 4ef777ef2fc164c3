"""Seeded Monte Carlo simulator of content-centric mmWave D2D network initialization."""

__version__ = "0.1.0"
