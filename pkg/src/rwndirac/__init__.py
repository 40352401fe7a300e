"""Dirac spectrum of an electron with anomalous moment near a charged point mass."""

__version__ = "0.1.0"
