"""
slexp.

Expansion experiments for SL_d over residue rings of number fields: Cayley
spectra, random walk flattening, product growth and ping-pong freeness.
"""

__version__ = "0.1.1"
