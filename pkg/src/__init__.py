"""
spectralfield

A numerical lab for translation-invariant random fields on Z^d with a
prescribed structure function: exact spectral quadrature, Gaussian field
synthesis on the torus, local-mass fluctuations, cumulant diagnostics and
Gaussian entropy per site.
"""

__version__ = "0.3.0"
