"""Support reconstruction for wave-number-dependent Helmholtz sources.

Multi-frequency far-field or near-field data at a few observation points are
turned into indicator images of strips, annuli and their intersections by a
factorization (range) criterion.
"""
__version__ = "0.1.0"
