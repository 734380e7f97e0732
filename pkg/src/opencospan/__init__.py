"""Compositional open systems: structured cospans, open Markov processes,
coarse-graining, and black-boxing into exact linear relations."""

__version__ = "0.1.0"
