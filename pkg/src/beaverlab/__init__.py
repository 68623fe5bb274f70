"""Halting-time censuses of small Turing machines and proof-length censuses
of small equational axiom systems, with shared timeout statistics."""

__version__ = "0.1.0"
