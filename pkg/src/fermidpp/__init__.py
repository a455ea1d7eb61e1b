"""Determinantal point processes of free lattice fermions.

Builds finite and zero temperature correlation kernels from symmetric
operator truncations, verifies the determinantal space-time formulas
against exact Fock-space traces, and samples the resulting stationary
processes.
"""

__version__ = "0.1.0"
