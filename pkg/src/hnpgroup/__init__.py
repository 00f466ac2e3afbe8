"""Finite-group computations behind the Hasse norm principle criterion for
metacyclic extensions: Schur multipliers, lattice cohomology and verdicts."""

__version__ = "0.1.0"
