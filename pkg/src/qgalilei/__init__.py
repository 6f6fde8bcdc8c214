"""Multiparametric quantum deformations of the (1+1) extended Galilei algebra.

Modules
  scalars    truncated multivariate power series over Q
  algebra    PBW-normal-ordered enveloping algebra and tensor powers
  bialgebra  cocommutators, co-Jacobi conditions, automorphisms, r-matrices
  hopf       quantum coproducts, antipodes, Casimirs, universal R-matrices
  poisson    phase-space realizations and integrable N-particle systems
  lattice    lattice heat-Schrodinger equation and its deformed symmetry
  cli        command-line reports
"""

__version__ = "0.1.0"
