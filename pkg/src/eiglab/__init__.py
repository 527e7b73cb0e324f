"""Numerical laboratory for distinct eigenvalues under low-rank updates.

Builds matrices of prescribed Jordan structure, perturbs them by rank-r
updates, counts distinct eigenvalues and GMRES iterations, and runs the
deflated-Newton / Schur-complement experiment on a small KKT problem.
"""

__version__ = "0.1.0"
