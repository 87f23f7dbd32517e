"""Computational companion for Liouville-type theorems for Lévy operators.

Submodules
----------
levy_core
    Lévy triplets, characteristic exponents, pointwise operator application.
counterexample_discrete, counterexample_continuous
    Exact-arithmetic construction of a non-polynomial, slowly growing
    harmonic function for a lattice / continuous Lévy operator.
positive_liouville
    Harmonic exponentials, mixtures, Deny identities, exit-law Monte Carlo.
wiener_inversion
    Weighted Wiener-algebra checks and Neumann-series local inversion.
"""

__version__ = "0.1.0"
