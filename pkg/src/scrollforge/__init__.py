"""Exact computer algebra over prime fields for 8-nodal nonic scrolls in P^5.

Modules:
    polycore    prime fields, monomial orders, sparse polynomials
    idealkit    Groebner bases and ideal algebra
    projlab     projective schemes, projections, singular loci, nodes
    linsys      plane linear systems with base conditions, rational maps
    k3pipeline  the staged construction of the scroll and its checks
    hklattice   lattice arithmetic for the degree-9 scroll classes
    cli         command line entry point
"""

__version__ = "0.1.0"
