"""Weight filtrations on logarithmic de Rham and Hodge cohomology, exactly.

Two independent constructions of the weight filtration are implemented for
concrete normal-crossings scenarios: the decalage of the pole-order filtration
on an explicit Cech model, and the total cofiber of a hypercube of truncated
pure pieces. The package exists to compute both and check that they agree.
"""

__version__ = "0.1.0"
