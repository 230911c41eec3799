"""Computational kernel for mixed Hodge structures with polarized graded
quotients: canonical splittings, relative monodromy filtrations, SL(2)-orbit
data, boundary coordinates, rational fans, Hodge metrics and the Archimedean
height pairing."""

__version__ = "0.1.0"
