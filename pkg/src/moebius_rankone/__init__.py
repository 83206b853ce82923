"""Moebius disjointness experiments for rank-one systems and Riesz products."""

__version__ = "0.1.0"
