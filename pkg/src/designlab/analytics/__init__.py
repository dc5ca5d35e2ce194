"""
Analytics for spherical (t,t)-designs

Sharp constants, the polynomial engine behind Hom(t,t), the Jacobi-polynomial
design test, verification and numerical search.
"""

from .designs import DesignReport, mub_family, onb, potential, verify
from .search import FramePotentialSearch, SearchResult, minimize

__all__ = [
    "DesignReport",
    "FramePotentialSearch",
    "SearchResult",
    "minimize",
    "mub_family",
    "onb",
    "potential",
    "verify",
]
