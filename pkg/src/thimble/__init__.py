"""Directed A-infinity algebras, their bimodules, Hochschild and Ext computations
over F2, algebras with boundary, and an index calculus for Cauchy-Riemann
operators on surfaces with strip-like ends."""

from .corelin import InputError
from .crindex import NumericalFailure

__all__ = ["InputError", "NumericalFailure"]
