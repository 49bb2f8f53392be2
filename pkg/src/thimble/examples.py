"""Constructors for the bundled worked examples.

The JSON files in ``thimble/data`` are ``emit`` of these objects.
"""

from __future__ import annotations

import math

from .ainfty import AInftyAlgebra, adjoin_units
from .bimod import BimoduleHom, cone, diagonal, direct_sum, dual
from .bndalg import AlgebraWithBoundary, interval
from .corelin import RSpace
from .crindex import CROperatorData, constant_strip
from .hoch import HochschildCochain


def kronecker() -> AInftyAlgebra:
    """Two objects, two arrows ``x, y: 1 -> 2``, all operations zero."""
    return AInftyAlgebra(RSpace.build(2, [("x", 1, 2), ("y", 1, 2)]), {})


def kronecker_split():
    """``B = A + A^v``, the split extension of the dual diagonal by the diagonal."""
    D = diagonal(adjoin_units(kronecker()))
    return direct_sum(D, dual(D))


def kronecker_twist_map() -> BimoduleHom:
    """Closed homomorphism ``A^v -> A`` whose cone is a non-split extension."""
    D = diagonal(adjoin_units(kronecker()))
    V = dual(D)
    return BimoduleHom(V, D, {
        (1, 0): {("y", "e1*"): {"y"}, ("x", "x*"): {"e2"}},
        (0, 1): {("e2*", "y"): {"y"}, ("x*", "x"): {"e1"}},
    })


def kronecker_twisted():
    return cone(kronecker_twist_map(), ("", "")).bimodule


def kronecker_unit_cochain() -> HochschildCochain:
    """Degree-0 cochain ``e1 + e2`` with values in the split ``B``."""
    B = kronecker_split()
    return HochschildCochain(B.algebra, B, {(): {"e1", "e2"}})


def interval_boundary() -> AlgebraWithBoundary:
    return interval()


def strip() -> CROperatorData:
    return constant_strip()


def shifted_strip() -> CROperatorData:
    s = constant_strip()
    return CROperatorData(s.euler, s.ends, (s.arcs[0], s.arcs[1] - math.pi))


BUNDLED = {
    "kronecker.json": kronecker,
    "kronecker_h.json": kronecker,
    "kronecker_split.json": kronecker_split,
    "kronecker_twisted.json": kronecker_twisted,
    "kronecker_twist_map.json": kronecker_twist_map,
    "kronecker_unit_cochain.json": kronecker_unit_cochain,
    "interval.json": interval_boundary,
    "constant_strip.json": strip,
    "shifted_strip.json": shifted_strip,
}
