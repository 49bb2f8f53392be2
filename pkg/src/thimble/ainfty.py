"""Directed A-infinity algebras over R = K^m with F2 coefficients.

Operations are stored as :class:`~thimble.corelin.MultiMap` tables keyed by
input tuples written ``(a_d, ..., a_1)``.  Structures are finitely supported:
``mu^d = 0`` above ``d_max``.  Strict units are never stored; the unital
algebra ``A = R + Abar`` evaluates them by rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping

from .corelin import (
    EMPTY,
    Generator,
    InputError,
    MultiMap,
    RSpace,
    SlotHomology,
    enumerate_chains,
    slot_homology,
)


def unit_name(i: int) -> str:
    return f"e{i}"


@dataclass(frozen=True)
class Violation:
    """First failing instance of a structure relation."""

    arity: object
    inputs: tuple
    residual: frozenset

    def __str__(self) -> str:
        res = " + ".join(sorted(self.residual)) or "0"
        return f"relation fails at arity {self.arity} on {self.inputs}: residual {res}"


class AInftyAlgebra:
    """Non-unital A-infinity algebra ``Abar`` over R.

    ``mu`` maps ``d`` to either a MultiMap or a plain ``{tuple: outputs}``
    table, for ``1 <= d <= d_max``.
    """

    def __init__(self, space: RSpace, mu: Mapping[int, object] | None = None,
                 directed: bool = True, d_max: int | None = None):
        self.space = space
        self.directed = directed
        tables: dict[int, MultiMap] = {}
        for d, table in (mu or {}).items():
            if d < 1:
                raise InputError(f"operation arity must be positive, got {d}")
            if not isinstance(table, MultiMap):
                table = MultiMap([space] * d, space, table)
            elif table.domain != (space,) * d or table.codomain != space:
                raise InputError(f"mu^{d} has the wrong domain or codomain")
            if table.entries:
                tables[d] = table
        top = max(tables, default=1)
        if d_max is None:
            d_max = max(top, space.m - 1, 1) if directed else top
        if top > d_max:
            raise InputError(f"mu^{top} is nonzero but d_max = {d_max}")
        self.d_max = d_max
        self.mu = tables
        if directed:
            for g in space.gens:
                if not g.src < g.tgt:
                    raise InputError(
                        f"directed algebra: generator {g.name!r} has src {g.src} >= tgt {g.tgt}")
        for n in space.names:
            if n in {unit_name(i) for i in range(1, space.m + 1)}:
                raise InputError(f"generator name {n!r} is reserved for strict units")

    @property
    def m(self) -> int:
        return self.space.m

    def op(self, tup: tuple) -> frozenset:
        """``mu^d`` on a tuple of generators of ``Abar``."""
        table = self.mu.get(len(tup))
        if table is None:
            return EMPTY
        return table.entries.get(tup, EMPTY)

    def chains(self, length: int, start: int | None = None, end: int | None = None) -> list[tuple]:
        return cached_chains(self, length, start, end)

    def max_chain_length(self) -> int:
        """Longest composable tuple of generators (directed algebras only)."""
        if not self.directed:
            raise InputError("chain length is unbounded for non-directed algebras")
        longest = 0
        while self.chains(longest + 1):
            longest += 1
        if longest > self.m - 1:
            raise AssertionError("directed algebra with a composable tuple longer than m-1")
        return longest

    def __repr__(self) -> str:
        return f"AInftyAlgebra(m={self.m}, dim={self.space.dim}, ops={sorted(self.mu)})"


def cached_chains(alg, length, start=None, end=None):
    cache = alg.__dict__.setdefault("_chain_cache", {})
    key = (length, start, end)
    if key not in cache:
        if length == 0:
            cache[key] = [()]
        else:
            cache[key] = enumerate_chains(alg.space, length, start, end)
    return cache[key]


def _relation_residual(op: Callable[[tuple], frozenset], tup: tuple) -> frozenset:
    """Sum over ``i, j`` of ``mu(a_D..a_{i+j+1}, mu^j(a_{i+j}..a_{i+1}), a_i..a_1)``."""
    D = len(tup)
    acc = frozenset()
    for j in range(1, D + 1):
        for i in range(0, D - j + 1):
            lo, hi = D - i - j, D - i
            inner = op(tup[lo:hi])
            for h in inner:
                acc = acc ^ op(tup[:lo] + (h,) + tup[hi:])
    return acc


def check_relations(A: AInftyAlgebra) -> Violation | None:
    """None when every A-infinity relation holds, else the first violation.

    Relations are checked for ``D <= 2 d_max - 1``; beyond that every term
    vanishes because ``mu^d = 0`` for ``d > d_max``.
    """
    top = 2 * A.d_max - 1
    if A.directed:
        top = min(top, A.max_chain_length())
    for D in range(1, top + 1):
        for tup in A.chains(D):
            res = _relation_residual(A.op, tup)
            if res:
                return Violation(D, tup, res)
    return None


class UnitalAInftyAlgebra:
    """``A = R + Abar`` with strict units adjoined.

    Units are the generators ``e1..em`` of :attr:`space`; everything else is
    delegated to the base algebra.
    """

    def __init__(self, base: AInftyAlgebra):
        self.base = base
        m = base.m
        units = [Generator(unit_name(i), i, i) for i in range(1, m + 1)]
        self.space = RSpace(m, tuple(units) + base.space.gens)
        self.units = frozenset(g.name for g in units)

    @property
    def m(self) -> int:
        return self.base.m

    def is_unit(self, name: str) -> bool:
        return name in self.units

    def op(self, tup: tuple) -> frozenset:
        """``mu^d_A`` including the strict-unit rules."""
        unit_pos = [k for k, n in enumerate(tup) if n in self.units]
        if not unit_pos:
            return self.base.op(tup)
        if len(tup) != 2:
            return EMPTY
        left, right = tup
        sp = self.space
        if sp.gen(left).src != sp.gen(right).tgt:
            return EMPTY
        # e_i a = a, a e_i = a, e_i e_i = e_i
        if left in self.units:
            return frozenset((right,))
        return frozenset((left,))

    def chains(self, length: int, start: int | None = None, end: int | None = None) -> list[tuple]:
        cache = self.__dict__.setdefault("_chain_cache", {})
        key = (length, start, end)
        if key not in cache:
            cache[key] = [()] if length == 0 else enumerate_chains(self.space, length, start, end)
        return cache[key]


def adjoin_units(A: AInftyAlgebra) -> UnitalAInftyAlgebra:
    """Strictly unital extension; refuses algebras whose relations fail."""
    bad = check_relations(A)
    if bad is not None:
        raise InputError(f"cannot adjoin units: {bad}")
    return UnitalAInftyAlgebra(A)


def check_unital_relations(U: UnitalAInftyAlgebra, max_arity: int | None = None) -> Violation | None:
    """Relation check on ``A = R + Abar``, unit tuples included.

    Tuples of units compose indefinitely, so the arity is capped; the
    default cap covers every tuple in which a unit meets a nonzero operation.
    """
    if max_arity is None:
        max_arity = max(2 * U.base.d_max - 1, 3) + 1
    for D in range(1, max_arity + 1):
        for tup in U.chains(D):
            res = _relation_residual(U.op, tup)
            if res:
                return Violation(D, tup, res)
    return None


@dataclass
class HomologyAlgebra:
    """Associative algebra ``H(A) = R + H(Abar)`` with its induced product.

    ``space`` holds the generators of ``H(Abar)``, each named after its
    cycle representative; units stay implicit.  ``product`` is the MultiMap
    ``H(Abar) (x) H(Abar) -> H(Abar)`` induced by ``mu^2``.
    """

    space: RSpace
    product: MultiMap
    reps: dict  # homology generator -> cycle representative in Abar
    homology: SlotHomology = field(repr=False)

    def algebra(self) -> AInftyAlgebra:
        """``H(Abar)`` as an A-infinity algebra with only ``mu^2``."""
        return AInftyAlgebra(self.space, {2: self.product}, directed=all(
            g.src < g.tgt for g in self.space.gens))


def rep_name(vec: Iterable[str]) -> str:
    return "[" + "+".join(sorted(vec)) + "]"


def slot_homology_space(homology: SlotHomology) -> tuple[RSpace, dict, dict]:
    """RSpace of homology generators, rep table, and (slot, index) -> name."""
    gens = []
    reps = {}
    lookup = {}
    for slot in sorted(homology.reps):
        for k, z in enumerate(homology.reps[slot]):
            name = rep_name(z)
            gens.append(Generator(name, slot[0], slot[1]))
            reps[name] = z
            lookup[(slot, k)] = name
    return RSpace(homology.space.m, tuple(gens)), reps, lookup


def project_to_names(homology: SlotHomology, lookup: dict, cycle: Iterable[str]) -> frozenset:
    out = frozenset()
    for slot, coeff in homology.project(cycle).items():
        k = 0
        while coeff:
            if coeff & 1:
                out = out ^ {lookup[(slot, k)]}
            coeff >>= 1
            k += 1
    return out


def homology_algebra(A: AInftyAlgebra | UnitalAInftyAlgebra) -> HomologyAlgebra:
    """Slotwise ``ker mu^1 / im mu^1`` with the product induced by ``mu^2``."""
    base = A.base if isinstance(A, UnitalAInftyAlgebra) else A
    bad = check_relations(base)
    if bad is not None:
        raise InputError(f"relations fail: {bad}")
    hom = slot_homology(base.space, lambda n: base.op((n,)))
    space, reps, lookup = slot_homology_space(hom)
    entries = {}
    for left in space.names:
        for right in space.names:
            if space.gen(left).src != space.gen(right).tgt:
                continue
            acc = frozenset()
            for a in reps[left]:
                for b in reps[right]:
                    acc = acc ^ base.op((a, b))
            out = project_to_names(hom, lookup, acc)
            if out:
                entries[(left, right)] = out
    product = MultiMap([space, space], space, entries)
    H = HomologyAlgebra(space, product, reps, hom)
    _assert_associative(space, product)
    return H


def _assert_associative(space: RSpace, product: MultiMap) -> None:
    def mul(x, y):
        return product.entries.get((x, y), EMPTY)

    for tup in enumerate_chains(space, 3) if space.dim else []:
        a, b, c = tup
        lhs = frozenset()
        for h in mul(b, c):
            lhs = lhs ^ mul(a, h)
        rhs = frozenset()
        for h in mul(a, b):
            rhs = rhs ^ mul(h, c)
        if lhs != rhs:
            raise AssertionError(f"induced product is not associative on {tup}")
