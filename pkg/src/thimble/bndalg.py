"""Algebras with boundary and their Frobenius dga, over F2 with integer gradings.

An algebra with boundary is a graded unital associative algebra ``A`` with a
tensor ``D = sum_j D^{2,j} (x) D^{1,j}`` of degree ``n + 1`` that is symmetric
and satisfies the two-sided compatibility with the product.  Over F2 every
sign in these identities is +1; the full cyclic theory needs characteristic
zero and is not modelled here.

The boundary ``dA = A + A^v[-n]`` is the trivial extension algebra with
``d(a, f) = (sum_j f(D^{2,j}) D^{1,j}, 0)`` and ``int(a, f) = f(e)``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .corelin import (
    EMPTY,
    Echelon,
    F2Matrix,
    InputError,
    bits_of,
    image_basis,
    kernel_basis,
    quotient_basis,
)


def _xor(acc: dict, key, val: int = 1) -> None:
    v = acc.get(key, 0) ^ val
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


class GradedAlgebra:
    """Finite graded unital associative algebra with a basis containing the unit."""

    def __init__(self, degrees: Mapping[str, int], product: Mapping[tuple, Iterable[str]],
                 unit: str):
        self.degrees = dict(degrees)
        self.names = list(self.degrees)
        if unit not in self.degrees:
            raise InputError(f"unit {unit!r} is not a basis element")
        self.unit = unit
        table: dict = {}
        for (a, b), outs in product.items():
            for n in (a, b):
                if n not in self.degrees:
                    raise InputError(f"product entry uses unknown element {n!r}")
            outs = frozenset(outs)
            for c in outs:
                if c not in self.degrees:
                    raise InputError(f"product entry outputs unknown element {c!r}")
                if self.degrees[c] != self.degrees[a] + self.degrees[b]:
                    raise InputError(f"product {a}*{b} -> {c} does not respect degrees")
            if outs:
                table[(a, b)] = outs
        for a in self.names:
            for key in ((unit, a), (a, unit)):
                if table.get(key, frozenset((a,))) != frozenset((a,)):
                    raise InputError(f"{unit!r} does not act as a unit on {a!r}")
                table[key] = frozenset((a,))
        self.table = table
        self._check_associative()

    @property
    def dim(self) -> int:
        return len(self.names)

    def mul(self, a: str, b: str) -> frozenset:
        return self.table.get((a, b), EMPTY)

    def mul_vec(self, u: Iterable[str], v: Iterable[str]) -> frozenset:
        out = frozenset()
        for a in u:
            for b in v:
                out = out ^ self.mul(a, b)
        return out

    def _check_associative(self) -> None:
        for a, b, c in itertools.product(self.names, repeat=3):
            if self.mul_vec(self.mul(a, b), (c,)) != self.mul_vec((a,), self.mul(b, c)):
                raise InputError(f"product is not associative on {(a, b, c)}")


@dataclass(frozen=True)
class BoundaryViolation:
    axiom: str
    detail: str

    def __str__(self) -> str:
        return f"{self.axiom} fails: {self.detail}"


class AlgebraWithBoundary:
    """``(A, D, n)``; ``D`` is a set of basis pairs ``(D^2, D^1)`` summed over F2."""

    def __init__(self, A: GradedAlgebra, D: Iterable[tuple], n: int):
        self.A = A
        self.n = n
        acc: dict = {}
        for u, v in D:
            for x in (u, v):
                if x not in A.degrees:
                    raise InputError(f"D uses unknown element {x!r}")
            _xor(acc, (u, v))
        self.D = frozenset(acc)


def _tensor(pairs: Iterable[tuple]) -> frozenset:
    acc: dict = {}
    for p in pairs:
        _xor(acc, p)
    return frozenset(acc)


def check_boundary_axioms(B: AlgebraWithBoundary) -> BoundaryViolation | None:
    A, D, n = B.A, B.D, B.n
    for u, v in D:
        if A.degrees[u] + A.degrees[v] != n + 1:
            raise InputError(f"D term {u} (x) {v} has degree "
                             f"{A.degrees[u] + A.degrees[v]}, expected {n + 1}")
    swapped = frozenset((v, u) for u, v in D)
    if swapped != D:
        diff = sorted(swapped ^ D)
        return BoundaryViolation("symmetry", f"D differs from its transpose at {diff}")
    for a in A.names:
        lhs = _tensor((w, v) for u, v in D for w in A.mul(a, u))
        rhs = _tensor((u, w) for u, v in D for w in A.mul(v, a))
        if lhs != rhs:
            return BoundaryViolation("left/right compatibility",
                                     f"a D^2 (x) D^1 != D^2 (x) D^1 a for a = {a!r}")
        lhs = _tensor((w, v) for u, v in D for w in A.mul(u, a))
        rhs = _tensor((u, w) for u, v in D for w in A.mul(a, v))
        if lhs != rhs:
            return BoundaryViolation("middle compatibility",
                                     f"D^2 a (x) D^1 != D^2 (x) a D^1 for a = {a!r}")
    return None


def dual_name(name: str) -> str:
    return name + "*"


@dataclass
class FrobeniusDGA:
    """``A + A^v[-n]`` with trivial-extension product, differential and trace."""

    names: list
    degrees: dict
    product: dict          # (x, y) -> frozenset
    differential: dict     # x -> frozenset
    trace: frozenset       # basis elements with int = 1
    source: AlgebraWithBoundary = field(repr=False)

    def mul(self, x: str, y: str) -> frozenset:
        return self.product.get((x, y), EMPTY)

    def d(self, x: str) -> frozenset:
        return self.differential.get(x, EMPTY)

    def mul_vec(self, u: Iterable[str], v: Iterable[str]) -> frozenset:
        out = frozenset()
        for a in u:
            for b in v:
                out = out ^ self.mul(a, b)
        return out

    def d_vec(self, u: Iterable[str]) -> frozenset:
        out = frozenset()
        for a in u:
            out = out ^ self.d(a)
        return out

    def integrate(self, u: Iterable[str]) -> int:
        return len(frozenset(u) & self.trace) & 1

    def pairing(self, x: str, y: str) -> int:
        return self.integrate(self.mul(x, y))

    def check_invariants(self) -> str | None:
        """None, or the name of the first failing dga/Frobenius invariant."""
        for x in self.names:
            if self.d_vec(self.d(x)):
                return f"d^2 != 0 on {x!r}"
            if self.integrate(self.d(x)):
                return f"int d != 0 on {x!r}"
            for y in self.names:
                lhs = self.d_vec(self.mul(x, y))
                rhs = self.mul_vec(self.d(x), (y,)) ^ self.mul_vec((x,), self.d(y))
                if lhs != rhs:
                    return f"d is not a derivation on ({x!r}, {y!r})"
                if self.integrate(self.mul_vec(self.d(x), (y,))) != self.integrate(
                        self.mul_vec((x,), self.d(y))):
                    return f"<dx, y> != <x, dy> on ({x!r}, {y!r})"
        for x in self.names:
            for y in self.names:
                for z in self.names:
                    if self.mul_vec(self.mul(x, y), (z,)) != self.mul_vec((x,), self.mul(y, z)):
                        return f"product is not associative on {(x, y, z)}"
        return None


def boundary_dga(B: AlgebraWithBoundary) -> FrobeniusDGA:
    bad = check_boundary_axioms(B)
    if bad is not None:
        raise InputError(f"not an algebra with boundary: {bad}")
    A, n = B.A, B.n
    names = list(A.names) + [dual_name(a) for a in A.names]
    clash = set(A.names) & {dual_name(a) for a in A.names}
    if clash:
        raise InputError(f"basis names collide with dual names: {sorted(clash)}")
    degrees = dict(A.degrees)
    for a in A.names:
        degrees[dual_name(a)] = n - A.degrees[a]
    product: dict = {}
    for (a, b), outs in A.table.items():
        product[(a, b)] = outs
    # (a y*)(x) = y*(x a), (y* b)(x) = y*(b x)
    for a in A.names:
        for x in A.names:
            for y in A.mul(x, a):
                key = (a, dual_name(y))
                product[key] = product.get(key, EMPTY) ^ {dual_name(x)}
            for y in A.mul(a, x):
                key = (dual_name(y), a)
                product[key] = product.get(key, EMPTY) ^ {dual_name(x)}
    product = {k: v for k, v in product.items() if v}
    differential: dict = {}
    for u, v in B.D:
        key = dual_name(u)
        differential[key] = differential.get(key, EMPTY) ^ {v}
    differential = {k: v for k, v in differential.items() if v}
    dga = FrobeniusDGA(names, degrees, product, differential,
                       frozenset((dual_name(A.unit),)), B)
    bad_inv = dga.check_invariants()
    if bad_inv is not None:
        raise AssertionError(f"boundary dga invariant fails: {bad_inv}")
    return dga


@dataclass
class DGAHomology:
    dims: dict          # degree -> dim
    reps: list          # homology basis, each a frozenset of basis names
    product: dict       # (i, j) -> bitset over reps
    degrees: list

    @property
    def total(self) -> int:
        return len(self.reps)

    def mul(self, u: int, v: int) -> int:
        out = 0
        for i in bits_of(u):
            for j in bits_of(v):
                out ^= self.product.get((i, j), 0)
        return out

    def square_zero_elements(self, limit: int = 4096) -> list[int]:
        """Nonzero homogeneous classes (as bitsets over reps) with square zero."""
        out = []
        by_deg: dict = {}
        for i, d in enumerate(self.degrees):
            by_deg.setdefault(d, []).append(i)
        for idx in by_deg.values():
            if 2 ** len(idx) > limit:
                raise InputError("too many classes to enumerate")
            for mask in range(1, 2 ** len(idx)):
                v = 0
                for k, i in enumerate(idx):
                    if (mask >> k) & 1:
                        v |= 1 << i
                if self.mul(v, v) == 0:
                    out.append(v)
        return out


def dga_homology(dga: FrobeniusDGA) -> DGAHomology:
    names = dga.names
    pos = {x: i for i, x in enumerate(names)}
    dims: dict = {}
    reps: list = []
    rep_deg: list = []
    solver = Echelon(track=True)
    bounds_all = []
    cycles_by_deg = {}
    for deg in sorted(set(dga.degrees.values())):
        basis = [x for x in names if dga.degrees[x] == deg]
        cols = [sum(1 << pos[y] for y in dga.d(x)) for x in basis]
        ker = []
        M = F2Matrix.from_columns(cols, len(names))
        for k in kernel_basis(M):
            v = 0
            for i in bits_of(k):
                v |= 1 << pos[basis[i]]
            ker.append(v)
        cycles_by_deg[deg] = ker
    for deg in sorted(set(dga.degrees.values())):
        basis = [x for x in names if dga.degrees[x] == deg]
        cols = [sum(1 << pos[y] for y in dga.d(x)) for x in basis]
        bounds_all.extend(image_basis(F2Matrix.from_columns(cols, len(names))))
    for b in bounds_all:
        solver.add(b)
    n_bound = solver.count
    for deg in sorted(cycles_by_deg):
        bnd = [b for b in bounds_all if all(dga.degrees[names[i]] == deg for i in bits_of(b))]
        chosen = quotient_basis(bnd, cycles_by_deg[deg])
        for z in chosen:
            solver.add(z)
            reps.append(frozenset(names[i] for i in bits_of(z)))
            rep_deg.append(deg)
        if chosen:
            dims[deg] = len(chosen)
    n_rep = len(reps)
    product = {}
    for i in range(n_rep):
        for j in range(n_rep):
            prod = dga.mul_vec(reps[i], reps[j])
            vec = sum(1 << pos[x] for x in prod)
            combo = solver.express(vec)
            if combo is None:
                raise AssertionError("product of cycles is not a cycle")
            coeff = (combo >> n_bound) & ((1 << n_rep) - 1)
            if coeff:
                product[(i, j)] = coeff
    return DGAHomology(dims, reps, product, rep_deg)


# ---------------------------------------------------------------------------
# instances
# ---------------------------------------------------------------------------


def interval() -> AlgebraWithBoundary:
    """``A = H*([-1, 1]) = K`` in degree 0, ``n = 0``, ``D = 0``."""
    return AlgebraWithBoundary(GradedAlgebra({"e": 0}, {}, "e"), (), 0)


def boundary_solutions(A: GradedAlgebra, n: int) -> list[frozenset]:
    """Basis of all ``D`` of degree ``n + 1`` satisfying the axioms."""
    pairs = [(u, v) for u in A.names for v in A.names
             if A.degrees[u] + A.degrees[v] == n + 1]
    col = {p: i for i, p in enumerate(pairs)}
    rows: list[int] = []

    def add_eq(acc: dict):
        rows.extend(v for v in acc.values() if v)

    eq: dict = {}
    for (u, v) in pairs:
        _xor(eq, (u, v), 1 << col[(u, v)])
        _xor(eq, (u, v), 1 << col[(v, u)])
    add_eq(eq)
    for a in A.names:
        for first in (True, False):
            eq = {}
            for (u, v) in pairs:
                bit = 1 << col[(u, v)]
                if first:
                    for w in A.mul(a, u):
                        _xor(eq, (w, v), bit)
                    for w in A.mul(v, a):
                        _xor(eq, (u, w), bit)
                else:
                    for w in A.mul(u, a):
                        _xor(eq, (w, v), bit)
                    for w in A.mul(a, v):
                        _xor(eq, (u, w), bit)
            add_eq(eq)
    M = F2Matrix(len(rows), len(pairs), tuple(rows))
    return [frozenset(pairs[i] for i in bits_of(k)) for k in kernel_basis(M)]


def small_algebras() -> list[GradedAlgebra]:
    """A few graded unital algebras of dimension at most 4."""
    out = [GradedAlgebra({"e": 0}, {}, "e")]
    for d in (0, 1, 2):
        out.append(GradedAlgebra({"e": 0, "x": d}, {}, "e"))
    out.append(GradedAlgebra({"e": 0, "f": 0}, {("f", "f"): ("f",)}, "e"))
    out.append(GradedAlgebra({"e": 0, "x": 1, "x2": 2}, {("x", "x"): ("x2",)}, "e"))
    out.append(GradedAlgebra({"e": 0, "x": 1, "y": 1, "xy": 2},
                             {("x", "y"): ("xy",), ("y", "x"): ("xy",)}, "e"))
    out.append(GradedAlgebra({"e": 0, "x": 2, "y": 2, "xy": 4},
                             {("x", "y"): ("xy",), ("y", "x"): ("xy",)}, "e"))
    out.append(GradedAlgebra({"e": 0, "x": 0, "y": 0},
                             {("x", "y"): (), ("x", "x"): ("x",), ("y", "y"): ("y",)}, "e"))
    return out


def random_boundary_algebra(rng: random.Random) -> AlgebraWithBoundary:
    """Random valid ``(A, D, n)`` with ``dim A <= 4``."""
    algs = small_algebras()
    while True:
        A = rng.choice(algs)
        n = rng.randint(-1, 4)
        basis = boundary_solutions(A, n)
        if not basis:
            continue
        acc: dict = {}
        for b in basis:
            if rng.random() < 0.5:
                for p in b:
                    _xor(acc, p)
        return AlgebraWithBoundary(A, frozenset(acc), n)
