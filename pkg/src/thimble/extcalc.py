"""Ext groups of finite bimodules over a unital associative algebra ``H = R + Hbar``.

Cochains of degree ``n`` are R-bimodule maps
``Hbar^{(x)q} (x) M (x) Hbar^{(x)p} -> N`` with ``q + p = n`` (the normalized
two-sided bar complex).  The unnormalized variant uses all of ``H`` including
the idempotents as inputs; it is only tractable in low degree and serves as a
cross-check.
"""

from __future__ import annotations

from typing import Iterable, Mapping

from .ainfty import AInftyAlgebra, HomologyAlgebra, project_to_names
from .corelin import (
    EMPTY,
    F2Matrix,
    Generator,
    InputError,
    MultiMap,
    RSpace,
    bits_of,
    enumerate_chains,
    kernel_basis,
    rank,
    solve,
)


class AssociativeAlgebra:
    """``Hbar`` with an associative product; units ``e1..em`` stay implicit."""

    def __init__(self, space: RSpace, product: MultiMap | Mapping | None = None):
        if isinstance(product, MultiMap):
            product = product.entries
        self.space = space
        self.product = MultiMap([space, space], space, product or {})
        for g in space.gens:
            if not g.src < g.tgt:
                raise InputError(f"augmentation ideal is not directed: {g.name!r} has src >= tgt")
        for a, b, c in enumerate_chains(space, 3) if space.dim else []:
            if self.mul_vec(self.mul(a, b), (c,)) != self.mul_vec((a,), self.mul(b, c)):
                raise InputError(f"product is not associative on {(a, b, c)}")

    @classmethod
    def from_ainfty(cls, A: AInftyAlgebra) -> "AssociativeAlgebra":
        extra = sorted(d for d in A.mu if d != 2)
        if extra:
            raise InputError(f"algebra has operations mu^{extra}; only mu^2 is allowed here")
        return cls(A.space, A.mu.get(2))

    @property
    def m(self) -> int:
        return self.space.m

    def mul(self, a: str, b: str) -> frozenset:
        return self.product.entries.get((a, b), EMPTY)

    def mul_vec(self, u: Iterable[str], v: Iterable[str]) -> frozenset:
        out = frozenset()
        for a in u:
            for b in v:
                out = out ^ self.mul(a, b)
        return out

    def max_chain_length(self) -> int:
        n = 0
        while self.space.dim and enumerate_chains(self.space, n + 1):
            n += 1
        return n


class FiniteBimoduleOverH:
    """Strict bimodule over ``H``: left/right actions of ``Hbar``; units act as identity."""

    def __init__(self, algebra: AssociativeAlgebra, space: RSpace,
                 left: Mapping | MultiMap | None = None, right: Mapping | MultiMap | None = None):
        if space.m != algebra.m:
            raise InputError("module and algebra disagree on m")
        self.algebra = algebra
        self.space = space
        left = left.entries if isinstance(left, MultiMap) else (left or {})
        right = right.entries if isinstance(right, MultiMap) else (right or {})
        self.left = MultiMap([algebra.space, space], space, left)
        self.right = MultiMap([space, algebra.space], space, right)
        self._check()

    def lact(self, a: str, x: str) -> frozenset:
        return self.left.entries.get((a, x), EMPTY)

    def ract(self, x: str, a: str) -> frozenset:
        return self.right.entries.get((x, a), EMPTY)

    def _check(self) -> None:
        H = self.algebra
        hs = H.space
        for x in self.space.gens:
            for a in hs.gens:
                if a.src != x.tgt:
                    continue
                for b in hs.gens:
                    if b.src != a.tgt:
                        continue
                    lhs = frozenset()
                    for y in self.lact(a.name, x.name):
                        lhs = lhs ^ self.lact(b.name, y)
                    rhs = frozenset()
                    for c in H.mul(b.name, a.name):
                        rhs = rhs ^ self.lact(c, x.name)
                    if lhs != rhs:
                        raise InputError(f"left action is not associative on {(b.name, a.name, x.name)}")
            for a in hs.gens:
                if a.tgt != x.src:
                    continue
                for b in hs.gens:
                    if b.tgt != a.src:
                        continue
                    lhs = frozenset()
                    for y in self.ract(x.name, a.name):
                        lhs = lhs ^ self.ract(y, b.name)
                    rhs = frozenset()
                    for c in H.mul(a.name, b.name):
                        rhs = rhs ^ self.ract(x.name, c)
                    if lhs != rhs:
                        raise InputError(f"right action is not associative on {(x.name, a.name, b.name)}")
            for a in hs.gens:
                if a.src != x.tgt:
                    continue
                for b in hs.gens:
                    if b.tgt != x.src:
                        continue
                    lhs = frozenset()
                    for y in self.lact(a.name, x.name):
                        lhs = lhs ^ self.ract(y, b.name)
                    rhs = frozenset()
                    for y in self.ract(x.name, b.name):
                        rhs = rhs ^ self.lact(a.name, y)
                    if lhs != rhs:
                        raise InputError(f"actions do not commute on {(a.name, x.name, b.name)}")

    @classmethod
    def from_bimodule(cls, P, algebra: AssociativeAlgebra | None = None) -> "FiniteBimoduleOverH":
        """A strict A-infinity bimodule (only ``mu^{1|1|0}``, ``mu^{0|1|1}``)."""
        extra = sorted(k for k in P.ops if k not in ((1, 0), (0, 1)))
        if extra:
            raise InputError(f"bimodule has operations {extra}; only (1,0) and (0,1) are allowed")
        H = algebra or AssociativeAlgebra.from_ainfty(P.algebra)
        left = {k: v for k, v in P.ops.get((1, 0), {}).items()}
        right = {k: v for k, v in P.ops.get((0, 1), {}).items()}
        return cls(H, P.space, left, right)


def diagonal_module(H: AssociativeAlgebra) -> FiniteBimoduleOverH:
    """``H`` over itself; the units are generators ``e1..em``."""
    from .ainfty import unit_name
    units = tuple(Generator(unit_name(i), i, i) for i in range(1, H.m + 1))
    space = RSpace(H.m, units + H.space.gens)
    left, right = {}, {}
    for a in H.space.gens:
        left[(a.name, unit_name(a.src))] = frozenset((a.name,))
        right[(unit_name(a.tgt), a.name)] = frozenset((a.name,))
        for b in H.space.gens:
            if a.src == b.tgt:
                out = H.mul(a.name, b.name)
                if out:
                    left[(a.name, b.name)] = out
                    right[(a.name, b.name)] = out
    return FiniteBimoduleOverH(H, space, left, right)


def dual_module(M: FiniteBimoduleOverH) -> FiniteBimoduleOverH:
    """``M^v`` with ``(a f)(x) = f(x a)`` and ``(f a)(x) = f(a x)``."""
    from .bimod import dual_name
    gens = tuple(Generator(dual_name(g.name), g.tgt, g.src, -g.deg) for g in M.space.gens)
    space = RSpace(M.space.m, gens)
    left: dict = {}
    right: dict = {}
    for (x, a), outs in M.right.entries.items():
        for y in outs:
            k = (a, dual_name(y))
            left[k] = left.get(k, EMPTY) ^ {dual_name(x)}
    for (a, x), outs in M.left.entries.items():
        for y in outs:
            k = (dual_name(y), a)
            right[k] = right.get(k, EMPTY) ^ {dual_name(x)}
    return FiniteBimoduleOverH(M.algebra, space, left, right)


# ---------------------------------------------------------------------------
# cochain complexes
# ---------------------------------------------------------------------------


class _Basis:
    """Basis of the input algebra for cochains: ``Hbar`` or all of ``H``."""

    def __init__(self, H: AssociativeAlgebra, normalized: bool):
        from .ainfty import unit_name
        self.H = H
        self.normalized = normalized
        gens = H.space.gens
        if not normalized:
            gens = tuple(Generator(unit_name(i), i, i) for i in range(1, H.m + 1)) + gens
        self.space = RSpace(H.m, gens)
        self.units = frozenset() if normalized else frozenset(
            unit_name(i) for i in range(1, H.m + 1))

    def chains(self, n: int) -> list[tuple]:
        if n == 0:
            return [()]
        if not self.space.dim:
            return []
        return enumerate_chains(self.space, n)

    def mul(self, a: str, b: str) -> frozenset:
        if a in self.units:
            return frozenset((b,))
        if b in self.units:
            return frozenset((a,))
        return self.H.mul(a, b)


class BarCochains:
    """``C^n(M, N)`` for ``n = 0..top`` with the two-sided bar differential."""

    def __init__(self, M: FiniteBimoduleOverH, N: FiniteBimoduleOverH, top: int,
                 normalized: bool = True):
        if M.algebra is not N.algebra and (M.algebra.space != N.algebra.space or
                                           M.algebra.product != N.algebra.product):
            raise InputError("modules over different algebras")
        self.M, self.N = M, N
        self.basis = _Basis(M.algebra, normalized)
        self.top = top
        self.coords: list[list[tuple]] = []
        self.index: list[dict] = []
        for n in range(top + 1):
            coords = []
            for q in range(n + 1):
                p = n - q
                for x in M.space.gens:
                    lefts = [c for c in self.basis.chains(q) if not c or self._src(c) == x.tgt]
                    rights = [a for a in self.basis.chains(p) if not a or self._tgt(a) == x.src]
                    for c in lefts:
                        for a in rights:
                            src = self._src_of(a, x)
                            tgt = self._tgt_of(c, x)
                            for h in N.space.in_slot(src, tgt):
                                coords.append((c, x.name, a, h))
            self.coords.append(coords)
            self.index.append({c: i for i, c in enumerate(coords)})
        self._d: dict[int, F2Matrix] = {}

    def _src(self, chain):
        return self.basis.space.gen(chain[-1]).src

    def _tgt(self, chain):
        return self.basis.space.gen(chain[0]).tgt

    def _src_of(self, a, x):
        return self.basis.space.gen(a[-1]).src if a else x.src

    def _tgt_of(self, c, x):
        return self.basis.space.gen(c[0]).tgt if c else x.tgt

    def dim(self, n: int) -> int:
        return len(self.coords[n])

    def _lact(self, a: str, y: str) -> frozenset:
        if a in self.basis.units:
            return frozenset((y,)) if self.N.space.gen(y).tgt == self.basis.space.gen(a).src else EMPTY
        return self.N.lact(a, y)

    def _ract(self, y: str, a: str) -> frozenset:
        if a in self.basis.units:
            return frozenset((y,)) if self.N.space.gen(y).src == self.basis.space.gen(a).tgt else EMPTY
        return self.N.ract(y, a)

    def _mlact(self, a: str, x: str) -> frozenset:
        if a in self.basis.units:
            return frozenset((x,)) if self.M.space.gen(x).tgt == self.basis.space.gen(a).src else EMPTY
        return self.M.lact(a, x)

    def _mract(self, x: str, a: str) -> frozenset:
        if a in self.basis.units:
            return frozenset((x,)) if self.M.space.gen(x).src == self.basis.space.gen(a).tgt else EMPTY
        return self.M.ract(x, a)

    def differential(self, n: int) -> F2Matrix:
        """``d: C^n -> C^{n+1}``."""
        if n in self._d:
            return self._d[n]
        if n + 1 > self.top:
            raise InputError(f"cochains only built up to degree {self.top}")
        idx = self.index[n]
        rows = []

        def f(c, x, a, h):
            return idx.get((c, x, a, h), None)

        for c, x, a, h in self.coords[n + 1]:
            row = 0

            def hit(c2, x2, a2, h2):
                nonlocal row
                k = f(c2, x2, a2, h2)
                if k is not None:
                    row ^= 1 << k

            q, p = len(c), len(a)
            # outer left action: c_q . f(c_{q-1}..c_1, x, a)
            if q:
                for y in self.N.space.names:
                    if h in self._lact(c[0], y):
                        hit(c[1:], x, a, y)
            # products inside the left chain
            for i in range(q - 1):
                for g in self.basis.mul(c[i], c[i + 1]):
                    hit(c[:i] + (g,) + c[i + 2:], x, a, h)
            # c_1 . x
            if q:
                for x2 in self._mlact(c[-1], x):
                    hit(c[:-1], x2, a, h)
            # x . a_p
            if p:
                for x2 in self._mract(x, a[0]):
                    hit(c, x2, a[1:], h)
            for i in range(p - 1):
                for g in self.basis.mul(a[i], a[i + 1]):
                    hit(c, x, a[:i] + (g,) + a[i + 2:], h)
            # f(..., a_p..a_2) . a_1
            if p:
                for y in self.N.space.names:
                    if h in self._ract(y, a[-1]):
                        hit(c, x, a[:-1], y)
            rows.append(row)
        D = F2Matrix(len(self.coords[n + 1]), len(self.coords[n]), tuple(rows))
        self._d[n] = D
        return D

    def vector(self, n: int, cochain: Mapping) -> int:
        """``cochain`` maps ``(left, x, right)`` to an output vector in ``N``."""
        v = 0
        for (c, x, a), outs in cochain.items():
            for h in outs:
                key = (tuple(c), x, tuple(a), h)
                if key not in self.index[n]:
                    raise InputError(f"{key} is not a degree-{n} cochain coordinate")
                v ^= 1 << self.index[n][key]
        return v

    def cochain(self, n: int, vec: int) -> dict:
        out: dict = {}
        for i in bits_of(vec):
            c, x, a, h = self.coords[n][i]
            out[(c, x, a)] = out.get((c, x, a), EMPTY) ^ {h}
        return out


def ext_dim(M: FiniteBimoduleOverH, N: FiniteBimoduleOverH, k: int,
            normalized: bool = True) -> int:
    """``dim Ext^k_{H (x) H^op}(M, N)`` for ``k <= 2``."""
    if not 0 <= k <= 2:
        raise InputError("ext_dim supports degrees 0, 1, 2")
    C = BarCochains(M, N, k + 1, normalized)
    d_k = C.differential(k)
    kernel = C.dim(k) - rank(d_k)
    if k == 0:
        return kernel
    d_prev = C.differential(k - 1)
    if not (d_k @ d_prev).is_zero():
        raise AssertionError("bar differential does not square to zero")
    return kernel - rank(d_prev)


def is_zero_class(M: FiniteBimoduleOverH, N: FiniteBimoduleOverH, n: int,
                  cochain: Mapping) -> bool:
    """Whether a degree-``n`` cocycle is a coboundary; refuses non-cocycles."""
    C = BarCochains(M, N, n + 1)
    v = C.vector(n, cochain)
    if C.differential(n).apply(v):
        raise InputError("the given cochain is not a cocycle")
    if n == 0:
        return v == 0
    return solve(C.differential(n - 1), v) is not None


def bimodule_maps_dim(M: FiniteBimoduleOverH, N: FiniteBimoduleOverH) -> int:
    """Dimension of ``Hom_{H-H}(M, N)`` by solving the intertwining equations."""
    H = M.algebra
    unknowns = []
    for x in M.space.gens:
        for y in N.space.in_slot(x.src, x.tgt):
            unknowns.append((x.name, y))
    col = {u: i for i, u in enumerate(unknowns)}
    rows = []
    for x in M.space.gens:
        for a in H.space.gens:
            # g(a x) = a g(x)
            if a.src == x.tgt:
                eq: dict = {}
                for x2 in M.lact(a.name, x.name):
                    for y in N.space.in_slot(*M.space.slot(x2)):
                        eq.setdefault(y, 0)
                        eq[y] ^= 1 << col[(x2, y)]
                for y0 in N.space.in_slot(x.src, x.tgt):
                    for y in N.lact(a.name, y0):
                        eq.setdefault(y, 0)
                        eq[y] ^= 1 << col[(x.name, y0)]
                rows.extend(v for v in eq.values() if v)
            if a.tgt == x.src:
                eq = {}
                for x2 in M.ract(x.name, a.name):
                    for y in N.space.in_slot(*M.space.slot(x2)):
                        eq.setdefault(y, 0)
                        eq[y] ^= 1 << col[(x2, y)]
                for y0 in N.space.in_slot(x.src, x.tgt):
                    for y in N.ract(y0, a.name):
                        eq.setdefault(y, 0)
                        eq[y] ^= 1 << col[(x.name, y0)]
                rows.extend(v for v in eq.values() if v)
    E = F2Matrix(len(rows), len(unknowns), tuple(rows))
    return len(kernel_basis(E))


def bar_resolution_homology(M: FiniteBimoduleOverH, top: int) -> list[int]:
    """Homology dims of ``... -> H (x) Hbar^q (x) M (x) Hbar^p (x) H -> M -> 0``.

    Entry ``n`` is the homology at resolution degree ``n`` (with the
    augmentation onto ``M`` as degree -1); exactness means all zeros.
    """
    H = M.algebra
    full = _Basis(H, normalized=False)
    bar = _Basis(H, normalized=True)

    def terms(n):
        out = []
        for q in range(n + 1):
            p = n - q
            for x in M.space.gens:
                for c in bar.chains(q):
                    if c and full.space.gen(c[-1]).src != x.tgt:
                        continue
                    for a in bar.chains(p):
                        if a and full.space.gen(a[0]).tgt != x.src:
                            continue
                        lo = full.space.gen(a[-1]).src if a else x.src
                        hi = full.space.gen(c[0]).tgt if c else x.tgt
                        for hl in full.space.gens:
                            if hl.src != hi:
                                continue
                            for hr in full.space.gens:
                                if hr.tgt != lo:
                                    continue
                                out.append((hl.name, c, x.name, a, hr.name))
        return out

    spaces = [terms(n) for n in range(top + 2)]
    index = [{t: i for i, t in enumerate(s)} for s in spaces]
    mindex = {n: i for i, n in enumerate(M.space.names)}

    def act_left(h, x):
        return frozenset((x,)) if h in full.units else M.lact(h, x)

    def act_right(x, h):
        return frozenset((x,)) if h in full.units else M.ract(x, h)

    def boundary(n):
        cols = []
        for hl, c, x, a, hr in spaces[n]:
            v = 0

            def put(t):
                nonlocal v
                if n == 0:
                    v ^= 1 << mindex[t]
                else:
                    v ^= 1 << index[n - 1][t]

            if n == 0:
                for y in act_left(hl, x):
                    for z in act_right(y, hr):
                        put(z)
                cols.append(v)
                continue
            q = len(c)
            # merge hl with c_q, products inside c, c_1 acting on x; same on the right
            if q:
                for g in full.mul(hl, c[0]):
                    put((g, c[1:], x, a, hr))
                for i in range(q - 1):
                    for g in bar.mul(c[i], c[i + 1]):
                        put((hl, c[:i] + (g,) + c[i + 2:], x, a, hr))
                for y in M.lact(c[-1], x):
                    put((hl, c[:-1], y, a, hr))
            if a:
                for y in M.ract(x, a[0]):
                    put((hl, c, y, a[1:], hr))
                for i in range(len(a) - 1):
                    for g in bar.mul(a[i], a[i + 1]):
                        put((hl, c, x, a[:i] + (g,) + a[i + 2:], hr))
                for g in full.mul(a[-1], hr):
                    put((hl, c, x, a[:-1], g))
            cols.append(v)
        rows = len(M.space.names) if n == 0 else len(spaces[n - 1])
        return F2Matrix.from_columns(cols, rows)

    maps = [boundary(n) for n in range(top + 2)]
    out = []
    # degree -1: M modulo image of the augmentation
    out.append(len(M.space.names) - rank(maps[0]))
    for n in range(top + 1):
        if not (maps[n] @ maps[n + 1]).is_zero():
            raise AssertionError(f"bar resolution differential squares to nonzero at {n}")
        out.append(len(spaces[n]) - rank(maps[n]) - rank(maps[n + 1]))
    return out


# ---------------------------------------------------------------------------
# homology-level modules
# ---------------------------------------------------------------------------


def homology_module(P, HA: HomologyAlgebra) -> tuple[FiniteBimoduleOverH, object, dict]:
    """``H(P)`` as a strict bimodule over ``H(A)``.

    Returns the module, the slot homology of ``P``, and the name lookup
    ``(slot, k) -> generator``.
    """
    from .ainfty import slot_homology_space
    hom = P.homology()
    space, reps, lookup = slot_homology_space(hom)
    H = AssociativeAlgebra(HA.space, HA.product)
    left, right = {}, {}
    for c in HA.space.gens:
        for x in space.gens:
            if c.src == x.tgt:
                acc = frozenset()
                for a in HA.reps[c.name]:
                    for b in reps[x.name]:
                        acc = acc ^ P.act((a,), b, ())
                out = project_to_names(hom, lookup, acc)
                if out:
                    left[(c.name, x.name)] = out
            if c.tgt == x.src:
                acc = frozenset()
                for a in HA.reps[c.name]:
                    for b in reps[x.name]:
                        acc = acc ^ P.act((), b, (a,))
                out = project_to_names(hom, lookup, acc)
                if out:
                    right[(x.name, c.name)] = out
    mod = FiniteBimoduleOverH(H, space, left, right)
    mod.reps = reps
    return mod, hom, lookup


def module_named(kind: str, H: AssociativeAlgebra) -> FiniteBimoduleOverH:
    if kind == "diagonal":
        return diagonal_module(H)
    if kind == "dual_diagonal":
        return dual_module(diagonal_module(H))
    raise InputError(f"unknown module {kind!r}; expected 'diagonal' or 'dual_diagonal'")


__all__ = [
    "AssociativeAlgebra",
    "BarCochains",
    "FiniteBimoduleOverH",
    "bar_resolution_homology",
    "bimodule_maps_dim",
    "diagonal_module",
    "dual_module",
    "ext_dim",
    "homology_module",
    "is_zero_class",
    "module_named",
]

