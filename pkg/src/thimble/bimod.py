"""A-infinity bimodules over a directed algebra and their dg category.

A bimodule ``P`` over ``Abar`` carries operations ``mu^{q|1|p}`` stored per
``(q, p)`` as tables keyed by ``left + (b,) + right``, where ``left`` is
``(c_q, ..., c_1)`` and ``right`` is ``(a_p, ..., a_1)``.  Homomorphisms use
the same layout.  Linear problems in the hom complex (differential,
composition, homotopies) are assembled over coordinates ``(left, b, right, h)``
with F2 linear forms stored as int bitsets.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .ainfty import (
    AInftyAlgebra,
    UnitalAInftyAlgebra,
    Violation,
    rep_name,
)
from .corelin import (
    EMPTY,
    F2Matrix,
    Generator,
    InputError,
    MultiMap,
    RSpace,
    SlotHomology,
    bits_of,
    homology_dim,
    kernel_basis,
    map_on_homology_rank,
    slot_homology,
    solve,
)

Key = tuple  # (left, b, right)


def _push(acc: dict, outs: Iterable[str], form: int) -> None:
    for h in outs:
        v = acc.get(h, 0) ^ form
        if v:
            acc[h] = v
        else:
            acc.pop(h, None)


def _lift(vec: Iterable[str]) -> dict:
    return {h: 1 for h in vec}


def _lower(vec: dict) -> frozenset:
    return frozenset(h for h, f in vec.items() if f & 1)


def _same_algebra(A: AInftyAlgebra, B: AInftyAlgebra) -> bool:
    if A is B:
        return True
    return A.space == B.space and {d: t.entries for d, t in A.mu.items()} == {
        d: t.entries for d, t in B.mu.items()}


def _tuples_over(alg: AInftyAlgebra, space: RSpace) -> list[Key]:
    """Every composable ``(left, b, right)`` with ``b`` in ``space``."""
    out = []
    top = alg.max_chain_length()
    for b in space.gens:
        rights = [r for p in range(top + 1) for r in alg.chains(p, end=b.src)]
        lefts = [l for q in range(top + 1) for l in alg.chains(q, start=b.tgt)]
        for left in lefts:
            for right in rights:
                out.append((left, b.name, right))
    return out


def _key_slot(alg: AInftyAlgebra, space: RSpace, key: Key) -> tuple[int, int]:
    left, b, right = key
    g = space.gen(b)
    src = alg.space.gen(right[-1]).src if right else g.src
    tgt = alg.space.gen(left[0]).tgt if left else g.tgt
    return src, tgt


class AInftyBimodule:
    """Bimodule over a directed ``Abar`` with operations ``mu^{q|1|p}``."""

    def __init__(self, algebra: AInftyAlgebra, space: RSpace,
                 ops: Mapping[tuple, object] | None = None):
        if not algebra.directed:
            raise InputError("bimodules are supported over directed algebras only")
        if space.m != algebra.m:
            raise InputError(f"bimodule has m={space.m}, algebra has m={algebra.m}")
        self.algebra = algebra
        self.space = space
        self.ops: dict[tuple, dict] = {}
        for (q, p), table in (ops or {}).items():
            if q < 0 or p < 0:
                raise InputError(f"negative arity ({q}, {p})")
            if isinstance(table, MultiMap):
                table = table.entries
            dom = [algebra.space] * q + [space] + [algebra.space] * p
            mm = MultiMap(dom, space, table)
            if mm.entries:
                self.ops[(q, p)] = mm.entries

    @property
    def m(self) -> int:
        return self.space.m

    def act(self, left: tuple, b: str, right: tuple) -> frozenset:
        table = self.ops.get((len(left), len(right)))
        if table is None:
            return EMPTY
        return table.get(left + (b,) + right, EMPTY)

    def differential(self, b: str) -> frozenset:
        return self.act((), b, ())

    def tuples(self) -> list[Key]:
        cache = self.__dict__.get("_tuples")
        if cache is None:
            cache = self.__dict__["_tuples"] = _tuples_over(self.algebra, self.space)
        return cache

    def homology(self) -> SlotHomology:
        return slot_homology(self.space, self.differential)

    def homology_dims(self) -> dict:
        return {s: d for s, d in self.homology().dims().items()}

    def total_homology(self) -> int:
        return self.homology().total

    def __repr__(self) -> str:
        return f"AInftyBimodule(m={self.m}, dim={self.space.dim}, ops={sorted(self.ops)})"


def zero_bimodule(algebra: AInftyAlgebra, space: RSpace | None = None) -> AInftyBimodule:
    return AInftyBimodule(algebra, space or RSpace(algebra.m, ()), {})


def check_bimodule(P: AInftyBimodule) -> Violation | None:
    """None when the bimodule relation holds on every composable tuple."""
    A = P.algebra
    for left, b, right in P.tuples():
        q, p = len(left), len(right)
        acc = frozenset()
        for s in range(q + 1):
            for r in range(p + 1):
                for g in P.act(left[q - s:], b, right[:r]):
                    acc = acc ^ P.act(left[:q - s], g, right[r:])
        for i in range(q):
            for k in range(1, q - i + 1):
                for g in A.op(left[i:i + k]):
                    acc = acc ^ P.act(left[:i] + (g,) + left[i + k:], b, right)
        for i in range(p):
            for k in range(1, p - i + 1):
                for g in A.op(right[i:i + k]):
                    acc = acc ^ P.act(left, b, right[:i] + (g,) + right[i + k:])
        if acc:
            return Violation((q, p), left + (b,) + right, acc)
    return None


# ---------------------------------------------------------------------------
# diagonal, dual, sums
# ---------------------------------------------------------------------------


def diagonal(A: UnitalAInftyAlgebra) -> AInftyBimodule:
    """``A = R + Abar`` as a bimodule over ``Abar``: ``mu^{q|1|p} = mu^{q+1+p}_A``."""
    alg = A.base
    shell = AInftyBimodule(alg, A.space, {})
    ops: dict = {}
    for left, b, right in shell.tuples():
        out = A.op(left + (b,) + right)
        if out:
            ops.setdefault((len(left), len(right)), {})[left + (b,) + right] = out
    return AInftyBimodule(alg, A.space, ops)


def dual_name(name: str) -> str:
    return name[:-1] if name.endswith("*") else name + "*"


def dual(P: AInftyBimodule) -> AInftyBimodule:
    """Linear dual with the rotated structure.

    ``<mu(c_q..c_1, y*, a_p..a_1), x> = <y*, mu_P(a_p..a_1, x, c_q..c_1)>``;
    the slot ``e_j P* e_i`` is dual to ``e_i P e_j``.  Names toggle a trailing
    ``*`` so ``dual(dual(P))`` reproduces ``P`` exactly.
    """
    gens = tuple(Generator(dual_name(g.name), g.tgt, g.src, -g.deg) for g in P.space.gens)
    space = RSpace(P.m, gens)
    ops: dict = {}
    for (q, p), table in P.ops.items():
        for key, outs in table.items():
            left, x, right = key[:q], key[q], key[q + 1:]
            for y in outs:
                dkey = right + (dual_name(y),) + left
                bucket = ops.setdefault((p, q), {})
                bucket[dkey] = bucket.get(dkey, EMPTY) ^ {dual_name(x)}
    return AInftyBimodule(P.algebra, space, ops)


def dual_diagonal(A: UnitalAInftyAlgebra) -> AInftyBimodule:
    return dual(diagonal(A))


def direct_sum(P: AInftyBimodule, Q: AInftyBimodule) -> AInftyBimodule:
    if not _same_algebra(P.algebra, Q.algebra):
        raise InputError("direct sum of bimodules over different algebras")
    clash = set(P.space.names) & set(Q.space.names)
    if clash:
        raise InputError(f"generator names shared by both summands: {sorted(clash)}")
    space = RSpace(P.m, P.space.gens + Q.space.gens)
    ops: dict = {}
    for M in (P, Q):
        for k, table in M.ops.items():
            ops.setdefault(k, {}).update(table)
    return AInftyBimodule(P.algebra, space, ops)


def rename(P: AInftyBimodule, fn: Callable[[str], str]) -> AInftyBimodule:
    space = RSpace(P.m, tuple(Generator(fn(g.name), g.src, g.tgt, g.deg) for g in P.space.gens))
    ops = {}
    for (q, p), table in P.ops.items():
        ops[(q, p)] = {k[:q] + (fn(k[q]),) + k[q + 1:]: frozenset(fn(h) for h in v)
                       for k, v in table.items()}
    return AInftyBimodule(P.algebra, space, ops)


# ---------------------------------------------------------------------------
# homomorphisms and the hom complex
# ---------------------------------------------------------------------------


class BimoduleHom:
    """Pre-homomorphism ``P -> Q``: components ``phi^{q|1|p}``."""

    def __init__(self, source: AInftyBimodule, target: AInftyBimodule,
                 components: Mapping[tuple, object] | None = None):
        if not _same_algebra(source.algebra, target.algebra):
            raise InputError("source and target live over different algebras")
        self.source = source
        self.target = target
        alg = source.algebra
        self.components: dict[tuple, dict] = {}
        for (q, p), table in (components or {}).items():
            if isinstance(table, MultiMap):
                table = table.entries
            dom = [alg.space] * q + [source.space] + [alg.space] * p
            mm = MultiMap(dom, target.space, table)
            if mm.entries:
                self.components[(q, p)] = mm.entries

    def at(self, left: tuple, b: str, right: tuple) -> frozenset:
        table = self.components.get((len(left), len(right)))
        if table is None:
            return EMPTY
        return table.get(left + (b,) + right, EMPTY)

    def linear(self, b: str) -> frozenset:
        return self.at((), b, ())

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other) -> bool:
        return isinstance(other, BimoduleHom) and self.components == other.components

    def __add__(self, other: "BimoduleHom") -> "BimoduleHom":
        comps: dict = {}
        for M in (self, other):
            for k, table in M.components.items():
                bucket = comps.setdefault(k, {})
                for key, v in table.items():
                    bucket[key] = bucket.get(key, EMPTY) ^ v
        return BimoduleHom(self.source, self.target, comps)

    def __repr__(self) -> str:
        n = sum(len(t) for t in self.components.values())
        return f"BimoduleHom(components={sorted(self.components)}, entries={n})"


def strict_hom(source: AInftyBimodule, target: AInftyBimodule,
               linear: Mapping[str, Iterable[str]]) -> BimoduleHom:
    """Homomorphism with only a linear term, ``b -> linear[b]``."""
    table = {(b,): frozenset(v) for b, v in linear.items() if frozenset(v)}
    return BimoduleHom(source, target, {(0, 0): table} if table else {})


def identity(P: AInftyBimodule) -> BimoduleHom:
    return strict_hom(P, P, {n: (n,) for n in P.space.names})


def zero_hom(P: AInftyBimodule, Q: AInftyBimodule) -> BimoduleHom:
    return BimoduleHom(P, Q, {})


def delta_value(P: AInftyBimodule, Q: AInftyBimodule, phi: Callable[[tuple, str, tuple], dict],
                key: Key) -> dict:
    """``(delta phi)(key)`` for a (possibly symbolic) pre-homomorphism.

    ``phi(left, b, right)`` returns ``{h: form}``; concrete maps use form 1.
    """
    A = P.algebra
    left, b, right = key
    q, p = len(left), len(right)
    acc: dict = {}
    for s in range(q + 1):
        for r in range(p + 1):
            il, ol = left[q - s:], left[:q - s]
            ir, orr = right[:r], right[r:]
            for h, f in phi(il, b, ir).items():
                _push(acc, Q.act(ol, h, orr), f)
            for g in P.act(il, b, ir):
                for h, f in phi(ol, g, orr).items():
                    _push(acc, (h,), f)
    for i in range(q):
        for k in range(1, q - i + 1):
            for g in A.op(left[i:i + k]):
                for h, f in phi(left[:i] + (g,) + left[i + k:], b, right).items():
                    _push(acc, (h,), f)
    for i in range(p):
        for k in range(1, p - i + 1):
            for g in A.op(right[i:i + k]):
                for h, f in phi(left, b, right[:i] + (g,) + right[i + k:]).items():
                    _push(acc, (h,), f)
    return acc


def differential(phi: BimoduleHom) -> BimoduleHom:
    """``delta phi`` in the hom complex."""
    P, Q = phi.source, phi.target

    def val(l, b, r):
        return _lift(phi.at(l, b, r))

    comps: dict = {}
    for key in P.tuples():
        out = _lower(delta_value(P, Q, val, key))
        if out:
            left, b, right = key
            comps.setdefault((len(left), len(right)), {})[left + (b,) + right] = out
    return BimoduleHom(P, Q, comps)


def is_closed(phi: BimoduleHom) -> bool:
    return differential(phi).is_zero()


def compose(psi: BimoduleHom, phi: BimoduleHom) -> BimoduleHom:
    """``(psi o phi)^{q|1|p} = sum psi(..., phi(..., b, ...), ...)``."""
    if phi.target.space != psi.source.space:
        raise InputError("composition: target of phi is not the source of psi")
    P = phi.source
    comps: dict = {}
    for left, b, right in P.tuples():
        q, p = len(left), len(right)
        acc = frozenset()
        for s in range(q + 1):
            for r in range(p + 1):
                for g in phi.at(left[q - s:], b, right[:r]):
                    acc = acc ^ psi.at(left[:q - s], g, right[r:])
        if acc:
            comps.setdefault((q, p), {})[left + (b,) + right] = acc
    return BimoduleHom(P, psi.target, comps)


class HomComplex:
    """``hom(P, Q)`` with coordinates ``(left, b, right, h)`` and differential."""

    def __init__(self, P: AInftyBimodule, Q: AInftyBimodule):
        if not _same_algebra(P.algebra, Q.algebra):
            raise InputError("hom complex between bimodules over different algebras")
        self.P, self.Q = P, Q
        self.coords: list[tuple] = []
        self.index: dict[tuple, int] = {}
        self._slots: dict[Key, list[tuple[str, int]]] = {}
        for key in P.tuples():
            slot = _key_slot(P.algebra, P.space, key)
            entries = []
            for h in Q.space.in_slot(*slot):
                idx = len(self.coords)
                self.coords.append(key + (h,))
                self.index[key + (h,)] = idx
                entries.append((h, 1 << idx))
            self._slots[key] = entries
        self._D: F2Matrix | None = None

    @property
    def dim(self) -> int:
        return len(self.coords)

    def sym(self, left: tuple, b: str, right: tuple) -> dict:
        return dict(self._slots.get((left, b, right), ()))

    def matrix(self) -> F2Matrix:
        if self._D is None:
            rows = [0] * self.dim
            for key, entries in self._slots.items():
                if not entries:
                    continue
                val = delta_value(self.P, self.Q, self.sym, key)
                for h, bit in entries:
                    rows[bit.bit_length() - 1] = val.get(h, 0)
            self._D = F2Matrix(self.dim, self.dim, tuple(rows))
        return self._D

    def vector(self, phi: BimoduleHom) -> int:
        v = 0
        for (q, p), table in phi.components.items():
            for key, outs in table.items():
                base = (key[:q], key[q], key[q + 1:])
                for h in outs:
                    v ^= 1 << self.index[base + (h,)]
        return v

    def hom(self, vec: int) -> BimoduleHom:
        comps: dict = {}
        for i in bits_of(vec):
            left, b, right, h = self.coords[i]
            bucket = comps.setdefault((len(left), len(right)), {})
            k = left + (b,) + right
            bucket[k] = bucket.get(k, EMPTY) ^ {h}
        return BimoduleHom(self.P, self.Q, comps)

    def homology_dim(self) -> int:
        return homology_dim(self.matrix())


def composition_matrix(psi: BimoduleHom | None, phi: BimoduleHom | None,
                       unknown: HomComplex, out: HomComplex) -> F2Matrix:
    """Matrix of ``x -> psi o x`` (``phi`` None) or ``x -> x o phi`` (``psi`` None)."""
    rows = [0] * out.dim
    for key, entries in out._slots.items():
        if not entries:
            continue
        left, b, right = key
        q, p = len(left), len(right)
        acc: dict = {}
        for s in range(q + 1):
            for r in range(p + 1):
                il, ol = left[q - s:], left[:q - s]
                ir, orr = right[:r], right[r:]
                if psi is not None:
                    for h, f in unknown.sym(il, b, ir).items():
                        _push(acc, psi.at(ol, h, orr), f)
                else:
                    for g in phi.at(il, b, ir):
                        for h, f in unknown.sym(ol, g, orr).items():
                            _push(acc, (h,), f)
        for h, bit in entries:
            rows[bit.bit_length() - 1] = acc.get(h, 0)
    return F2Matrix(out.dim, unknown.dim, tuple(rows))


def hom_complex(P: AInftyBimodule, Q: AInftyBimodule) -> HomComplex:
    return HomComplex(P, Q)


def decide_homotopic(phi: BimoduleHom, psi: BimoduleHom) -> BimoduleHom | None:
    """A pre-homomorphism ``h`` with ``delta h = phi + psi``, or None."""
    H = HomComplex(phi.source, phi.target)
    target = H.vector(phi) ^ H.vector(psi)
    if not target:
        return zero_hom(phi.source, phi.target)
    x = solve(H.matrix(), target)
    return None if x is None else H.hom(x)


# ---------------------------------------------------------------------------
# cones, quasi-isomorphisms
# ---------------------------------------------------------------------------


@dataclass
class Cone:
    bimodule: AInftyBimodule
    inclusion: BimoduleHom   # target -> cone
    projection: BimoduleHom  # cone -> source


def cone(phi: BimoduleHom, tags: tuple[str, str] = ("dom:", "cod:")) -> Cone:
    """Mapping cone of a closed ``phi: P -> Q`` on ``P + Q``."""
    if not is_closed(phi):
        raise InputError("cone of a map that is not closed")
    P, Q = phi.source, phi.target
    tp, tq = tags
    gens = tuple(Generator(tp + g.name, g.src, g.tgt, g.deg) for g in P.space.gens) + tuple(
        Generator(tq + g.name, g.src, g.tgt, g.deg) for g in Q.space.gens)
    space = RSpace(P.m, gens)
    ops: dict = {}

    def put(q, p, key, outs):
        if outs:
            bucket = ops.setdefault((q, p), {})
            bucket[key] = bucket.get(key, EMPTY) ^ frozenset(outs)

    for (q, p), table in P.ops.items():
        for key, outs in table.items():
            put(q, p, key[:q] + (tp + key[q],) + key[q + 1:], (tp + h for h in outs))
    for (q, p), table in phi.components.items():
        for key, outs in table.items():
            put(q, p, key[:q] + (tp + key[q],) + key[q + 1:], (tq + h for h in outs))
    for (q, p), table in Q.ops.items():
        for key, outs in table.items():
            put(q, p, key[:q] + (tq + key[q],) + key[q + 1:], (tq + h for h in outs))
    C = AInftyBimodule(P.algebra, space, ops)
    inc = strict_hom(Q, C, {n: (tq + n,) for n in Q.space.names})
    proj = strict_hom(C, P, {tp + n: (n,) for n in P.space.names})
    return Cone(C, inc, proj)


def _slot_bits(names: list, vec: Iterable[str]) -> int:
    v = 0
    for n in vec:
        v ^= 1 << names.index(n)
    return v


def quasi_iso(phi: BimoduleHom) -> bool:
    """Whether ``H(phi^{0|1|0})`` is an isomorphism in every slot."""
    if not is_closed(phi):
        raise InputError("quasi_iso needs a closed homomorphism")
    for slot in phi.source.space.slots():
        hp, hq, rk = _slot_only(phi, slot)
        if not (hp == hq == rk):
            return False
    return True


def _slot_only(phi: BimoduleHom, slot) -> tuple[int, int, int]:
    P, Q = phi.source, phi.target
    pn = P.space.in_slot(*slot)
    qn = Q.space.in_slot(*slot)
    hp = homology_dim(F2Matrix.from_columns([_slot_bits(pn, P.differential(n)) for n in pn],
                                            len(pn))) if pn else 0
    hq = homology_dim(F2Matrix.from_columns([_slot_bits(qn, Q.differential(n)) for n in qn],
                                            len(qn))) if qn else 0
    if not pn or not qn:
        return hp, hq, 0
    Dp = F2Matrix.from_columns([_slot_bits(pn, P.differential(n)) for n in pn], len(pn))
    Dq = F2Matrix.from_columns([_slot_bits(qn, Q.differential(n)) for n in qn], len(qn))
    F = F2Matrix.from_columns([_slot_bits(qn, phi.linear(n)) for n in pn], len(qn))
    return hp, hq, map_on_homology_rank(Dp, Dq, F)


@dataclass
class QuasiInverse:
    inverse: BimoduleHom
    homotopy_source: BimoduleHom  # delta h = inverse o phi + id_P
    homotopy_target: BimoduleHom  # delta h = phi o inverse + id_Q


def quasi_inverse(phi: BimoduleHom) -> QuasiInverse:
    """Closed ``psi: Q -> P`` with both composites homotopic to identities.

    The inverse and both homotopies are found together as one F2 linear
    system; a quasi-isomorphism always admits a solution.
    """
    if not quasi_iso(phi):
        raise InputError("quasi_inverse of a map that is not a quasi-isomorphism")
    P, Q = phi.source, phi.target
    HQP, HPP, HQQ = HomComplex(Q, P), HomComplex(P, P), HomComplex(Q, Q)
    n1, n2, n3 = HQP.dim, HPP.dim, HQQ.dim
    right_comp = composition_matrix(None, phi, HQP, HPP)  # psi -> psi o phi
    left_comp = composition_matrix(phi, None, HQP, HQQ)   # psi -> phi o psi
    rows = list(HQP.matrix().bits)
    rows += [a | (b << n1) for a, b in zip(right_comp.bits, HPP.matrix().bits)]
    rows += [a | (b << (n1 + n2)) for a, b in zip(left_comp.bits, HQQ.matrix().bits)]
    M = F2Matrix(len(rows), n1 + n2 + n3, tuple(rows))
    rhs = (HPP.vector(identity(P)) << n1) | (HQQ.vector(identity(Q)) << (n1 + n2))
    x = solve(M, rhs)
    if x is None:
        raise RuntimeError("no quasi-inverse found although phi is a quasi-isomorphism")
    mask1, mask2 = (1 << n1) - 1, (1 << n2) - 1
    return QuasiInverse(HQP.hom(x & mask1), HPP.hom((x >> n1) & mask2), HQQ.hom(x >> (n1 + n2)))


# ---------------------------------------------------------------------------
# B^+, B^-, connecting map
# ---------------------------------------------------------------------------


@dataclass
class ShortExactSequence:
    """``0 -> B^+ -> B -> B^- -> 0`` for a choice of unit cocycles."""

    B: AInftyBimodule
    plus: AInftyBimodule
    minus: AInftyBimodule
    inclusion: BimoduleHom
    projection: BimoduleHom
    units: dict       # idempotent -> frozenset (vector in B)
    unit_names: dict  # idempotent -> generator name in B^+


def _unit_vectors(B: AInftyBimodule, units: Mapping[int, Iterable[str]]) -> dict:
    out = {}
    for i in range(1, B.m + 1):
        if i not in units:
            raise InputError(f"no unit cocycle given for idempotent {i}")
        u = frozenset()
        for n in units[i]:
            u = u ^ {n}
        if not u:
            raise InputError(f"unit cocycle u_{i} is zero")
        for n in u:
            if B.space.slot(n) != (i, i):
                raise InputError(f"u_{i} has component {n!r} outside e_{i} B e_{i}")
        d = frozenset()
        for n in u:
            d = d ^ B.differential(n)
        if d:
            raise InputError(f"u_{i} is not a cocycle: mu^(0|1|0)(u_{i}) = {sorted(d)}")
        out[i] = u
    return out


def b_plus_minus(B: AInftyBimodule, units: Mapping[int, Iterable[str]]) -> ShortExactSequence:
    """The sub-bimodule ``B^+ = sum K u_i + sum_{i<j} e_j B e_i`` and ``B^- = B/B^+``."""
    uvec = _unit_vectors(B, units)
    hom = B.homology()
    for i, u in uvec.items():
        if not hom.project(u):
            raise InputError(f"u_{i} is exact, so it cannot represent the unit class")
    uname = {i: (next(iter(u)) if len(u) == 1 else rep_name(u)) for i, u in uvec.items()}
    by_name = {uname[i]: uvec[i] for i in uvec}
    plus_gens = []
    for g in B.space.gens:
        if g.src < g.tgt:
            plus_gens.append(g)
    for i in sorted(uvec):
        if uname[i] in B.space and uname[i] not in uvec[i]:
            raise InputError(f"unit name {uname[i]!r} collides with a generator of B")
        plus_gens.append(Generator(uname[i], i, i))
    plus_space = RSpace(B.m, tuple(sorted(plus_gens, key=lambda g: _order_key(B, g.name))))

    def lift_plus(n: str) -> frozenset:
        return by_name.get(n, frozenset((n,)))

    def to_plus(vec: frozenset, where) -> frozenset:
        out = frozenset()
        rest = set(vec)
        for i, u in uvec.items():
            diag = frozenset(n for n in rest if B.space.slot(n) == (i, i))
            if not diag:
                continue
            if diag != u:
                raise InputError(f"{where}: diagonal component {sorted(diag)} is not u_{i}")
            out = out ^ {uname[i]}
            rest -= diag
        for n in rest:
            s, t = B.space.slot(n)
            if not s < t:
                raise InputError(f"{where}: component {n!r} does not lie in B^+")
            out = out ^ {n}
        return out

    plus_ops: dict = {}
    shell = AInftyBimodule(B.algebra, plus_space, {})
    for left, b, right in shell.tuples():
        acc = frozenset()
        for n in lift_plus(b):
            acc = acc ^ B.act(left, n, right)
        out = to_plus(acc, f"mu on {(left, b, right)}")
        if out:
            plus_ops.setdefault((len(left), len(right)), {})[left + (b,) + right] = out
    plus = AInftyBimodule(B.algebra, plus_space, plus_ops)

    pivots = {i: min(u, key=B.space.index) for i, u in uvec.items()}
    minus_gens = [g for g in B.space.gens
                  if g.src > g.tgt or (g.src == g.tgt and g.name != pivots[g.src])]
    minus_space = RSpace(B.m, tuple(minus_gens))

    def project(vec: Iterable[str]) -> frozenset:
        out = frozenset()
        for n in vec:
            s, t = B.space.slot(n)
            if s < t:
                continue
            if s == t and n == pivots[s]:
                out = out ^ (uvec[s] - {n})
            else:
                out = out ^ {n}
        return out

    minus_ops: dict = {}
    shell = AInftyBimodule(B.algebra, minus_space, {})
    for left, b, right in shell.tuples():
        out = project(B.act(left, b, right))
        if out:
            minus_ops.setdefault((len(left), len(right)), {})[left + (b,) + right] = out
    minus = AInftyBimodule(B.algebra, minus_space, minus_ops)
    inc = strict_hom(plus, B, {n: lift_plus(n) for n in plus_space.names})
    proj = strict_hom(B, minus, {n: project((n,)) for n in B.space.names})
    ses = ShortExactSequence(B, plus, minus, inc, proj, uvec, uname)
    ses._to_plus = to_plus
    ses._project = project
    return ses


def _order_key(B: AInftyBimodule, name: str):
    return (B.space.index(name) if name in B.space else -1, name)


def splitting(ses: ShortExactSequence, rng: random.Random | None = None) -> dict:
    """Linear section ``sigma: B^- -> B`` commuting with ``mu^{0|1|0}``.

    Returns ``{y: sigma(y)}``.  With ``rng``, a random member of the affine
    space of such sections is returned instead of the pivot-order one.
    """
    B, plus, minus = ses.B, ses.plus, ses.minus
    inc = ses.inclusion
    coords = []
    for y in minus.space.gens:
        for z in plus.space.in_slot(y.src, y.tgt):
            coords.append((y.name, z))
    col_of = {c: k for k, c in enumerate(coords)}
    row_of = {}
    for y in minus.space.names:
        for w in B.space.names:
            row_of[(y, w)] = len(row_of)
    rows = [0] * len(row_of)
    rhs = 0
    for y in minus.space.names:
        # mu_B(y + t y) + (s + t)(mu_- y) = 0
        for z in plus.space.in_slot(*minus.space.slot(y)):
            bit = 1 << col_of[(y, z)]
            img = frozenset()
            for n in inc.linear(z):
                img = img ^ B.differential(n)
            for w in img:
                rows[row_of[(y, w)]] ^= bit
        dy = minus.differential(y)
        for y2 in dy:
            for z in plus.space.in_slot(*minus.space.slot(y2)):
                bit = 1 << col_of[(y2, z)]
                for w in inc.linear(z):
                    rows[row_of[(y, w)]] ^= bit
        const = B.differential(y) ^ dy
        for w in const:
            rhs ^= 1 << row_of[(y, w)]
    M = F2Matrix(len(rows), len(coords), tuple(rows))
    x = solve(M, rhs)
    if x is None:
        raise InputError("the sequence does not split compatibly with the differential")
    if rng is not None:
        for k in kernel_basis(M):
            if rng.random() < 0.5:
                x ^= k
    sigma = {y: frozenset((y,)) for y in minus.space.names}
    for i in bits_of(x):
        y, z = coords[i]
        sigma[y] = sigma[y] ^ inc.linear(z)
    return sigma


def connecting_map(ses: ShortExactSequence, rng: random.Random | None = None,
                   sigma: dict | None = None) -> BimoduleHom:
    """Boundary homomorphism ``Delta: B^- -> B^+`` with ``Delta^{0|1|0} = 0``.

    ``Delta(..., y, ...) = pi_+ mu_B(..., sigma y, ...)`` where ``pi_+``
    projects along ``sigma(B^-)``.
    """
    B, plus, minus = ses.B, ses.plus, ses.minus
    if sigma is None:
        sigma = splitting(ses, rng)

    def pi_plus(vec: frozenset, where) -> frozenset:
        back = frozenset()
        for y in ses._project(vec):
            back = back ^ sigma[y]
        return ses._to_plus(vec ^ back, where)

    comps: dict = {}
    for left, y, right in minus.tuples():
        acc = frozenset()
        for n in sigma[y]:
            acc = acc ^ B.act(left, n, right)
        out = pi_plus(acc, f"Delta on {(left, y, right)}")
        if out:
            comps.setdefault((len(left), len(right)), {})[left + (y,) + right] = out
    Delta = BimoduleHom(minus, plus, comps)
    if Delta.components.get((0, 0)):
        raise RuntimeError("connecting map has a nonzero linear term")
    if not is_closed(Delta):
        raise RuntimeError("connecting map is not closed; the input bimodule is malformed")
    return Delta


# ---------------------------------------------------------------------------
# the B^c family
# ---------------------------------------------------------------------------


@dataclass
class FiltrationStage:
    c: float
    F: AInftyBimodule          # F^c as a sub-bimodule of B
    quotient: AInftyBimodule   # B / F^c
    to_quotient: BimoduleHom   # B^+ -> B -> B/F^c
    Bc: Cone                   # Cone(B^+ -> B/F^c)
    in_F: frozenset            # slots (src, tgt) inside F^c


def _check_ordinates(m: int, ordinates) -> list[float]:
    o = [float(x) for x in ordinates]
    if len(o) != m:
        raise InputError(f"need {m} ordinates, got {len(o)}")
    for a, b in zip(o, o[1:]):
        if not a > b:
            raise InputError("ordinates must be strictly decreasing")
    return o


def _sub_on_slots(B: AInftyBimodule, slots: frozenset, keep: bool) -> AInftyBimodule:
    """Restriction to (keep=True) or quotient by (keep=False) a union of slots."""
    gens = tuple(g for g in B.space.gens if ((g.src, g.tgt) in slots) == keep)
    space = RSpace(B.m, gens)
    ops: dict = {}
    for (q, p), table in B.ops.items():
        for key, outs in table.items():
            if key[q] not in space:
                continue
            out = frozenset(h for h in outs if h in space)
            if keep and out != outs:
                raise InputError("slot union is not closed under the bimodule operations")
            if out:
                ops.setdefault((q, p), {})[key] = out
    return AInftyBimodule(B.algebra, space, ops)


def filtration_family(ses: ShortExactSequence, ordinates, c: float) -> FiltrationStage:
    """``F^c = sum_{o_j - o_i < c} e_j B e_i`` and ``B^c = Cone(B^+ -> B/F^c)``."""
    B = ses.B
    o = _check_ordinates(B.m, ordinates)
    diffs = {o[j] - o[i] for i in range(B.m) for j in range(B.m)}
    if any(abs(c - d) < 1e-12 for d in diffs):
        raise InputError(f"c = {c} equals a difference of ordinates")
    slots = frozenset((i + 1, j + 1) for i in range(B.m) for j in range(B.m) if o[j] - o[i] < c)
    F = _sub_on_slots(B, slots, keep=True)
    Q = _sub_on_slots(B, slots, keep=False)
    lin = {}
    for z in ses.plus.space.names:
        lin[z] = frozenset(n for n in ses.inclusion.linear(z) if n in Q.space)
    to_q = strict_hom(ses.plus, Q, lin)
    return FiltrationStage(c, F, Q, to_q, cone(to_q), slots)


def bc_projection(lower: FiltrationStage, upper: FiltrationStage) -> BimoduleHom:
    """Natural map ``B^{c-} -> B^{c+}`` for ``c- <= c+``."""
    if lower.c > upper.c:
        raise InputError("projection runs from the smaller c to the larger")
    src, tgt = lower.Bc.bimodule, upper.Bc.bimodule
    lin = {}
    for n in src.space.names:
        lin[n] = frozenset((n,)) if n in tgt.space else frozenset()
    phi = strict_hom(src, tgt, lin)
    if not is_closed(phi):
        raise RuntimeError("filtration projection is not a homomorphism")
    return phi


# ---------------------------------------------------------------------------
# bar tensor products
# ---------------------------------------------------------------------------


SEP = "|"


def _tensor_name(x: str, chain: tuple, y: str) -> str:
    return SEP.join((x,) + chain + (y,))


@dataclass
class TensorProduct:
    bimodule: AInftyBimodule
    parts: dict  # name -> (x, chain, y)


def tensor_over(P: AInftyBimodule, Q: AInftyBimodule) -> TensorProduct:
    """Bar complex ``P (x)_Abar Q = sum P (x) Abar^k (x) Q``."""
    if not _same_algebra(P.algebra, Q.algebra):
        raise InputError("tensor product of bimodules over different algebras")
    A = P.algebra
    if not A.directed:
        raise InputError("bar tensor products need a directed algebra")
    for n in P.space.names + Q.space.names + A.space.names:
        if SEP in n:
            raise InputError(f"generator name {n!r} contains the reserved '{SEP}'")
    top = A.max_chain_length()
    gens = []
    parts = {}
    for x in P.space.gens:
        for k in range(top + 1):
            for chain in A.chains(k, end=x.src):
                mid = A.space.gen(chain[-1]).src if chain else x.src
                for y in Q.space.gens:
                    if y.tgt != mid:
                        continue
                    name = _tensor_name(x.name, chain, y.name)
                    gens.append(Generator(name, y.src, x.tgt))
                    parts[name] = (x.name, chain, y.name)
    space = RSpace(P.m, tuple(gens))
    shell = AInftyBimodule(A, space, {})
    ops: dict = {}
    for left, t, right in shell.tuples():
        x, chain, y = parts[t]
        q, p = len(left), len(right)
        k = len(chain)
        acc = frozenset()
        if p == 0:
            for r in range(k + 1):
                for out in P.act(left, x, chain[:r]):
                    acc = acc ^ {_tensor_name(out, chain[r:], y)}
        if q == 0:
            for s in range(k + 1):
                for out in Q.act(chain[k - s:], y, right):
                    acc = acc ^ {_tensor_name(x, chain[:k - s], out)}
        if q == 0 and p == 0:
            for i in range(k):
                for j in range(1, k - i + 1):
                    for g in A.op(chain[i:i + j]):
                        acc = acc ^ {_tensor_name(x, chain[:i] + (g,) + chain[i + j:], y)}
        if acc:
            ops.setdefault((q, p), {})[left + (t,) + right] = acc
    return TensorProduct(AInftyBimodule(A, space, ops), parts)


def tensor_hom_left(f: BimoduleHom, Q: AInftyBimodule, src: TensorProduct,
                    tgt: TensorProduct) -> BimoduleHom:
    """``f (x) id_Q`` between bar tensor products."""
    comps: dict = {}
    for left, t, right in src.bimodule.tuples():
        if right:
            continue
        x, chain, y = src.parts[t]
        acc = frozenset()
        for r in range(len(chain) + 1):
            for out in f.at(left, x, chain[:r]):
                acc = acc ^ {_tensor_name(out, chain[r:], y)}
        if acc:
            comps.setdefault((len(left), 0), {})[left + (t,)] = acc
    return BimoduleHom(src.bimodule, tgt.bimodule, comps)


def tensor_hom_right(P: AInftyBimodule, g: BimoduleHom, src: TensorProduct,
                     tgt: TensorProduct) -> BimoduleHom:
    """``id_P (x) g`` between bar tensor products."""
    comps: dict = {}
    for left, t, right in src.bimodule.tuples():
        if left:
            continue
        x, chain, y = src.parts[t]
        k = len(chain)
        acc = frozenset()
        for s in range(k + 1):
            for out in g.at(chain[k - s:], y, right):
                acc = acc ^ {_tensor_name(x, chain[:k - s], out)}
        if acc:
            comps.setdefault((0, len(right)), {})[(t,) + right] = acc
    return BimoduleHom(src.bimodule, tgt.bimodule, comps)


def right_action(P: AInftyBimodule, U: UnitalAInftyAlgebra, PA: TensorProduct) -> BimoduleHom:
    """``P (x)_Abar A -> P``, ``x (x) a_k..a_1 (x) a' -> mu_P(x, a_k..a_1, a', ...)``."""
    comps: dict = {}
    for left, t, right in PA.bimodule.tuples():
        x, chain, a = PA.parts[t]
        if U.is_unit(a):
            out = frozenset((x,)) if not (left or chain or right) else EMPTY
        else:
            out = P.act(left, x, chain + (a,) + right)
        if out:
            comps.setdefault((len(left), len(right)), {})[left + (t,) + right] = out
    return BimoduleHom(PA.bimodule, P, comps)


def left_action(P: AInftyBimodule, U: UnitalAInftyAlgebra, AP: TensorProduct) -> BimoduleHom:
    """``A (x)_Abar P -> P``, ``a' (x) a_k..a_1 (x) x -> mu_P(..., a', a_k..a_1, x, ...)``."""
    comps: dict = {}
    for left, t, right in AP.bimodule.tuples():
        a, chain, x = AP.parts[t]
        if U.is_unit(a):
            out = frozenset((x,)) if not (left or chain or right) else EMPTY
        else:
            out = P.act(left + (a,) + chain, x, right)
        if out:
            comps.setdefault((len(left), len(right)), {})[left + (t,) + right] = out
    return BimoduleHom(AP.bimodule, P, comps)


def is_ambidextrous(Delta: BimoduleHom, U: UnitalAInftyAlgebra) -> BimoduleHom | None:
    """Homotopy between the two composites ``P (x) P -> P`` built from ``Delta: P -> A``.

    Returns the homotopy, or None when the square does not commute up to
    homotopy.
    """
    P, A = Delta.source, Delta.target
    PP = tensor_over(P, P)
    PA = tensor_over(P, A)
    AP = tensor_over(A, P)
    via_right = compose(right_action(P, U, PA), tensor_hom_right(P, Delta, PP, PA))
    via_left = compose(left_action(P, U, AP), tensor_hom_left(Delta, P, PP, AP))
    return decide_homotopic(via_right, via_left)


def homotopy_commutes(path_a: list[BimoduleHom], path_b: list[BimoduleHom]) -> BimoduleHom | None:
    """Compose each path (first map first) and decide whether they are homotopic."""
    def run(path):
        out = path[0]
        for f in path[1:]:
            out = compose(f, out)
        return out

    return decide_homotopic(run(path_a), run(path_b))
