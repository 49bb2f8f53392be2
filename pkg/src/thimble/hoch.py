"""Hochschild cochains of a directed ``Abar`` with bimodule coefficients.

``CC(Abar, P)`` has components ``Phibar^d: Abar^{(x)d} -> P``; the ``d = 0``
component is an element of ``sum_k e_k P e_k``.  The chain maps

    X: CC(Abar, P)    -> hom(A, P)
    Y: CC(Abar, P^v)  -> hom(P, A^v)

are assembled both on concrete cochains and as F2 matrices, so their
chain-map and quasi-isomorphism properties can be checked exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .ainfty import AInftyAlgebra, UnitalAInftyAlgebra, homology_algebra, project_to_names
from .bimod import (
    AInftyBimodule,
    BimoduleHom,
    HomComplex,
    ShortExactSequence,
    _push,
    _lift,
    _lower,
    _same_algebra,
    diagonal,
    dual,
    dual_name,
)
from .corelin import (
    EMPTY,
    F2Matrix,
    InputError,
    bits_of,
    homology_dim,
    map_on_homology_rank,
    solve,
)
from .extcalc import BarCochains, homology_module


class HochschildComplex:
    """``CC(Abar, P)`` with coordinates ``(chain, h)``."""

    def __init__(self, algebra: AInftyAlgebra, P: AInftyBimodule):
        if not _same_algebra(algebra, P.algebra):
            raise InputError("coefficients live over a different algebra")
        self.algebra = algebra
        self.P = P
        self.coords: list[tuple] = []
        self._slots: dict[tuple, list] = {}
        top = algebra.max_chain_length()
        if top > algebra.m - 1:
            raise AssertionError("more length levels than a directed algebra allows")
        diag = [h for k in range(1, P.m + 1) for h in P.space.in_slot(k, k)]
        self._add((), diag)
        for d in range(1, top + 1):
            for chain in algebra.chains(d):
                src = algebra.space.gen(chain[-1]).src
                tgt = algebra.space.gen(chain[0]).tgt
                self._add(chain, P.space.in_slot(src, tgt))
        self.index = {c: i for i, c in enumerate(self.coords)}
        self._D: F2Matrix | None = None

    def _add(self, chain, outs):
        entries = []
        for h in outs:
            entries.append((h, 1 << len(self.coords)))
            self.coords.append((chain, h))
        self._slots[chain] = entries

    @property
    def dim(self) -> int:
        return len(self.coords)

    def sym(self, chain: tuple) -> dict:
        return dict(self._slots.get(chain, ()))

    def matrix(self) -> F2Matrix:
        if self._D is None:
            rows = [0] * self.dim
            for chain, entries in self._slots.items():
                if not entries:
                    continue
                val = cc_delta_value(self.algebra, self.P, self.sym, chain)
                for h, bit in entries:
                    rows[bit.bit_length() - 1] = val.get(h, 0)
            self._D = F2Matrix(self.dim, self.dim, tuple(rows))
        return self._D

    def vector(self, Phi: "HochschildCochain") -> int:
        v = 0
        for chain, outs in Phi.components.items():
            for h in outs:
                v ^= 1 << self.index[(chain, h)]
        return v

    def cochain(self, vec: int) -> "HochschildCochain":
        comps: dict = {}
        for i in bits_of(vec):
            chain, h = self.coords[i]
            comps[chain] = comps.get(chain, EMPTY) ^ {h}
        return HochschildCochain(self.algebra, self.P, comps)

    def homology_dim(self) -> int:
        return homology_dim(self.matrix())


class HochschildCochain:
    """Components ``Phibar^d`` keyed by the input chain (``()`` for ``d = 0``)."""

    def __init__(self, algebra: AInftyAlgebra, P: AInftyBimodule,
                 components: Mapping[tuple, object] | None = None):
        self.algebra = algebra
        self.P = P
        comps: dict = {}
        for chain, outs in (components or {}).items():
            chain = tuple(chain)
            outs = frozenset(outs)
            if not outs:
                continue
            for n in chain:
                algebra.space.gen(n)
            if chain:
                for a, b in zip(chain, chain[1:]):
                    if algebra.space.gen(a).src != algebra.space.gen(b).tgt:
                        raise InputError(f"cochain input {chain} is not composable")
                slot = (algebra.space.gen(chain[-1]).src, algebra.space.gen(chain[0]).tgt)
                for h in outs:
                    if P.space.slot(h) != slot:
                        raise InputError(f"cochain value {h!r} on {chain} is not in slot {slot}")
            else:
                for h in outs:
                    s, t = P.space.slot(h)
                    if s != t:
                        raise InputError(f"degree-0 component {h!r} is not in a diagonal slot")
            comps[chain] = outs
        self.components = comps

    def value(self, chain: tuple) -> frozenset:
        return self.components.get(tuple(chain), EMPTY)

    def is_zero(self) -> bool:
        return not self.components

    def __eq__(self, other) -> bool:
        return isinstance(other, HochschildCochain) and self.components == other.components

    def __repr__(self) -> str:
        return f"HochschildCochain({sorted(self.components, key=len)})"


def cc_delta_value(A: AInftyAlgebra, P: AInftyBimodule, phibar: Callable[[tuple], dict],
                   chain: tuple) -> dict:
    """``(delta Phibar)(a_d..a_1)`` for a possibly symbolic cochain."""
    d = len(chain)
    acc: dict = {}
    for j in range(d + 1):
        for i in range(d - j + 1):
            lo, hi = d - i - j, d - i
            for h, f in phibar(chain[lo:hi]).items():
                _push(acc, P.act(chain[:lo], h, chain[hi:]), f)
    for j in range(1, d + 1):
        for i in range(d - j + 1):
            lo, hi = d - i - j, d - i
            for g in A.op(chain[lo:hi]):
                for h, f in phibar(chain[:lo] + (g,) + chain[hi:]).items():
                    _push(acc, (h,), f)
    return acc


def cc_differential(Phi: HochschildCochain) -> HochschildCochain:
    H = HochschildComplex(Phi.algebra, Phi.P)

    def val(chain):
        return _lift(Phi.value(chain))

    comps = {}
    for chain in H._slots:
        out = _lower(cc_delta_value(Phi.algebra, Phi.P, val, chain))
        if out:
            comps[chain] = out
    return HochschildCochain(Phi.algebra, Phi.P, comps)


# ---------------------------------------------------------------------------
# X
# ---------------------------------------------------------------------------


def x_value(U: UnitalAInftyAlgebra, P: AInftyBimodule, phibar: Callable[[tuple], dict],
            key: tuple) -> dict:
    """``Phi^{q|1|p}(c_q..c_1, a', a_p..a_1)`` with ``Phibar`` inserted right of ``a'``."""
    left, a1, right = key
    p = len(right)
    acc: dict = {}
    if U.is_unit(a1):
        k = U.space.gen(a1).src
        if left:
            return acc
        for h, f in phibar(right).items():
            if P.space.gen(h).tgt == k:
                _push(acc, (h,), f)
        return acc
    for i in range(p + 1):
        for j in range(p - i + 1):
            lo, hi = p - i - j, p - i
            new_left = left + (a1,) + right[:lo]
            for h, f in phibar(right[lo:hi]).items():
                _push(acc, P.act(new_left, h, right[hi:]), f)
    return acc


def X(Phi: HochschildCochain, U: UnitalAInftyAlgebra | None = None) -> BimoduleHom:
    """``X(Phibar)``: a homomorphism from the diagonal bimodule to ``P``."""
    U = U or UnitalAInftyAlgebra(Phi.algebra)
    src = diagonal(U)

    def val(chain):
        return _lift(Phi.value(chain))

    comps: dict = {}
    for key in src.tuples():
        out = _lower(x_value(U, Phi.P, val, key))
        if out:
            left, a, right = key
            comps.setdefault((len(left), len(right)), {})[left + (a,) + right] = out
    return BimoduleHom(src, Phi.P, comps)


@dataclass
class ChainMapMatrix:
    """A chain map between two finite complexes, as matrices."""

    source: F2Matrix
    target: F2Matrix
    map: F2Matrix

    def commutes(self) -> bool:
        return (self.target @ self.map) == (self.map @ self.source)

    def homology_dims(self) -> tuple[int, int]:
        return homology_dim(self.source), homology_dim(self.target)

    def is_quasi_iso(self) -> bool:
        hs, ht = self.homology_dims()
        return hs == ht and map_on_homology_rank(self.source, self.target, self.map) == hs

    def blocks(self, src_labels: list, tgt_labels: list) -> list[tuple[list, list]]:
        """Finest splitting into (source, target) coordinate blocks.

        Labels are joined when a differential or the map connects them; the
        result is the decomposition the chain map respects.
        """
        parent: dict = {}

        def find(x):
            while parent.setdefault(x, x) != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def join(a, b):
            parent[find(a)] = find(b)

        for D, labels, side in ((self.source, src_labels, "s"), (self.target, tgt_labels, "t")):
            for r, row in enumerate(D.bits):
                find((side, labels[r]))
                for c in bits_of(row):
                    join((side, labels[r]), (side, labels[c]))
        for r, row in enumerate(self.map.bits):
            for c in bits_of(row):
                join(("t", tgt_labels[r]), ("s", src_labels[c]))
        groups: dict = {}
        for i, lab in enumerate(src_labels):
            groups.setdefault(find(("s", lab)), ([], []))[0].append(i)
        for i, lab in enumerate(tgt_labels):
            groups.setdefault(find(("t", lab)), ([], []))[1].append(i)
        return [groups[k] for k in sorted(groups, key=str)]

    def blockwise_quasi_iso(self, src_labels: list, tgt_labels: list) -> bool:
        for s, t in self.blocks(src_labels, tgt_labels):
            sub = ChainMapMatrix(_restrict(self.source, s, s), _restrict(self.target, t, t),
                                 _restrict(self.map, t, s))
            if not sub.is_quasi_iso():
                return False
        return True


def _restrict(M: F2Matrix, rows: list, cols: list) -> F2Matrix:
    out = []
    for r in rows:
        v = 0
        for k, c in enumerate(cols):
            if (M.bits[r] >> c) & 1:
                v |= 1 << k
        out.append(v)
    return F2Matrix(len(rows), len(cols), tuple(out))


def cc_labels(CC: "HochschildComplex") -> list:
    """Slot of the output generator of each cochain coordinate."""
    return [CC.P.space.slot(h) for _, h in CC.coords]


def hom_labels(H: HomComplex) -> list:
    return [H.Q.space.slot(c[-1]) for c in H.coords]


def slotwise_quasi_iso(CC: "HochschildComplex", H: HomComplex, M: ChainMapMatrix) -> bool:
    """H(M) is an isomorphism on every block of the slot decomposition."""
    return M.blockwise_quasi_iso(cc_labels(CC), hom_labels(H))


def x_matrix(U: UnitalAInftyAlgebra, P: AInftyBimodule) -> tuple[HochschildComplex, HomComplex, ChainMapMatrix]:
    CC = HochschildComplex(U.base, P)
    Hom = HomComplex(diagonal(U), P)
    rows = [0] * Hom.dim
    for key, entries in Hom._slots.items():
        if not entries:
            continue
        val = x_value(U, P, CC.sym, key)
        for h, bit in entries:
            rows[bit.bit_length() - 1] = val.get(h, 0)
    M = F2Matrix(Hom.dim, CC.dim, tuple(rows))
    return CC, Hom, ChainMapMatrix(CC.matrix(), Hom.matrix(), M)


# ---------------------------------------------------------------------------
# Y
# ---------------------------------------------------------------------------


def _act_unital(U: UnitalAInftyAlgebra, P: AInftyBimodule, left: tuple, b: str,
                right: tuple) -> frozenset:
    """``mu_P`` extended by the strict-unit rules for unit inputs."""
    units = [n for n in left + right if U.is_unit(n)]
    if not units:
        return P.act(left, b, right)
    if len(left) + len(right) != 1:
        return EMPTY
    g = P.space.gen(b)
    e = U.space.gen(units[0])
    if left and e.src == g.tgt:
        return frozenset((b,))
    if right and e.tgt == g.src:
        return frozenset((b,))
    return EMPTY


def y_value(U: UnitalAInftyAlgebra, P: AInftyBimodule, psibar: Callable[[tuple], dict],
            key: tuple) -> dict:
    """``Psi^{q|1|p}(c_q..c_1, b, a_p..a_1)`` in ``A^v``, keyed by dual names.

    ``<Psi(c, b, a), a'> = sum <Psibar^j(c_{i+j}..c_{i+1}),
    mu_P(c_i..c_1, b, a_p..a_1, a', c_q..c_{i+j+1})>``.
    """
    left, b, right = key
    q = len(left)
    g = P.space.gen(b)
    key_src = U.space.gen(right[-1]).src if right else g.src
    key_tgt = U.space.gen(left[0]).tgt if left else g.tgt
    acc: dict = {}
    for a1 in U.space.gens:
        if a1.tgt != key_src or a1.src != key_tgt:
            continue
        total = 0
        for i in range(q + 1):
            for j in range(q - i + 1):
                lo, hi = q - i - j, q - i
                vals = psibar(left[lo:hi])
                if not vals:
                    continue
                w = _act_unital(U, P, left[hi:], b, right + (a1.name,) + left[:lo])
                for y in w:
                    total ^= vals.get(dual_name(y), 0)
        if total:
            acc[dual_name(a1.name)] = total
    return acc


def Y(Psi: HochschildCochain, P: AInftyBimodule, U: UnitalAInftyAlgebra | None = None) -> BimoduleHom:
    """``Y(Psibar)``: a homomorphism from ``P`` to the dual diagonal bimodule.

    ``Psi`` must have coefficients in ``dual(P)``.
    """
    if Psi.P.space != dual(P).space:
        raise InputError("Y needs a cochain with coefficients in the dual of P")
    U = U or UnitalAInftyAlgebra(P.algebra)
    tgt = dual(diagonal(U))

    def val(chain):
        return _lift(Psi.value(chain))

    comps: dict = {}
    for key in P.tuples():
        out = _lower(y_value(U, P, val, key))
        if out:
            left, b, right = key
            comps.setdefault((len(left), len(right)), {})[left + (b,) + right] = out
    return BimoduleHom(P, tgt, comps)


def y_matrix(U: UnitalAInftyAlgebra, P: AInftyBimodule) -> tuple[HochschildComplex, HomComplex, ChainMapMatrix]:
    CC = HochschildComplex(U.base, dual(P))
    Hom = HomComplex(P, dual(diagonal(U)))
    rows = [0] * Hom.dim
    for key, entries in Hom._slots.items():
        if not entries:
            continue
        val = y_value(U, P, CC.sym, key)
        for h, bit in entries:
            rows[bit.bit_length() - 1] = val.get(h, 0)
    M = F2Matrix(Hom.dim, CC.dim, tuple(rows))
    return CC, Hom, ChainMapMatrix(CC.matrix(), Hom.matrix(), M)


def cc_homology(algebra: AInftyAlgebra, P: AInftyBimodule) -> int:
    return HochschildComplex(algebra, P).homology_dim()


def hom_homology(P: AInftyBimodule, Q: AInftyBimodule) -> int:
    return HomComplex(P, Q).homology_dim()


# ---------------------------------------------------------------------------
# extension class
# ---------------------------------------------------------------------------


@dataclass
class ExtensionClass:
    """Degree-1 cocycle ``([Delta^{1|1|0}], [Delta^{0|1|1}])`` in the bar complex."""

    cochain: dict
    complex: BarCochains
    vector: int
    is_trivial: bool

    def same_class(self, other: "ExtensionClass") -> bool:
        if self.complex.coords[1] != other.complex.coords[1]:
            raise InputError("classes live in different cochain complexes")
        diff = self.vector ^ other.vector
        return diff == 0 or solve(self.complex.differential(0), diff) is not None


def extension_class(ses: ShortExactSequence, Delta: BimoduleHom) -> ExtensionClass:
    """Homology-level extension class of ``0 -> B^+ -> B -> B^- -> 0``."""
    if Delta.components.get((0, 0)):
        raise InputError("Delta has a nonzero linear term; build it with connecting_map")
    HA = homology_algebra(ses.B.algebra)
    M, hom_m, _ = homology_module(ses.minus, HA)
    N, hom_n, look_n = homology_module(ses.plus, HA)
    N = type(N)(M.algebra, N.space, N.left, N.right)
    cochain: dict = {}
    for c in HA.space.gens:
        for x in M.space.gens:
            if c.src == x.tgt:
                acc = frozenset()
                for a in HA.reps[c.name]:
                    for b in M.reps[x.name]:
                        acc = acc ^ Delta.at((a,), b, ())
                out = project_to_names(hom_n, look_n, acc)
                if out:
                    cochain[((c.name,), x.name, ())] = out
            if c.tgt == x.src:
                acc = frozenset()
                for a in HA.reps[c.name]:
                    for b in M.reps[x.name]:
                        acc = acc ^ Delta.at((), b, (a,))
                out = project_to_names(hom_n, look_n, acc)
                if out:
                    cochain[((), x.name, (c.name,))] = out
    C = BarCochains(M, N, 2)
    v = C.vector(1, cochain)
    if C.differential(1).apply(v):
        raise AssertionError("extension cochain is not a cocycle")
    trivial = v == 0 or solve(C.differential(0), v) is not None
    return ExtensionClass(cochain, C, v, trivial)


__all__ = [
    "ChainMapMatrix",
    "cc_labels",
    "hom_labels",
    "slotwise_quasi_iso",
    "ExtensionClass",
    "HochschildCochain",
    "HochschildComplex",
    "X",
    "Y",
    "cc_delta_value",
    "cc_differential",
    "cc_homology",
    "extension_class",
    "hom_homology",
    "x_matrix",
    "x_value",
    "y_matrix",
    "y_value",
]

