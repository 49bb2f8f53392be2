"""Exact linear algebra over GF(2) and sparse multilinear maps of R-bimodules.

Vectors in ``F2^n`` are Python ints used as bitsets (bit ``j`` is coordinate
``j``).  Matrices store one bitset per row.  Pivoting is deterministic: the
first nonzero column, resolved by the lowest row index, so every basis this
module returns is reproducible.

An :class:`RSpace` is a finite R-bimodule for ``R = K^m``: each generator
carries a source and target idempotent, and a generator with ``src=i``,
``tgt=j`` spans part of ``e_j X e_i``.  A :class:`MultiMap` is an R-bimodule
map out of a tensor product over R, stored as a sparse table from generator
tuples to F2 sums of output generators.  Tuples are written leftmost-first,
``(g_d, ..., g_1)``, so ``g_1`` is the first factor and composability means
``src(g_{k+1}) == tgt(g_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

EMPTY: frozenset = frozenset()


class InputError(ValueError):
    """Malformed input: dimension mismatch, bad generator, broken invariant."""


# ---------------------------------------------------------------------------
# bitset helpers
# ---------------------------------------------------------------------------


def bits_of(vec: int) -> Iterator[int]:
    """Indices of the set bits of ``vec`` in increasing order."""
    while vec:
        low = vec & -vec
        yield low.bit_length() - 1
        vec ^= low


def popcount(vec: int) -> int:
    return vec.bit_count()


def vec_from_indices(indices: Iterable[int]) -> int:
    v = 0
    for i in indices:
        v ^= 1 << i
    return v


class Echelon:
    """Incrementally maintained reduced basis of a subspace of F2^n.

    ``add`` returns whether the vector was independent.  When ``track`` is set,
    every stored row remembers which added vectors it is a combination of, so
    :meth:`express` can write members of the span in terms of the inputs.
    """

    def __init__(self, track: bool = False):
        self.rows: dict[int, int] = {}  # pivot bit -> row
        self.combos: dict[int, int] = {}
        self.track = track
        self.count = 0
        self._order: list[int] = []

    def reduce(self, vec: int) -> tuple[int, int]:
        combo = 0
        for pivot in self._order:
            if (vec >> pivot) & 1:
                vec ^= self.rows[pivot]
                if self.track:
                    combo ^= self.combos[pivot]
        return vec, combo

    def add(self, vec: int) -> bool:
        idx = self.count
        self.count += 1
        residual, combo = self.reduce(vec)
        if not residual:
            return False
        pivot = residual.bit_length() - 1
        self.rows[pivot] = residual
        self._order = sorted(self.rows, reverse=True)
        if self.track:
            self.combos[pivot] = combo ^ (1 << idx)
        return True

    def contains(self, vec: int) -> bool:
        return self.reduce(vec)[0] == 0

    def express(self, vec: int) -> int | None:
        """Bitset of added-vector indices summing to ``vec``, or None."""
        residual, combo = self.reduce(vec)
        return None if residual else combo

    @property
    def rank(self) -> int:
        return len(self.rows)


def _rref(rows: Sequence[int], ncols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form, pivots scanned left to right.

    Column ``j`` is bit ``j``; "left" means low bit index.
    """
    work = [r for r in rows]
    pivots: list[int] = []
    r = 0
    n = len(work)
    for col in range(ncols):
        mask = 1 << col
        piv = None
        for i in range(r, n):
            if work[i] & mask:
                piv = i
                break
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        prow = work[r]
        for i in range(n):
            if i != r and work[i] & mask:
                work[i] ^= prow
        pivots.append(col)
        r += 1
        if r == n:
            break
    return work[:r], pivots


def _rank_rows(rows: Sequence[int]) -> int:
    ech = Echelon()
    for row in rows:
        ech.add(row)
    return ech.rank


# ---------------------------------------------------------------------------
# F2Matrix
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class F2Matrix:
    """Dense matrix over GF(2), one bitset per row."""

    rows: int
    cols: int
    bits: tuple[int, ...]

    def __post_init__(self):
        if len(self.bits) != self.rows:
            raise InputError(f"expected {self.rows} rows, got {len(self.bits)}")
        limit = 1 << self.cols
        for i, row in enumerate(self.bits):
            if row < 0 or row >= limit:
                raise InputError(f"row {i} has bits beyond column {self.cols}")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "F2Matrix":
        return cls(rows, cols, (0,) * rows)

    @classmethod
    def identity(cls, n: int) -> "F2Matrix":
        return cls(n, n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[int]]) -> "F2Matrix":
        dense = [list(r) for r in dense]
        ncols = len(dense[0]) if dense else 0
        rows = []
        for r in dense:
            if len(r) != ncols:
                raise InputError("ragged matrix")
            rows.append(vec_from_indices(j for j, x in enumerate(r) if x % 2))
        return cls(len(rows), ncols, tuple(rows))

    @classmethod
    def from_columns(cls, columns: Sequence[int], rows: int) -> "F2Matrix":
        out = [0] * rows
        for j, col in enumerate(columns):
            for i in bits_of(col):
                if i >= rows:
                    raise InputError(f"column {j} exceeds {rows} rows")
                out[i] |= 1 << j
        return cls(rows, len(columns), tuple(out))

    def to_dense(self) -> list[list[int]]:
        return [[(row >> j) & 1 for j in range(self.cols)] for row in self.bits]

    def columns(self) -> list[int]:
        cols = [0] * self.cols
        for i, row in enumerate(self.bits):
            for j in bits_of(row):
                cols[j] |= 1 << i
        return cols

    def transpose(self) -> "F2Matrix":
        return F2Matrix(self.cols, self.rows, tuple(self.columns()))

    def apply(self, vec: int) -> int:
        """Matrix-vector product; ``vec`` is a bitset over the columns."""
        out = 0
        for i, row in enumerate(self.bits):
            if popcount(row & vec) & 1:
                out |= 1 << i
        return out

    def __matmul__(self, other: "F2Matrix") -> "F2Matrix":
        if self.cols != other.rows:
            raise InputError(f"shape mismatch {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        out = []
        for row in self.bits:
            acc = 0
            for k in bits_of(row):
                acc ^= other.bits[k]
            out.append(acc)
        return F2Matrix(self.rows, other.cols, tuple(out))

    def __add__(self, other: "F2Matrix") -> "F2Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise InputError("shape mismatch in sum")
        return F2Matrix(self.rows, self.cols, tuple(a ^ b for a, b in zip(self.bits, other.bits)))

    def is_zero(self) -> bool:
        return not any(self.bits)

    def hstack(self, other: "F2Matrix") -> "F2Matrix":
        if self.rows != other.rows:
            raise InputError("row mismatch in hstack")
        return F2Matrix(self.rows, self.cols + other.cols,
                        tuple(a | (b << self.cols) for a, b in zip(self.bits, other.bits)))

    def vstack(self, other: "F2Matrix") -> "F2Matrix":
        if self.cols != other.cols:
            raise InputError("column mismatch in vstack")
        return F2Matrix(self.rows + other.rows, self.cols, self.bits + other.bits)


def rank(M: F2Matrix) -> int:
    """Row rank of ``M`` over GF(2)."""
    return _rank_rows(M.bits)


def kernel_basis(M: F2Matrix) -> list[int]:
    """Basis of ``{x : Mx = 0}`` as bitsets over the columns."""
    reduced, pivots = _rref(M.bits, M.cols)
    pivot_set = set(pivots)
    basis = []
    for free in range(M.cols):
        if free in pivot_set:
            continue
        x = 1 << free
        for row, p in zip(reduced, pivots):
            if (row >> free) & 1:
                x |= 1 << p
        basis.append(x)
    return basis


def image_basis(M: F2Matrix) -> list[int]:
    """Echelon basis of the column space, as bitsets over the rows."""
    reduced, _ = _rref(M.transpose().bits, M.rows)
    return reduced


def solve(M: F2Matrix, b: int) -> int | None:
    """Some ``x`` with ``Mx = b``, or None when ``b`` is not in the image."""
    if b < 0 or b >> M.rows:
        raise InputError("right-hand side longer than the row count")
    aug = M.cols
    rows = [row | (((b >> i) & 1) << aug) for i, row in enumerate(M.bits)]
    reduced, pivots = _rref(rows, M.cols + 1)
    if pivots and pivots[-1] == aug:
        return None
    x = 0
    for row, p in zip(reduced, pivots):
        if (row >> aug) & 1:
            x |= 1 << p
    return x


def quotient_basis(U: Iterable[int], V: Iterable[int]) -> list[int]:
    """Members of ``V`` completing a basis of span(U) to span(U + V).

    Scans ``V`` in order and keeps each vector independent of everything kept
    so far, so the result is a set of representatives of ``span(V)/span(U)``
    when ``U`` lies in the span of ``V``.
    """
    ech = Echelon()
    for u in U:
        ech.add(u)
    reps = []
    for v in V:
        if ech.add(v):
            reps.append(v)
    return reps


def homology_dim(D: F2Matrix) -> int:
    """``dim ker D - rank D`` for a square differential with ``D @ D == 0``."""
    if D.rows != D.cols:
        raise InputError("differential must be square")
    return D.cols - 2 * rank(D)


def map_on_homology_rank(D_src: F2Matrix, D_tgt: F2Matrix, F: F2Matrix) -> int:
    """Rank of the map induced on homology by a chain map ``F``.

    ``D_src``/``D_tgt`` are square differentials; ``F`` maps source to target.
    """
    cycles = kernel_basis(D_src)
    boundaries = image_basis(D_tgt)
    ech = Echelon()
    for b in boundaries:
        ech.add(b)
    base = ech.rank
    for z in cycles:
        ech.add(F.apply(z))
    return ech.rank - base


# ---------------------------------------------------------------------------
# R-bimodule spaces and multilinear maps
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Generator:
    name: str
    src: int
    tgt: int
    deg: int = 0


@dataclass(frozen=True)
class RSpace:
    """Finite R-bimodule with a labelled basis, ``R = K^m``."""

    m: int
    gens: tuple[Generator, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        if self.m < 1:
            raise InputError(f"need at least one idempotent, got m={self.m}")
        index = {}
        for i, g in enumerate(self.gens):
            if not isinstance(g.name, str) or not g.name:
                raise InputError(f"generator {i} has an empty name")
            if g.name in index:
                raise InputError(f"duplicate generator name {g.name!r}")
            for end in (g.src, g.tgt):
                if not 1 <= end <= self.m:
                    raise InputError(f"generator {g.name!r}: idempotent {end} outside 1..{self.m}")
            index[g.name] = i
        object.__setattr__(self, "_index", index)

    @classmethod
    def build(cls, m: int, gens: Iterable) -> "RSpace":
        """Accepts Generators or ``(name, src, tgt[, deg])`` tuples."""
        out = []
        for g in gens:
            out.append(g if isinstance(g, Generator) else Generator(*g))
        return cls(m, tuple(out))

    @property
    def dim(self) -> int:
        return len(self.gens)

    @property
    def names(self) -> list[str]:
        return [g.name for g in self.gens]

    def __contains__(self, name) -> bool:
        return name in self._index

    def gen(self, name: str) -> Generator:
        try:
            return self.gens[self._index[name]]
        except KeyError:
            raise InputError(f"unknown generator {name!r}") from None

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise InputError(f"unknown generator {name!r}") from None

    def slot(self, name: str) -> tuple[int, int]:
        g = self.gen(name)
        return g.src, g.tgt

    def in_slot(self, src: int, tgt: int) -> list[str]:
        return [g.name for g in self.gens if g.src == src and g.tgt == tgt]

    def slots(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(1, self.m + 1) for j in range(1, self.m + 1)]

    def to_bits(self, vec: Iterable[str]) -> int:
        return vec_from_indices(self.index(n) for n in vec)

    def from_bits(self, bits: int) -> frozenset:
        return frozenset(self.gens[i].name for i in bits_of(bits))


def chain_ends(spaces: Sequence[RSpace], names: Sequence[str]) -> tuple[int, int] | None:
    """(src of the first factor, tgt of the last) for a composable tuple, else None.

    ``names`` is written leftmost-first; ``spaces[k]`` is the space of ``names[k]``.
    """
    if not names:
        return None
    tgt = spaces[0].gen(names[0]).tgt
    src_prev = spaces[0].gen(names[0]).src
    for sp, n in zip(spaces[1:], names[1:]):
        g = sp.gen(n)
        if g.tgt != src_prev:
            return None
        src_prev = g.src
    return src_prev, tgt


class MultiMap:
    """R-bimodule map ``X_d (x) ... (x) X_1 -> Y`` stored sparsely.

    ``entries`` maps composable name tuples (leftmost = ``X_d`` factor) to
    iterables of output names, read as F2 sums.  Non-composable keys and
    outputs in the wrong slot are rejected.
    """

    def __init__(self, domain: Sequence[RSpace], codomain: RSpace,
                 entries: Mapping[tuple, Iterable[str]] | None = None):
        self.domain = tuple(domain)
        self.codomain = codomain
        table: dict[tuple, frozenset] = {}
        for key, out in (entries or {}).items():
            key = tuple(key)
            if len(key) != len(self.domain):
                raise InputError(f"entry {key}: arity {len(key)} but domain has {len(self.domain)} factors")
            ends = chain_ends(self.domain, key)
            if ends is None:
                raise InputError(f"entry {key}: tuple is not composable")
            vec = frozenset()
            for h in out:
                vec = vec ^ {h}
            for h in vec:
                if codomain.slot(h) != ends:
                    raise InputError(
                        f"entry {key}: output {h!r} in slot {codomain.slot(h)}, expected {ends}")
            if vec:
                table[key] = table.get(key, EMPTY) ^ vec
                if not table[key]:
                    del table[key]
        self.entries = table

    @property
    def arity(self) -> int:
        return len(self.domain)

    def apply(self, tup: Sequence[str]) -> frozenset:
        """Value on a generator tuple; zero when absent or non-composable."""
        tup = tuple(tup)
        if len(tup) != len(self.domain):
            raise InputError(f"arity mismatch: got {len(tup)} inputs, expected {len(self.domain)}")
        for sp, n in zip(self.domain, tup):
            if n not in sp:
                raise InputError(f"{n!r} is not a generator of the declared factor")
        return self.entries.get(tup, EMPTY)

    def apply_vectors(self, vectors: Sequence[Iterable[str]]) -> frozenset:
        """Multilinear extension to F2 vectors in each slot."""
        acc = frozenset()
        vectors = [frozenset(v) for v in vectors]

        def rec(prefix, k):
            nonlocal acc
            if k == len(vectors):
                acc = acc ^ self.apply(prefix)
                return
            for n in sorted(vectors[k]):
                rec(prefix + (n,), k + 1)

        rec((), 0)
        return acc

    def __eq__(self, other) -> bool:
        return isinstance(other, MultiMap) and self.entries == other.entries

    def __repr__(self) -> str:
        return f"MultiMap(arity={self.arity}, entries={len(self.entries)})"


def xor_all(vectors: Iterable[frozenset]) -> frozenset:
    acc = frozenset()
    for v in vectors:
        acc = acc ^ v
    return acc


def enumerate_chains(space: RSpace, length: int, start: int | None = None,
                     end: int | None = None, max_count: int | None = None) -> list[tuple]:
    """All composable tuples of ``length`` generators, written leftmost-first.

    ``start`` fixes the source of the first factor (the rightmost entry) and
    ``end`` the target of the last factor (the leftmost entry).
    """
    if length < 1:
        raise InputError("chains have positive length")
    by_src: dict[int, list[Generator]] = {}
    for g in space.gens:
        by_src.setdefault(g.src, []).append(g)
    firsts = space.gens if start is None else by_src.get(start, [])
    out: list[tuple] = []
    stack = [((g.name,), g.tgt) for g in reversed(firsts)]
    while stack:
        seq, tip = stack.pop()
        if len(seq) == length:
            if end is None or tip == end:
                out.append(tuple(reversed(seq)))
                if max_count is not None and len(out) > max_count:
                    raise InputError(f"more than {max_count} chains of length {length}")
            continue
        for g in reversed(by_src.get(tip, [])):
            stack.append((seq + (g.name,), g.tgt))
    out.sort(key=lambda t: [space.index(n) for n in t])
    return out


@dataclass
class SlotHomology:
    """Homology of a slot-preserving differential on an RSpace.

    ``reps[slot]`` lists cycle representatives (frozensets of generator names)
    of a homology basis; :meth:`project` writes a cycle in that basis.
    """

    space: RSpace
    reps: dict
    _solvers: dict = field(repr=False, default_factory=dict)

    def dims(self) -> dict:
        return {s: len(r) for s, r in self.reps.items()}

    @property
    def total(self) -> int:
        return sum(len(r) for r in self.reps.values())

    def project(self, cycle: Iterable[str]) -> dict:
        """Map a cycle to ``{slot: bitset over that slot's reps}``."""
        cycle = frozenset(cycle)
        out = {}
        for slot in self.reps:
            part = frozenset(n for n in cycle if self.space.slot(n) == slot)
            if not part:
                continue
            ech, names, n_bound = self._solvers[slot]
            vec = vec_from_indices(names.index(n) for n in part)
            combo = ech.express(vec)
            if combo is None:
                raise InputError(f"{sorted(part)} is not a cycle in slot {slot}")
            coeff = combo >> n_bound
            if coeff:
                out[slot] = coeff
        return out


def slot_homology(space: RSpace, differential) -> SlotHomology:
    """Slotwise homology of ``differential`` (name -> frozenset of names)."""
    reps: dict = {}
    solvers: dict = {}
    for slot in space.slots():
        names = space.in_slot(*slot)
        if not names:
            continue
        cols = []
        for n in names:
            out = differential(n)
            for h in out:
                if space.slot(h) != slot:
                    raise InputError(f"differential moves {n!r} out of slot {slot}")
            cols.append(vec_from_indices(names.index(h) for h in out))
        D = F2Matrix.from_columns(cols, len(names))
        if not (D @ D).is_zero():
            raise InputError(f"differential does not square to zero in slot {slot}")
        cycles = kernel_basis(D)
        bounds = image_basis(D)
        chosen = quotient_basis(bounds, cycles)
        ech = Echelon(track=True)
        for b in bounds:
            ech.add(b)
        n_bound = ech.count
        for z in chosen:
            ech.add(z)
        reps[slot] = [frozenset(names[i] for i in bits_of(z)) for z in chosen]
        solvers[slot] = (ech, names, n_bound)
    return SlotHomology(space, reps, solvers)
