"""Seeded random instances for property tests.

Structures are grown by greedy toggling: a random candidate entry is flipped
and kept only if the relations still hold.  The result is always valid and is
usually far from trivial.
"""

from __future__ import annotations

import random

from .ainfty import AInftyAlgebra, check_relations
from .bimod import AInftyBimodule, BimoduleHom, HomComplex, check_bimodule
from .corelin import EMPTY, Generator, RSpace, kernel_basis


def random_directed_space(rng: random.Random, m: int, max_per_slot: int = 2,
                          prefix: str = "a", min_per_slot: int = 0) -> RSpace:
    gens = []
    for i in range(1, m + 1):
        for j in range(i + 1, m + 1):
            for k in range(rng.randint(min_per_slot, max_per_slot)):
                gens.append(Generator(f"{prefix}{i}{j}{'abcdefgh'[k]}", i, j))
    return RSpace(m, tuple(gens))


def random_space(rng: random.Random, m: int, max_per_slot: int = 1, max_dim: int = 6,
                 prefix: str = "p") -> RSpace:
    gens = []
    slots = [(i, j) for i in range(1, m + 1) for j in range(1, m + 1)]
    rng.shuffle(slots)
    for i, j in slots:
        for k in range(rng.randint(0, max_per_slot)):
            if len(gens) < max_dim:
                gens.append(Generator(f"{prefix}{i}{j}{'abcdefgh'[k]}", i, j))
    gens.sort(key=lambda g: g.name)
    return RSpace(m, tuple(gens))


def _flip(table: dict, key: tuple, h: str) -> None:
    v = table.get(key, EMPTY) ^ {h}
    if v:
        table[key] = v
    else:
        table.pop(key, None)


def random_algebra(rng: random.Random, m: int, max_per_slot: int = 2,
                   tries: int = 60, min_per_slot: int = 0) -> AInftyAlgebra:
    """Random directed A-infinity algebra with all relations satisfied."""
    space = random_directed_space(rng, m, max_per_slot, min_per_slot=min_per_slot)
    candidates = []
    for d in range(1, m):
        base = AInftyAlgebra(space, {})
        for tup in base.chains(d):
            src = space.gen(tup[-1]).src
            tgt = space.gen(tup[0]).tgt
            for h in space.in_slot(src, tgt):
                candidates.append((d, tup, h))
    rng.shuffle(candidates)
    mu: dict = {}
    for d, tup, h in candidates[:tries]:
        table = mu.setdefault(d, {})
        _flip(table, tup, h)
        if check_relations(AInftyAlgebra(space, mu)) is not None:
            _flip(table, tup, h)
    return AInftyAlgebra(space, mu)


def random_bimodule(rng: random.Random, A: AInftyAlgebra, max_dim: int = 5,
                    tries: int = 80, space: RSpace | None = None) -> AInftyBimodule:
    """Random bimodule over ``A`` satisfying the bimodule relations."""
    space = space or random_space(rng, A.m, 1, max_dim)
    shell = AInftyBimodule(A, space, {})
    candidates = []
    for left, b, right in shell.tuples():
        g = space.gen(b)
        src = A.space.gen(right[-1]).src if right else g.src
        tgt = A.space.gen(left[0]).tgt if left else g.tgt
        for h in space.in_slot(src, tgt):
            if not left and not right and h == b:
                continue
            candidates.append(((len(left), len(right)), left + (b,) + right, h))
    rng.shuffle(candidates)
    ops: dict = {}
    for k, key, h in candidates[:tries]:
        table = ops.setdefault(k, {})
        _flip(table, key, h)
        if check_bimodule(AInftyBimodule(A, space, ops)) is not None:
            _flip(table, key, h)
    return AInftyBimodule(A, space, ops)


def random_closed_hom(rng: random.Random, P: AInftyBimodule, Q: AInftyBimodule) -> BimoduleHom:
    """Random element of the kernel of the hom-complex differential."""
    H = HomComplex(P, Q)
    v = 0
    for k in kernel_basis(H.matrix()):
        if rng.random() < 0.5:
            v ^= k
    return H.hom(v)


def random_prehom(rng: random.Random, P: AInftyBimodule, Q: AInftyBimodule,
                  density: float = 0.3) -> BimoduleHom:
    H = HomComplex(P, Q)
    v = 0
    for i in range(H.dim):
        if rng.random() < density:
            v |= 1 << i
    return H.hom(v)
