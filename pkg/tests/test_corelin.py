import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from thimble.corelin import (
    F2Matrix,
    InputError,
    MultiMap,
    RSpace,
    enumerate_chains,
    homology_dim,
    image_basis,
    kernel_basis,
    map_on_homology_rank,
    rank,
    slot_homology,
    solve,
)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    bits = tuple(draw(st.integers(0, (1 << c) - 1)) for _ in range(r))
    return F2Matrix(r, c, bits)


def brute_kernel(M):
    return {x for x in range(1 << M.cols) if M.apply(x) == 0}


def brute_image(M):
    return {M.apply(x) for x in range(1 << M.cols)}


@given(matrices())
def test_rank_nullity_against_enumeration(M):
    assert len(brute_image(M)) == 2 ** rank(M)
    assert len(brute_kernel(M)) == 2 ** (M.cols - rank(M))


@given(matrices())
def test_kernel_basis_spans_kernel(M):
    basis = kernel_basis(M)
    span = {0}
    for b in basis:
        span |= {s ^ b for s in span}
    assert span == brute_kernel(M)
    assert len(span) == 2 ** len(basis)


@given(matrices())
def test_image_basis_spans_image(M):
    span = {0}
    for b in image_basis(M):
        span |= {s ^ b for s in span}
    assert span == brute_image(M)


@given(matrices(), st.integers(0, 63))
def test_solve_matches_enumeration(M, b):
    b &= (1 << M.rows) - 1
    x = solve(M, b)
    if b in brute_image(M):
        assert x is not None and M.apply(x) == b
    else:
        assert x is None


@given(matrices(4, 4), matrices(4, 4))
def test_matmul_is_composition(A, B):
    if A.cols != B.rows:
        return
    AB = A @ B
    for x in range(1 << B.cols):
        assert AB.apply(x) == A.apply(B.apply(x))


def test_transpose_dense_round_trip():
    M = F2Matrix.from_dense([[1, 0, 1], [0, 1, 1]])
    assert M.transpose().transpose() == M
    assert M.transpose().to_dense() == [[1, 0], [0, 1], [1, 1]]


def _complexes():
    # d: e0 -> e1, e2 -> e3 ; H has dim 0 on the first pair and 0 on the second
    D = F2Matrix.from_columns([0b10, 0, 0b1000, 0], 4)
    yield D, 0
    D = F2Matrix.from_columns([0b10, 0, 0, 0], 4)
    yield D, 2
    yield F2Matrix.zeros(3, 3), 3


@pytest.mark.parametrize("D,h", list(_complexes()))
def test_homology_dim(D, h):
    assert (D @ D).is_zero()
    assert homology_dim(D) == h


def test_map_on_homology_rank_identity_and_zero():
    D = F2Matrix.from_columns([0b10, 0, 0, 0], 4)
    assert map_on_homology_rank(D, D, F2Matrix.identity(4)) == 2
    assert map_on_homology_rank(D, D, F2Matrix.zeros(4, 4)) == 0
    # a map onto boundaries is zero on homology
    F = F2Matrix.from_columns([0, 0, 0b10, 0], 4)
    assert map_on_homology_rank(D, D, F) == 0


def test_duplicate_generator_rejected():
    with pytest.raises(InputError, match="duplicate"):
        RSpace.build(2, [("x", 1, 2), ("x", 1, 2)])


def test_generator_outside_idempotents_rejected():
    with pytest.raises(InputError):
        RSpace.build(2, [("x", 1, 3)])


def test_multimap_rejects_non_composable_and_wrong_slot():
    sp = RSpace.build(3, [("a", 1, 2), ("b", 2, 3), ("c", 1, 3)])
    MultiMap([sp, sp], sp, {("b", "a"): ["c"]})
    with pytest.raises(InputError, match="not composable"):
        MultiMap([sp, sp], sp, {("a", "b"): ["c"]})
    with pytest.raises(InputError, match="slot"):
        MultiMap([sp, sp], sp, {("b", "a"): ["a"]})


def test_multimap_sums_repeated_outputs_over_f2():
    sp = RSpace.build(2, [("a", 1, 2), ("b", 1, 2)])
    mm = MultiMap([sp], sp, {("a",): ["b", "b"]})
    assert mm.entries == {}


def test_enumerate_chains_leftmost_first():
    sp = RSpace.build(3, [("a", 1, 2), ("b", 2, 3), ("c", 1, 3)])
    assert enumerate_chains(sp, 2) == [("b", "a")]
    assert enumerate_chains(sp, 1, start=1) == [("a",), ("c",)]
    assert enumerate_chains(sp, 3) == []


def test_chain_enumeration_matches_product_filter():
    sp = RSpace.build(3, [("a", 1, 2), ("a2", 1, 2), ("b", 2, 3), ("c", 1, 3), ("d", 2, 2)])
    for n in (1, 2, 3):
        brute = []
        for tup in itertools.product(sp.names, repeat=n):
            gens = [sp.gen(x) for x in tup]
            if all(gens[k].src == gens[k + 1].tgt for k in range(n - 1)):
                brute.append(tup)
        assert sorted(enumerate_chains(sp, n)) == sorted(brute)


def test_slot_homology_and_projection():
    sp = RSpace.build(2, [("u", 1, 1), ("v", 1, 1), ("w", 1, 2)])
    d = {"u": frozenset({"v"}), "v": frozenset(), "w": frozenset()}
    H = slot_homology(sp, lambda n: d[n])
    assert H.dims() == {(1, 1): 0, (1, 2): 1}
    assert H.project({"w"}) == {(1, 2): 1}
    assert H.project({"v"}) == {}
    with pytest.raises(InputError):
        H.project({"u"})
