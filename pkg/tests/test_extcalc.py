import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from thimble.corelin import InputError, RSpace
from thimble.examples import kronecker
from thimble.extcalc import (
    AssociativeAlgebra,
    bar_resolution_homology,
    bimodule_maps_dim,
    diagonal_module,
    dual_module,
    ext_dim,
    module_named,
)


def path_algebra(m, arrows):
    """Path algebra of an acyclic quiver; arrows are (name, src, tgt) with src < tgt."""
    paths = [((a,), s, t) for a, s, t in arrows]
    frontier = list(paths)
    while frontier:
        new = []
        for p, s, t in frontier:
            for a, s2, t2 in arrows:
                if s2 == t:
                    new.append(((a,) + p, s, t2))
        paths += new
        frontier = new
    name = {p: "".join(p) for p, _, _ in paths}
    space = RSpace.build(m, [(name[p], s, t) for p, s, t in paths])
    product = {}
    for (p, s, t), (q, s2, t2) in itertools.product(paths, repeat=2):
        if s == t2:
            product[(name[p], name[q])] = [name[p + q]]
    return AssociativeAlgebra(space, product), paths


def happel(m, arrows, paths):
    """HH^0, HH^1 of a connected acyclic path algebra; higher groups vanish."""
    parallel = sum(sum(1 for _, s, t in paths if (s, t) == (a_s, a_t)) for _, a_s, a_t in arrows)
    return 1, 1 - m + parallel


def test_kronecker_table():
    H = AssociativeAlgebra.from_ainfty(kronecker())
    D = diagonal_module(H)
    V = dual_module(D)
    assert [ext_dim(V, D, k) for k in range(3)] == [0, 3, 5]
    assert [ext_dim(D, D, k) for k in range(3)] == [1, 3, 0]


def test_normalized_matches_unnormalized():
    H = AssociativeAlgebra.from_ainfty(kronecker())
    D = diagonal_module(H)
    V = dual_module(D)
    for M, N in ((V, D), (D, D), (D, V), (V, V)):
        for k in range(3):
            assert ext_dim(M, N, k) == ext_dim(M, N, k, normalized=False)


def test_ext0_equals_bimodule_maps():
    H = AssociativeAlgebra.from_ainfty(kronecker())
    D = diagonal_module(H)
    V = dual_module(D)
    for M, N in ((V, D), (D, D), (D, V), (V, V)):
        assert ext_dim(M, N, 0) == bimodule_maps_dim(M, N)


def test_bar_resolution_is_exact():
    H = AssociativeAlgebra.from_ainfty(kronecker())
    D = diagonal_module(H)
    assert set(bar_resolution_homology(D, 2)) == {0}
    assert set(bar_resolution_homology(dual_module(D), 2)) == {0}


def test_single_vertex():
    H = AssociativeAlgebra(RSpace(1, ()), {})
    K = diagonal_module(H)
    assert ext_dim(K, K, 0) == 1
    assert ext_dim(K, K, 1) == 0


@st.composite
def connected_quivers(draw):
    """Acyclic quivers on 2..4 vertices; vertex j > 1 always receives an arrow."""
    m = draw(st.integers(2, 4))
    arrows = []
    for j in range(2, m + 1):
        parent = draw(st.integers(1, j - 1))
        for i in range(1, j):
            extra = draw(st.integers(0, 2 if m < 4 else 1))
            for _ in range(extra + (i == parent)):
                arrows.append((f"{'abcdefghijklmnop'[len(arrows)]}", i, j))
    return m, arrows


@settings(max_examples=25, deadline=None)
@given(connected_quivers())
def test_hochschild_cohomology_of_path_algebras(q):
    m, arrows = q
    H, paths = path_algebra(m, arrows)
    D = diagonal_module(H)
    h0, h1 = happel(m, arrows, paths)
    assert ext_dim(D, D, 0) == h0
    assert ext_dim(D, D, 1) == h1
    assert ext_dim(D, D, 2) == 0


def test_triangle_quiver():
    arrows = [("a", 1, 2), ("b", 2, 3), ("c", 1, 3)]
    H, paths = path_algebra(3, arrows)
    D = diagonal_module(H)
    assert happel(3, arrows, paths) == (1, 2)
    assert [ext_dim(D, D, k) for k in range(3)] == [1, 2, 0]


def test_dual_module_is_a_module():
    H, _ = path_algebra(3, [("a", 1, 2), ("b", 2, 3)])
    V = dual_module(diagonal_module(H))
    assert V.space.dim == 3 + 3  # three paths plus three units


def test_module_named():
    H = AssociativeAlgebra.from_ainfty(kronecker())
    assert module_named("diagonal", H).space.dim == 4
    with pytest.raises(InputError):
        module_named("regular", H)


def test_non_associative_product_rejected():
    sp = RSpace.build(4, [("a", 1, 2), ("b", 2, 3), ("c", 3, 4), ("d", 1, 3), ("f", 1, 4)])
    # (c b) a = 0 but c (b a) = c d = f
    with pytest.raises(InputError, match="associative"):
        AssociativeAlgebra(sp, {("b", "a"): ["d"], ("c", "d"): ["f"]})
