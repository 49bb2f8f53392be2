import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from thimble.bndalg import (
    AlgebraWithBoundary,
    GradedAlgebra,
    boundary_dga,
    boundary_solutions,
    check_boundary_axioms,
    dga_homology,
    interval,
    random_boundary_algebra,
    small_algebras,
)
from thimble.corelin import InputError

seeds = st.integers(0, 10_000)


def test_interval_example():
    H = dga_homology(boundary_dga(interval()))
    assert H.total == 2
    assert H.dims == {0: 2}
    sq = H.square_zero_elements()
    assert len(sq) == 1
    # the square-zero class is the dual of the unit
    (v,) = sq
    (i,) = [k for k in range(H.total) if (v >> k) & 1]
    assert H.reps[i] == frozenset({"e*"})


@given(seeds)
def test_random_boundary_algebras_give_frobenius_dgas(seed):
    B = random_boundary_algebra(random.Random(seed))
    assert check_boundary_axioms(B) is None
    dga = boundary_dga(B)
    assert dga.check_invariants() is None
    names = dga.names
    for x in names:
        row = [dga.pairing(x, y) for y in names]
        assert any(row), f"pairing degenerate at {x}"


@given(seeds)
def test_homology_is_poincare_dual(seed):
    B = random_boundary_algebra(random.Random(seed))
    H = dga_homology(boundary_dga(B))
    for d, k in H.dims.items():
        assert H.dims.get(B.n - d, 0) == k
    assert H.total % 2 == 0


def test_every_solution_satisfies_axioms():
    for A in small_algebras():
        for n in range(-1, 5):
            for D in boundary_solutions(A, n):
                assert check_boundary_axioms(AlgebraWithBoundary(A, D, n)) is None


def test_symmetry_violation_reported():
    A = GradedAlgebra({"e": 0, "x": 1}, {}, "e")
    B = AlgebraWithBoundary(A, [("e", "x")], 0)
    v = check_boundary_axioms(B)
    assert v is not None and v.axiom == "symmetry"
    with pytest.raises(InputError, match="not an algebra with boundary"):
        boundary_dga(B)


def test_compatibility_violation_reported():
    A = GradedAlgebra({"e": 0, "f": 0}, {("f", "f"): ("f",)}, "e")
    B = AlgebraWithBoundary(A, [("e", "f"), ("f", "e")], -1)
    v = check_boundary_axioms(B)
    assert v is not None and "compatibility" in v.axiom


def test_wrong_degree_rejected():
    A = GradedAlgebra({"e": 0, "x": 1}, {}, "e")
    with pytest.raises(InputError, match="degree"):
        check_boundary_axioms(AlgebraWithBoundary(A, [("x", "x")], 0))


def test_graded_algebra_validation():
    with pytest.raises(InputError, match="unit"):
        GradedAlgebra({"e": 0}, {}, "u")
    with pytest.raises(InputError, match="degrees"):
        GradedAlgebra({"e": 0, "x": 1, "y": 1}, {("x", "x"): ("y",)}, "e")


def test_sphere_like_example_has_nonzero_differential():
    # A = K[x]/x^2, |x| = 2, n = 1: D = e (x) x + x (x) e
    A = GradedAlgebra({"e": 0, "x": 2}, {}, "e")
    B = AlgebraWithBoundary(A, [("e", "x"), ("x", "e")], 1)
    assert check_boundary_axioms(B) is None
    dga = boundary_dga(B)
    assert dga.d("e*") == frozenset({"x"})
    assert dga.d("x*") == frozenset({"e"})
    assert dga_homology(dga).total == 0
