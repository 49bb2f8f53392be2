import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import algebra_relation_failures
from thimble.ainfty import (
    AInftyAlgebra,
    adjoin_units,
    check_relations,
    check_unital_relations,
    homology_algebra,
)
from thimble.corelin import InputError, RSpace
from thimble.examples import kronecker
from thimble.sampling import random_algebra


def test_kronecker_relations_hold():
    A = kronecker()
    assert check_relations(A) is None
    assert A.max_chain_length() == 1


def test_three_object_composition():
    sp = RSpace.build(3, [("a", 1, 2), ("b", 2, 3), ("c", 1, 3)])
    A = AInftyAlgebra(sp, {2: {("b", "a"): ["c"]}})
    assert check_relations(A) is None
    HA = homology_algebra(A)
    assert HA.homology.total == 3
    assert HA.product.entries == {("[b]", "[a]"): frozenset({"[c]"})}


def test_violation_reported_with_inputs():
    sp = RSpace.build(2, [("u", 1, 2), ("v", 1, 2)])
    # mu^1(u) = v and mu^1(v) = v gives mu^1 mu^1 (u) = v != 0
    A = AInftyAlgebra(sp, {1: {("u",): ["v"], ("v",): ["v"]}})
    v = check_relations(A)
    assert v is not None and v.inputs in {("u",), ("v",)}
    assert "relation fails" in str(v)


def test_reserved_unit_name_rejected():
    with pytest.raises(InputError, match="reserved"):
        AInftyAlgebra(RSpace.build(2, [("e1", 1, 2)]), {})


def test_directed_requires_increasing_slots():
    with pytest.raises(InputError, match="directed"):
        AInftyAlgebra(RSpace.build(2, [("x", 2, 1)]), {})


def test_dmax_bound_enforced():
    sp = RSpace.build(3, [("a", 1, 2), ("b", 2, 3), ("c", 1, 3)])
    with pytest.raises(InputError, match="d_max"):
        AInftyAlgebra(sp, {2: {("b", "a"): ["c"]}}, d_max=1)


@given(st.integers(0, 10_000))
def test_random_algebras_agree_with_naive_oracle(seed):
    rng = random.Random(seed)
    A = random_algebra(rng, rng.choice((2, 3, 4)), max_per_slot=2, min_per_slot=1)
    assert check_relations(A) is None
    assert algebra_relation_failures(A, A.m) == []


@given(st.integers(0, 10_000))
def test_checker_finds_what_the_oracle_finds(seed):
    rng = random.Random(seed)
    A = random_algebra(rng, 3, max_per_slot=2, min_per_slot=1)
    names = A.space.names
    # corrupt one random composable product and compare verdicts
    mu = {d: dict(t.entries) for d, t in A.mu.items()}
    pairs = [(b, a) for b in names for a in names
             if A.space.gen(b).src == A.space.gen(a).tgt]
    if not pairs:
        return
    b, a = rng.choice(pairs)
    outs = A.space.in_slot(A.space.gen(a).src, A.space.gen(b).tgt)
    if not outs:
        return
    table = mu.setdefault(2, {})
    table[(b, a)] = table.get((b, a), frozenset()) ^ {rng.choice(outs)}
    B = AInftyAlgebra(A.space, mu)
    assert (check_relations(B) is None) == (algebra_relation_failures(B, B.m) == [])


@given(st.integers(0, 10_000))
def test_strict_units_satisfy_relations(seed):
    rng = random.Random(seed)
    A = random_algebra(rng, 3, max_per_slot=1, min_per_slot=1)
    assert check_unital_relations(adjoin_units(A), max_arity=4) is None


def test_homology_algebra_of_acyclic_pair():
    sp = RSpace.build(2, [("u", 1, 2), ("v", 1, 2), ("w", 1, 2)])
    A = AInftyAlgebra(sp, {1: {("u",): ["v"]}})
    HA = homology_algebra(A)
    assert HA.homology.total == 1
    assert HA.reps[HA.space.names[0]] == frozenset({"w"})
