import random
from fractions import Fraction

import pytest

from opmin.exactlin import GradedMap, GradedSpace, compose, identity, rank
from opmin.hodge import (DgSpace, HodgeData, HodgeError, InnerProduct, adjointness_report,
                         canonical_hodge, check_dg_frobenius, cyclic_hodge, hodge_rank_report,
                         trivial_hodge, verify_hodge)
from opmin.models import random_dga, random_frobenius_space


def homology_dim_oracle(V: DgSpace):
    n = V.dim
    D = V.d.matrix()
    r = rank(D) if n else 0
    return (n - r) - r


@pytest.mark.parametrize("seed", range(40))
def test_canonical_hodge_on_random_dga_spaces(seed):
    V, _ = random_dga(seed)
    h = canonical_hodge(V)
    assert verify_hodge(h).passed
    assert hodge_rank_report(h).passed
    assert rank(h.t.matrix()) == homology_dim_oracle(V)


def test_cyclic_hodge_many_seeds():
    dims = set()
    for seed in range(120):
        V, ip = random_frobenius_space(seed)
        dims.add(V.dim)
        assert check_dg_frobenius(V, ip).passed
        for h in (canonical_hodge(V), cyclic_hodge(V, ip)):
            assert verify_hodge(h).passed, seed
            assert hodge_rank_report(h).passed
            t_rank = rank(h.t.matrix()) if V.dim else 0
            assert t_rank == homology_dim_oracle(V)
        assert adjointness_report(cyclic_hodge(V, ip), ip).passed, seed
    assert max(dims) == 8


def test_canonical_is_not_always_adjoint():
    # the cyclic construction is doing real work
    fails = 0
    for seed in range(60):
        V, ip = random_frobenius_space(seed)
        if not adjointness_report(canonical_hodge(V), ip).passed:
            fails += 1
    assert fails > 0


def test_trivial_hodge():
    V = GradedSpace([("a", 0), ("b", 1)])
    h = trivial_hodge(DgSpace(V, GradedMap(V, V, 1, {})))
    assert verify_hodge(h).passed
    assert h.canonical
    assert h.t == identity(V) and h.s.is_zero()


def test_contractible_space_has_t_zero():
    V = GradedSpace([("x", 1), ("y", 0)])
    h = canonical_hodge(DgSpace(V, GradedMap(V, V, 1, {(1, 0): 3})))
    assert h.t.is_zero()
    assert h.s.entries == {((0,), (1,)): Fraction(1, 3)}


def test_verify_hodge_catches_perturbations():
    V, _ = random_dga(7)
    h = canonical_hodge(V)
    rng = random.Random(0)
    n = V.dim
    for _ in range(10):
        i, j = rng.randrange(n), rng.randrange(n)
        if V.space.parity(i) == V.space.parity(j):
            continue
        bump = GradedMap(V.space, V.space, 1, {(i, j): 1})
        assert not verify_hodge(h.with_s(h.s + bump)).passed


def test_dg_frobenius_precondition():
    V = GradedSpace([("x", 1), ("y", 0)])
    d = GradedMap(V, V, 1, {(1, 0): 1})
    ip = InnerProduct.from_entries(V, 1, {(0, 1): 1})
    assert check_dg_frobenius(DgSpace(V, d), ip).passed
    V2 = GradedSpace([("x", 0), ("y", 1)])
    d2 = GradedMap(V2, V2, 1, {(1, 0): 1})
    ip2 = InnerProduct.from_entries(V2, 1, {(0, 1): 1})
    assert not check_dg_frobenius(DgSpace(V2, d2), ip2).passed
    with pytest.raises(HodgeError):
        cyclic_hodge(DgSpace(V2, d2), ip2)


def test_inner_product_validation():
    V = GradedSpace([("a", 0), ("b", 0)])
    with pytest.raises(ValueError):
        InnerProduct(V, 0, ((Fraction(1), Fraction(2)), (Fraction(3), Fraction(1))))
    with pytest.raises(ValueError):
        InnerProduct.from_entries(V, 0, {(0, 0): 1})


def test_d_squared_checked():
    V = GradedSpace([("a", 0), ("b", 1), ("c", 0)])
    with pytest.raises(ValueError):
        DgSpace(V, GradedMap(V, V, 1, {(1, 0): 1, (2, 1): 1}))


def test_hodge_data_with_explicit_maps():
    V = GradedSpace([("x", 1), ("y", 0)])
    base = DgSpace(V, GradedMap(V, V, 1, {(1, 0): 1}))
    s = GradedMap(V, V, 1, {(0, 1): 1})
    t = GradedMap(V, V, 0, {})
    h = HodgeData(base, s, t)
    assert verify_hodge(h).passed
    assert compose(h.d, s) + compose(s, h.d) == identity(V)
