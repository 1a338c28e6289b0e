import random
from fractions import Fraction

import pytest

from opmin.bvoperad import (S_ELEMENT, T_ELEMENT, UNIT, BVChain, DecoratedBVTree, black_count,
                            bv_compose, bv_differential, bv_subcomplex_check, chain_parity,
                            check_associativity, check_d_squared, check_derivation,
                            is_t_truncated, tree_differential, unit)
from opmin.combin import bv_string, bv_valid, enum_bvtrees, parse_bv


def chain(s, c=1, decoration="ass"):
    return BVChain.of(parse_bv(s), c, decoration)


def as_strings(x):
    return {bv_string(t): c for t, c in x.terms.items()}


def test_no_black_edges_means_closed():
    for s in ["r[1,2]", "r[w[1,2],3]", "r[w[1]]"]:
        assert bv_differential(chain(s)).is_zero()


def test_single_black_edge_has_two_terms():
    d = bv_differential(chain("r[b[1,2],3]"))
    assert as_strings(d) == {"r[1,2,3]": 1, "r[w[1,2],3]": -1}


def test_ds_is_one_minus_t():
    d = bv_differential(BVChain.of(S_ELEMENT))
    assert d == unit() - BVChain.of(T_ELEMENT)


def test_relations_among_s_and_t():
    s, t = BVChain.of(S_ELEMENT), BVChain.of(T_ELEMENT)
    assert bv_compose(s, 1, s).is_zero()
    assert bv_compose(t, 1, t) == t
    assert bv_compose(s, 1, t).is_zero()
    assert bv_compose(t, 1, s).is_zero()


def test_white_edges_merge_through_bivalent_vertex():
    x = chain("r[w[1],2]")
    y = chain("r[w[1,2]]")
    assert as_strings(bv_compose(x, 1, y)) == {"r[w[1,2],3]": 1}


def test_black_edge_at_bivalent_vertex_kills_the_term():
    assert bv_compose(chain("r[b[1],2]"), 1, chain("r[w[1,2]]")).is_zero()
    assert bv_compose(chain("r[w[1],2]"), 1, chain("r[b[1,2]]")).is_zero()


def test_unit_laws():
    u = unit()
    for n in range(1, 4):
        for t in enum_bvtrees(n, 3, planar=True):
            x = BVChain.of(t)
            assert bv_compose(u, 1, x) == x
            for i in range(1, n + 1):
                assert bv_compose(x, i, u) == x


def test_black_edge_order_sign():
    t = parse_bv("r[b[1,b[2,3]],4]")
    _, c0 = DecoratedBVTree(t, Fraction(1)).normalize()
    _, c1 = DecoratedBVTree(t, Fraction(1), (1, 0)).normalize()
    assert c1 == -c0
    chains = BVChain.from_terms([DecoratedBVTree(t, Fraction(1)),
                                 DecoratedBVTree(t, Fraction(1), (1, 0))])
    assert chains.is_zero()


def test_parity_of_differential():
    for t in enum_bvtrees(3, 3, planar=True):
        d = bv_differential(BVChain.of(t))
        if not d.is_zero():
            assert chain_parity(d) == (black_count(t) + 1) % 2


@pytest.mark.parametrize("decoration", ["ass", "com"])
def test_d_squared_small(decoration):
    assert check_d_squared(3, 3, decoration).passed


@pytest.mark.parametrize("decoration", ["ass", "com"])
def test_derivation_small(decoration):
    assert check_derivation(3, 3, decoration).passed


def test_d_squared_on_random_chains():
    rng = random.Random(0)
    trees = enum_bvtrees(4, 4, planar=True)
    for _ in range(30):
        terms = {rng.choice(trees): Fraction(rng.randint(-3, 3)) for _ in range(4)}
        x = BVChain(terms)
        assert bv_differential(bv_differential(x)).is_zero()


def test_composition_axioms_small():
    assert check_associativity(2, 2).passed
    assert check_associativity(2, 2, "com").passed


def test_composition_axioms_three_vertices():
    rep = check_associativity(2, 3)
    assert rep.passed, str(rep)


def test_compositions_stay_valid():
    trees = [t for n in (1, 2) for t in enum_bvtrees(n, 2, planar=True)]
    for x in trees:
        for y in trees:
            for i in range(1, _leaves(x) + 1):
                for t in bv_compose(BVChain.of(x), i, BVChain.of(y)).terms:
                    assert bv_valid(t)


def _leaves(t):
    if isinstance(t, int):
        return 1
    return sum(_leaves(k) for k in t[1])


def test_subcomplex_closed():
    # n leaves need at least n + 2 vertices to be of the form T_t
    for n, bound in ((1, 4), (2, 5), (3, 6)):
        rep = bv_subcomplex_check(n, bound)
        assert rep.passed
        assert rep.data["generators"] > 0


def test_tree_outside_subcomplex_is_reported():
    assert is_t_truncated(T_ELEMENT)
    assert not is_t_truncated(UNIT)
    assert not is_t_truncated(S_ELEMENT)
    assert is_t_truncated(parse_bv("r[w[b[w[1],w[2]]]]"))
    assert not is_t_truncated(parse_bv("r[w[b[1,w[2]]]]"))


def test_com_chains_identify_reorderings():
    a = chain("r[2,1]", 1, "com")
    b = chain("r[1,2]", 1, "com")
    assert a == b
    assert tree_differential(parse_bv("r[b[1,2],3]"), "com")
