import itertools
import random
from functools import lru_cache

import pytest

from opmin.combin import (LEAF, LabelledGraph, automorphism_order, automorphisms, canonicalize,
                          compositions, contract_edge, enum_labelled, enum_planar,
                          enum_stable_graphs, graph_string, internal_edges, labelled_shape,
                          labels_in_order, leaf_count, parse_graph, parse_planar, perm_sign,
                          planar_string)


@lru_cache(maxsize=None)
def forests(n, k):
    """Ordered forests of k planar trees with n leaves in total."""
    if k == 0:
        return int(n == 0)
    return sum(planar_count(m) * forests(n - m, k - 1) for m in range(1, n - k + 2))


@lru_cache(maxsize=None)
def planar_count(n):
    if n == 1:
        return 1
    return sum(forests(n, k) for k in range(2, n + 1))


def unordered_form(t):
    if isinstance(t, int):
        return str(t)
    return "(" + ",".join(sorted(unordered_form(c) for c in t)) + ")"


def label_planar(tree, labels):
    it = iter(labels)

    def rec(t):
        if t == LEAF:
            return next(it)
        return tuple(rec(c) for c in t)
    return rec(tree)


@pytest.mark.parametrize("n,expected", [(2, 1), (3, 3), (4, 11), (5, 45), (6, 197)])
def test_planar_counts(n, expected):
    trees = enum_planar(n)
    assert len(trees) == expected == planar_count(n)
    assert len(set(trees)) == len(trees)
    assert all(leaf_count(t) == n for t in trees)


@pytest.mark.parametrize("n,expected", [(2, 1), (3, 4), (4, 26), (5, 236)])
def test_labelled_counts_match_bruteforce(n, expected):
    # every leaf-labelled tree is a planar tree with a labelling, up to
    # reordering children
    seen = set()
    for t in enum_planar(n):
        for perm in itertools.permutations(range(1, n + 1)):
            seen.add(unordered_form(label_planar(t, perm)))
    got = enum_labelled(n)
    assert len(seen) == len(got) == expected
    assert {unordered_form(t) for t in got} == seen


def test_labelled_shape_and_labels_round_trip():
    for t in enum_labelled(4):
        assert label_planar(labelled_shape(t), labels_in_order(t)) == t


def test_planar_string_round_trip():
    for n in range(2, 6):
        for t in enum_planar(n):
            assert parse_planar(planar_string(t)) == t


def test_internal_edges_binary_trees():
    for t in enum_planar(5):
        if internal_edges(t) == 3:
            assert all(len(c) == 2 for c in _vertices(t))


def _vertices(t):
    if t == LEAF:
        return []
    out = [t]
    for c in t:
        out += _vertices(c)
    return out


def test_compositions():
    assert list(compositions(4, 2)) == [(1, 3), (2, 2), (3, 1)]
    assert len(list(compositions(6, 3))) == 10


def test_perm_sign_matches_inversions():
    for p in itertools.permutations(range(5)):
        inv = sum(1 for i in range(5) for j in range(i + 1, 5) if p[i] > p[j])
        assert perm_sign(p) == (-1) ** inv


@pytest.mark.parametrize("g,expected", [(2, 7), (3, 42)])
def test_stable_graph_counts(g, expected):
    graphs = enum_stable_graphs(g, 2 * g - 2)
    assert len(graphs) == expected
    assert all(sg.total_genus() == g and sg.graph.is_stable() and sg.graph.is_connected()
               for sg in graphs)


def halfedge_automorphisms(lg: LabelledGraph):
    """Brute force: permutations of half-edges commuting with the edge
    involution and induced by a genus-preserving vertex bijection."""
    E = len(lg.edges)
    ends = [lg.edges[k][e] for k in range(E) for e in (0, 1)]
    count = 0
    for sigma in itertools.permutations(range(2 * E)):
        if any(sigma[h ^ 1] != sigma[h] ^ 1 for h in range(2 * E)):
            continue
        vmap = {}
        ok = True
        for h in range(2 * E):
            v, w = ends[h], ends[sigma[h]]
            if vmap.setdefault(v, w) != w:
                ok = False
                break
        if not ok:
            continue
        for v in range(lg.n_vertices):
            if lg.valence(v) == 0:
                # only the lone vertex of a graph with no edges
                vmap.setdefault(v, v)
        if sorted(vmap.values()) != list(range(lg.n_vertices)):
            continue
        if any(lg.genus[v] != lg.genus[w] for v, w in vmap.items()):
            continue
        count += 1
    return count


def test_automorphism_orders_genus_two_bruteforce():
    orders = {}
    for sg in enum_stable_graphs(2, 2):
        assert sg.aut_order == halfedge_automorphisms(sg.graph)
        assert len(automorphisms(sg.graph)) == sg.aut_order
        orders[sg.key()] = sg.aut_order
    # theta graph: S_3 on edges times the swap of the two vertices
    assert orders["g=0,0;e=0-1,0-1,0-1"] == 12
    assert orders["g=0;e=0-0,0-0"] == 8


def test_canonical_form_is_invariant_under_relabelling():
    rng = random.Random(1)
    for sg in enum_stable_graphs(3, 4):
        lg = sg.graph
        n = lg.n_vertices
        for _ in range(3):
            p = list(range(n))
            rng.shuffle(p)
            edges = [(p[a], p[b]) if rng.random() < 0.5 else (p[b], p[a]) for a, b in lg.edges]
            rng.shuffle(edges)
            genus = [0] * n
            for v in range(n):
                genus[p[v]] = lg.genus[v]
            other = LabelledGraph(tuple(genus), tuple(edges))
            canon, iso = canonicalize(other)
            assert canon == lg
            # the isomorphism really maps other onto canon
            for k, (a, b) in enumerate(other.edges):
                ta, tb = canon.edges[iso.eperm[k]]
                pa, pb = iso.vperm[a], iso.vperm[b]
                assert (pa, pb) == ((tb, ta) if iso.eflip[k] else (ta, tb))


def test_contraction_preserves_total_genus():
    for sg in enum_stable_graphs(3, 4):
        for k in range(len(sg.edges)):
            out, stable = contract_edge(sg.graph, k)
            assert out.total_genus() == 3
            assert stable


def test_graph_string_round_trip():
    for sg in enum_stable_graphs(3, 4):
        assert parse_graph(graph_string(sg.graph)) == sg.graph


def test_automorphism_order_of_symmetric_graphs():
    # two vertices, four parallel edges: 4! * 2
    lg = LabelledGraph((0, 0), ((0, 1),) * 4)
    assert automorphism_order(lg) == 48
