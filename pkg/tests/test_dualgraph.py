import itertools
import random
from fractions import Fraction

import pytest

from opmin.combin import Isomorphism, LabelledGraph, enum_stable_graphs
from opmin.dualgraph import (DATA, DatumError, GraphCochain, ModularFrobeniusDatum,
                             amplitude_oracle, apply_iso, boundary, check_cocycle,
                             contraction_from_matrix, contraction_sign, dual_cocycle,
                             dual_numbers_datum, exterior_datum, gauge_independence, graph_amplitude,
                             grassmann_datum, is_odd_graph, orientation_profile,
                             propagator, reachable_types, relabel_character, seeded_contraction,
                             verify_modular_datum, window_graphs)
from opmin.exactlin import GROUND, GradedMap, MultiMap, compose, identity, tensor
from opmin.hodge import DgSpace, cyclic_hodge

THETA = LabelledGraph((0, 0), ((0, 1), (0, 1), (0, 1)))


def odd_odd_inversions_sign(parities, order):
    sign = 1
    for a in range(len(order)):
        for b in range(a + 1, len(order)):
            if order[a] > order[b] and parities[order[a]] and parities[order[b]]:
                sign = -sign
    return sign


def index_sum(lg, M, Ks):
    """Brute-force contraction: loop over the nonzero entries of every edge
    element, read off the vertex tensors, track signs by hand."""
    V = M.space
    E = len(lg.edges)
    Ys = [M.vertex_tensor(g, lg.valence(v)) for v, g in enumerate(lg.genus)]
    slots = []
    for v in range(lg.n_vertices):
        mine = []
        for k, (a, b) in enumerate(lg.edges):
            if a == v:
                mine.append(2 * k)
            if b == v:
                mine.append(2 * k + 1)
        slots.append(mine)
    order = [h for mine in slots for h in mine]
    total = Fraction(0)
    for choice in itertools.product(*[list(K.entries.items()) for K in Ks]):
        labels = [None] * (2 * E)
        coef = Fraction(1)
        for e, (((i, j), ()), c) in enumerate(choice):
            labels[2 * e], labels[2 * e + 1] = i, j
            coef *= c
        pars = [V.parity(x) for x in labels]
        coef *= odd_odd_inversions_sign(pars, order)
        seen_parity = 0
        for v, Y in enumerate(Ys):
            val = Y.entries.get(((), tuple(labels[h] for h in slots[v])), 0)
            coef *= val
            if not coef:
                break
            if Y.parity and seen_parity:
                coef = -coef
            seen_parity = (seen_parity + sum(pars[h] for h in slots[v])) % 2
        total += coef
    return total


def random_two_tensor(rng, V, parity, eps=None, density=0.6):
    ent = {}
    for i in range(V.dim):
        for j in range(V.dim):
            if (V.parity(i) + V.parity(j)) % 2 != parity or rng.random() > density:
                continue
            if eps is None:
                ent[((i, j), ())] = Fraction(rng.randint(-3, 3))
            elif i <= j:
                c = Fraction(rng.randint(-3, 3))
                kz = -1 if V.parity(i) and V.parity(j) else 1
                if i == j and kz * eps != 1:
                    continue
                ent[((i, j), ())] = c
                ent[((j, i), ())] = eps * kz * c
    return MultiMap(GROUND, V, 0, 2, parity, ent)


def small_graphs():
    return enum_stable_graphs(2, 4)


def graphs_for(M):
    # the full genus-three window only on the small data, for speed
    return enum_stable_graphs(2, 4) + enum_stable_graphs(3, 3 if M.space.dim <= 4 else 2)


@pytest.fixture(scope="module", params=sorted(DATA))
def datum(request):
    return DATA[request.param]()


# -- amplitudes ---------------------------------------------------------------

def test_theta_on_exterior_matches_index_loop():
    M = exterior_datum()
    h = cyclic_hodge(M.base, M.ip)
    K = propagator(h, M)
    assert graph_amplitude(THETA, M, h) == index_sum(THETA, M, [K] * 3)
    rng = random.Random(0)
    hits = 0
    for _ in range(20):
        Ks = [random_two_tensor(rng, M.space, K.parity) for _ in range(3)]
        want = index_sum(THETA, M, Ks)
        assert graph_amplitude(THETA, M, edge_elements=Ks) == want
        hits += want != 0
    assert hits


def test_amplitudes_agree_with_both_oracles(datum):
    M = datum
    rng = random.Random(1)
    parity = (M.ip.parity + 1) % 2
    nonzero = 0
    for sg, _ in itertools.product(small_graphs(), range(3)):
        lg = sg.graph
        Ks = [random_two_tensor(rng, M.space, parity, density=0.7) for _ in lg.edges]
        got = graph_amplitude(lg, M, edge_elements=Ks)
        assert got == graph_amplitude(lg, M, edge_elements=Ks, schedule=1)
        assert got == index_sum(lg, M, Ks)
        if M.space.dim <= 4:
            assert got == amplitude_oracle(lg, M, edge_elements=Ks)
        nonzero += got != 0
    assert nonzero


def test_relabelling_character(datum):
    M = datum
    h = seeded_contraction(M, 0)
    prof = orientation_profile(M, h, 3 if M.space.dim <= 4 else 2)
    rng = random.Random(5)
    for sg in graphs_for(M):
        lg = sg.graph
        E = len(lg.edges)
        K = random_two_tensor(rng, M.space, prof.edge_parity, prof.reversal)
        base = graph_amplitude(lg, M, edge_elements=[K] * E)
        for _ in range(3):
            vp = list(range(lg.n_vertices))
            rng.shuffle(vp)
            ep = list(range(E))
            rng.shuffle(ep)
            iso = Isomorphism(tuple(vp), tuple(ep), tuple(rng.randint(0, 1) for _ in range(E)))
            moved = graph_amplitude(apply_iso(lg, iso), M, edge_elements=[K] * E)
            assert moved == relabel_character(lg, iso, prof) * base


def test_edge_swap_negates_for_odd_propagators():
    # an even pairing makes every propagator odd; theta itself vanishes here
    # (three edges carry an odd number of odd labels), so use four edges
    M = grassmann_datum()
    h = seeded_contraction(M, 0)
    assert orientation_profile(M, h, 3).edge_parity == 1
    banana = LabelledGraph((0, 0), ((0, 1),) * 4)
    rng = random.Random(2)
    seen = 0
    for _ in range(10):
        Ks = [random_two_tensor(rng, M.space, 1, density=0.9) for _ in range(4)]
        a = graph_amplitude(banana, M, edge_elements=Ks)
        b = graph_amplitude(banana, M, edge_elements=[Ks[1], Ks[0]] + Ks[2:])
        assert b == -a
        seen += a != 0
    assert seen


def test_odd_graphs_vanish(datum):
    M = datum
    h = seeded_contraction(M, 0)
    prof = orientation_profile(M, h, 2)
    rng = random.Random(3)
    for sg in small_graphs():
        if is_odd_graph(sg.graph, prof):
            K = random_two_tensor(rng, M.space, prof.edge_parity, prof.reversal)
            assert graph_amplitude(sg.graph, M, edge_elements=[K] * len(sg.edges)) == 0


def test_contraction_with_casimir(datum):
    M = datum
    h = seeded_contraction(M, 0)
    prof = orientation_profile(M, h, 3 if M.space.dim <= 4 else 2)
    C = M.casimir()
    rng = random.Random(5)
    nonzero = 0
    for sg in graphs_for(M):
        lg = sg.graph
        E = len(lg.edges)
        Ks = [random_two_tensor(rng, M.space, prof.edge_parity) for _ in range(E)]
        for k in range(E):
            els = list(Ks)
            els[k] = C
            lhs = graph_amplitude(lg, M, edge_elements=els)
            sign, con = contraction_sign(lg, k, prof)
            rest = [Ks[j] for j in range(E) if j != k]
            assert lhs == sign * graph_amplitude(con, M, edge_elements=rest)
            nonzero += lhs != 0
    # the 2-dim datum is too small to see anything here, and torus-8 only
    # sees it on three-vertex genus-three graphs, outside its fast window
    assert nonzero or M.space.dim != 4


def test_stokes_identity(datum):
    # sum_e (-1)^{|K| e} amp(H with (d (x) 1 + 1 (x) d) K_e on edge e) = 0
    M = datum
    V = M.space
    d, I = M.base.d, identity(V)
    p = (M.ip.parity + 1) % 2
    rng = random.Random(7)
    nonzero_terms = 0
    for sg in graphs_for(M):
        lg = sg.graph
        E = len(lg.edges)
        Ks = [random_two_tensor(rng, V, p) for _ in range(E)]
        total = Fraction(0)
        for k in range(E):
            dK = compose(tensor([d, I]), Ks[k]) + compose(tensor([I, d]), Ks[k])
            els = list(Ks)
            els[k] = dK
            term = (-1) ** (p * k) * graph_amplitude(lg, M, edge_elements=els)
            nonzero_terms += term != 0
            total += term
        assert total == 0
    assert nonzero_terms or M.space.dim == 2


def test_propagator_is_s_against_casimir(datum):
    M = datum
    h = cyclic_hodge(M.base, M.ip)
    K = propagator(h, M)
    assert K == compose(tensor([h.s, identity(M.space)]), M.casimir())
    # d K + K d = C follows from d s + s d = 1
    d, I = M.base.d, identity(M.space)
    assert compose(tensor([d, I]), K) + compose(tensor([I, d]), K) == M.casimir()


def test_casimir_zigzag(datum):
    M = datum
    V = M.space
    pair = MultiMap(V, GROUND, 2, 0, M.ip.parity,
                    {((), (i, j)): M.ip.matrix()[i][j]
                     for i in range(V.dim) for j in range(V.dim) if M.ip.matrix()[i][j]})
    zig = compose(tensor([identity(V), pair]), tensor([M.casimir(), identity(V)]))
    assert zig == identity(V)


def test_missing_vertex_tensor():
    M = exterior_datum()
    bare = ModularFrobeniusDatum(M.base, M.ip, {}, None, "bare")
    with pytest.raises(DatumError):
        graph_amplitude(THETA, bare, edge_elements=[propagator(cyclic_hodge(M.base, M.ip), M)] * 3)


def test_non_contractible_space_rejected():
    M = exterior_datum()
    flat = DgSpace(M.space, GradedMap(M.space, M.space, 1, {}))
    with pytest.raises(DatumError):
        ModularFrobeniusDatum(flat, M.ip)


# -- datum axioms ---------------------------------------------------------------

def test_generated_data_pass_gluing(datum):
    assert verify_modular_datum(datum, 2 if datum.space.dim <= 4 else 1).passed


def test_perturbed_vertex_tensor_fails_self_gluing():
    M = dual_numbers_datum()
    assert verify_modular_datum(M, 2).passed
    tables = {gk: M.vertex_tensor(*gk) for gk in reachable_types(2)}
    Y = tables[(1, 3)]
    V = M.space
    ins = next(t for t in itertools.product(range(V.dim), repeat=3)
               if V.tuple_parity(t) == Y.parity)
    ent = dict(Y.entries)
    ent[((), ins)] = ent.get(((), ins), 0) + 1
    tables[(1, 3)] = MultiMap(V, GROUND, 3, 0, Y.parity, ent)
    rep = verify_modular_datum(ModularFrobeniusDatum(M.base, M.ip, tables, None, "bumped"), 2)
    assert not rep.passed
    assert any(c.name.startswith("self-gluing") for c in rep.failures())


def test_zero_datum_passes():
    M = exterior_datum()
    assert verify_modular_datum(ModularFrobeniusDatum(M.base, M.ip, {}, None, "zero"), 2).passed


# -- cochain, cocycle, gauge ----------------------------------------------------

def test_window_below_stable_genus_is_empty():
    M = grassmann_datum()
    Z = dual_cocycle(M, seeded_contraction(M, 0), (0, 4))
    assert not Z.values and check_cocycle(Z).passed


def test_cochain_values_match_oracle(datum):
    M = datum
    h = seeded_contraction(M, 0)
    Z = dual_cocycle(M, h, (2, 4))
    K = propagator(h, M)
    for key, sg in Z.graphs.items():
        amp = index_sum(sg.graph, M, [K] * len(sg.edges))
        assert Z.values[key] * sg.aut_order == amp


def test_cocycle(datum):
    windows = [(2, 4)] + ([(3, 3)] if datum.space.dim <= 4 else [])
    for window, seed in itertools.product(windows, (0, 1)):
        Z = dual_cocycle(datum, seeded_contraction(datum, seed), window)
        assert check_cocycle(Z).passed


def test_cocycle_check_detects_a_mutated_cochain():
    M = grassmann_datum()
    Z = dual_cocycle(M, seeded_contraction(M, 0), (2, 4))
    theta_key = next(k for k, sg in Z.graphs.items() if sg.graph == THETA)
    terms = boundary(Z.graphs[theta_key].graph, Z.profile)
    target = next(k for k, c in terms.items() if c)
    vals = dict(Z.values)
    vals[target] = Fraction(1)
    bad = GraphCochain(vals, Z.graphs, Z.profile, Z.window)
    rep = check_cocycle(bad)
    assert not rep.passed
    assert theta_key in [c.name for c in rep.failures()]


def test_cocycle_check_reports_small_window():
    M = grassmann_datum()
    Z = dual_cocycle(M, seeded_contraction(M, 0), (2, 4))
    theta_key = next(k for k, sg in Z.graphs.items() if sg.graph == THETA)
    target = next(iter(boundary(THETA, Z.profile)))
    graphs = {k: v for k, v in Z.graphs.items() if k != target}
    rep = check_cocycle(GraphCochain(dict(Z.values), graphs, Z.profile, Z.window))
    check = next(c for c in rep.checks if c.name == theta_key)
    assert not check.passed and "window too small" in check.detail


def test_gauge_same_homotopy_gives_zero_certificate():
    M = grassmann_datum()
    h = seeded_contraction(M, 0)
    rep = gauge_independence(M, h, h, (2, 4))
    assert rep.passed
    assert rep.data["certificate"] == {} and rep.data["difference_nonzero"] == 0


def test_gauge_two_distinct_homotopies():
    M = grassmann_datum()
    h1, h2 = seeded_contraction(M, 0), seeded_contraction(M, 1)
    assert h1.s != h2.s
    rep = gauge_independence(M, h1, h2, (2, 4))
    assert rep.passed, str(rep)


def test_gauge_rejects_non_homotopy():
    M = grassmann_datum()
    h = seeded_contraction(M, 0)
    S = [list(r) for r in h.s.matrix()]
    i, j = next((i, j) for i in range(4) for j in range(4) if S[i][j])
    S[i][j] += 1
    rep = gauge_independence(M, h, contraction_from_matrix(M, S), (2, 4))
    assert not rep.passed
    assert "certificate" not in rep.data


def test_window_graph_counts():
    # no legless stable graph has genus one
    assert window_graphs(1, 4) == []
    assert len(window_graphs(2, 4)) == 7
