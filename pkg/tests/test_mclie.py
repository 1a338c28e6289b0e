import random
from fractions import Fraction

import pytest

from opmin.dualgraph import exterior_datum, grassmann_datum, seeded_contraction
from opmin.exactlin import GradedMap, GradedSpace, compose, identity, mat_mul
from opmin.hodge import DgSpace, canonical_hodge, cyclic_hodge, trivial_hodge
from opmin.mclie import (FreeTensorAlgebra, MatrixRing, MCElement, OperatorDzElement,
                         PolyPath, abelian_dgla, bch, check_lie_axioms, check_mc,
                         check_sullivan, check_transport, gauge, gauge_by_conjugation,
                         grouplike_check, matrix_exp, matrix_log, nilpotent_model,
                         path_ordered_exp, poly_eval, poly_exp, poly_integrate,
                         solve_mc_from_gauge, solve_transport, sullivan_from_gauge,
                         verify_bvhat_homotopy, verify_dual_gauge_homotopy)
from opmin.models import random_dga, random_frobenius_space

F = Fraction


def even_element(L, rng):
    return [F(rng.randint(-2, 2)) if L.space.parity(i) == 0 else F(0) for i in range(L.dim)]


def odd_element(L, rng):
    return [F(rng.randint(-2, 2)) if L.space.parity(i) == 1 else F(0) for i in range(L.dim)]


def mat(rows):
    return [[F(x) for x in r] for r in rows]


@pytest.fixture(params=range(6))
def model(request):
    return nilpotent_model(request.param), random.Random(request.param)


# -- algebra and MC ---------------------------------------------------------

def test_models_are_nilpotent_dg_lie(model):
    L, _ = model
    assert check_lie_axioms(L).passed


def test_zero_is_mc(model):
    L, _ = model
    assert check_mc(MCElement(L, L.zero())).passed


def test_master_equation_against_matrix_square(model):
    # in the matrix model d = [delta, -], so dx + 1/2 [x, x] = (delta + X)^2
    L, rng = model
    D = L.to_matrix(list(L.delta))
    candidates = [solve_mc_from_gauge(L, even_element(L, rng)).x]
    candidates += [odd_element(L, rng) for _ in range(10)]
    for x in candidates:
        T = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(D, L.to_matrix(x))]
        square_zero = not any(any(r) for r in mat_mul(T, T))
        assert check_mc(MCElement(L, x)).passed == square_zero
    assert check_mc(MCElement(L, candidates[0])).passed


def test_abelian_mc_iff_closed():
    V, _ = random_dga(2)
    L = abelian_dgla(V)
    rng = random.Random(0)
    for _ in range(20):
        x = odd_element(L, rng)
        closed = not any(L.dif(x))
        assert check_mc(MCElement(L, x)).passed == closed
    # d xi is always closed
    xi = even_element(L, rng)
    assert check_mc(MCElement(L, L.dif(xi))).passed


def test_gauge_agrees_with_conjugation(model):
    L, rng = model
    x = solve_mc_from_gauge(L, even_element(L, rng))
    for _ in range(3):
        xi = even_element(L, rng)
        y = gauge(xi, x)
        assert y.x == gauge_by_conjugation(xi, x)
        assert check_mc(y).passed


def test_gauge_by_zero_is_identity(model):
    L, rng = model
    x = solve_mc_from_gauge(L, even_element(L, rng))
    assert gauge(L.zero(), x).x == x.x


def test_abelian_gauge_subtracts_d_xi():
    V, _ = random_dga(4)
    L = abelian_dgla(V)
    rng = random.Random(1)
    xi = even_element(L, rng)
    x = MCElement(L, L.dif(even_element(L, rng)))
    assert gauge(xi, x).x == [a - b for a, b in zip(x.x, L.dif(xi))]


def test_gauge_parameter_must_be_even(model):
    L, rng = model
    xi = L.zero()
    xi[L.space.parities.index(1)] = F(1)
    with pytest.raises(ValueError):
        gauge(xi, MCElement(L, L.zero()))


def test_gauge_is_a_group_action_via_bch(model):
    L, rng = model
    x = solve_mc_from_gauge(L, even_element(L, rng))
    a, b = even_element(L, rng), even_element(L, rng)
    assert gauge(a, gauge(b, x)).x == gauge(bch(L, a, b), x).x


def test_bch_matches_matrix_logarithm(model):
    L, rng = model
    a, b = even_element(L, rng), even_element(L, rng)
    want = matrix_log(mat_mul(matrix_exp(L.to_matrix(a)), matrix_exp(L.to_matrix(b))))
    assert L.to_matrix(bch(L, a, b)) == want


def test_matrix_log_inverts_exp():
    N = mat([[0, 1, 2, 3], [0, 0, 4, 5], [0, 0, 0, 6], [0, 0, 0, 0]])
    assert matrix_log(matrix_exp(N)) == N


# -- Sullivan paths ----------------------------------------------------------

def test_sullivan_path_from_gauge(model):
    L, rng = model
    x0 = solve_mc_from_gauge(L, even_element(L, rng))
    xi = even_element(L, rng)
    x1 = gauge(xi, x0)
    path = sullivan_from_gauge(xi, x0)
    assert check_sullivan(path, x0.x, x1.x).passed
    # pointwise: every x(z) is itself an MC element
    for z in (F(-1), F(1, 3), F(2)):
        xz = [sum((c[i] * z ** k for k, c in enumerate(path.x)), F(0)) for i in range(L.dim)]
        assert check_mc(MCElement(L, xz)).passed


def test_sullivan_mutation_is_caught():
    checked = 0
    for seed in range(6):
        L, rng = nilpotent_model(seed), random.Random(seed)
        x0 = solve_mc_from_gauge(L, even_element(L, rng))
        path = sullivan_from_gauge(even_element(L, rng), x0)
        if len(path.x) < 2:
            continue
        bumped = [list(c) for c in path.x]
        bumped[1][L.space.parities.index(1)] += 1
        assert not check_sullivan(PolyPath(L, bumped, path.y)).passed
        checked += 1
    assert checked


def test_zero_xi_gives_constant_path(model):
    L, rng = model
    x0 = solve_mc_from_gauge(L, even_element(L, rng))
    path = sullivan_from_gauge(L.zero(), x0)
    assert all(not any(c) for c in path.x[1:])
    assert path.x[0] == x0.x


def test_abelian_sullivan_path_is_linear():
    V, _ = random_dga(4)
    L = abelian_dgla(V)
    rng = random.Random(2)
    x0 = MCElement(L, L.dif(even_element(L, rng)))
    xi = even_element(L, rng)
    path = sullivan_from_gauge(xi, x0)
    assert path.x[0] == x0.x
    assert path.x[1] == [-c for c in L.dif(xi)]
    assert all(not any(c) for c in path.x[2:])
    assert check_sullivan(path, x0.x).passed


# -- path-ordered exponential --------------------------------------------------

R3 = MatrixRing(3)
A3 = mat([[0, 1, 0], [0, 0, 2], [0, 0, 0]])
B3 = mat([[0, 0, 3], [0, 0, 1], [0, 0, 0]])


def test_constant_path_is_exponential():
    g = path_ordered_exp(R3, [A3])
    assert g == poly_exp(R3, [R3.zero(), A3])
    assert check_transport(R3, [A3], g).passed


def test_commuting_path_is_exp_of_integral():
    A2 = mat_mul(A3, A3)
    y = [A3, A2]
    g = path_ordered_exp(R3, y)
    assert g == poly_exp(R3, poly_integrate(R3, y))


def test_noncommuting_path():
    y = [A3, mat([[0, 5, 0], [0, 0, -1], [0, 0, 0]])]
    assert mat_mul(y[0], y[1]) != mat_mul(y[1], y[0])
    g = path_ordered_exp(R3, y)
    assert check_transport(R3, y, g).passed
    assert g != poly_exp(R3, poly_integrate(R3, y))
    assert poly_eval(R3, g, 0) == R3.one()


def test_transport_solution_is_unique():
    rng = random.Random(3)
    R = MatrixRing(4)
    for _ in range(5):
        y = [[[F(rng.randint(-2, 2)) if j > i else F(0) for j in range(4)] for i in range(4)]
             for _ in range(3)]
        g = path_ordered_exp(R, y)
        assert g == solve_transport(R, y, len(g) + 3)
        assert check_transport(R, y, g).passed


def test_bad_transport_is_reported():
    g = path_ordered_exp(R3, [A3, B3])
    bad = [list(map(list, c)) for c in g]
    bad[1][0][2] += 1
    assert not check_transport(R3, [A3, B3], bad).passed


def test_grouplike_in_free_algebra():
    Fr = FreeTensorAlgebra(2, 4)
    assert grouplike_check(Fr, [Fr.one()]).passed
    single = path_ordered_exp(Fr, [Fr.gen(0)])
    assert single == poly_exp(Fr, [Fr.zero(), Fr.gen(0)])
    assert grouplike_check(Fr, single).passed
    g = path_ordered_exp(Fr, [Fr.gen(0), Fr.gen(1)])
    assert grouplike_check(Fr, g).passed
    bumped = [dict(c) for c in g]
    bumped[2] = Fr.add(bumped[2], {(0, 0): F(1)})
    assert not grouplike_check(Fr, bumped).passed


def test_coproduct_of_a_word():
    Fr = FreeTensorAlgebra(2, 4)
    cop = Fr.coproduct({(0, 1): F(1)})
    assert cop == {((0, 1), ()): 1, ((1,), (0,)): 1, ((0,), (1,)): 1, ((), (0, 1)): 1}


# -- operator homotopies --------------------------------------------------------

def test_operator_product_sign():
    V = GradedSpace([("a", 0), ("b", 1)])
    B = GradedMap(V, V, 1, {(1, 0): 1})
    dz = OperatorDzElement.const(identity(V), e=1)
    b = OperatorDzElement.const(B)
    # dz passes the odd operator B
    assert dz * b == -(b * dz)


@pytest.mark.parametrize("seed", range(10))
def test_bvhat_homotopy_on_random_hodge_data(seed):
    V, _ = random_dga(seed)
    assert verify_bvhat_homotopy(canonical_hodge(V)).passed
    W, ip = random_frobenius_space(seed)
    assert verify_bvhat_homotopy(cyclic_hodge(W, ip)).passed


def test_bvhat_trivial_hodge():
    V, _ = random_dga(1)
    assert verify_bvhat_homotopy(trivial_hodge(V)).passed


def test_bvhat_perturbed_s_fails():
    V, _ = next(random_dga(s) for s in range(200)
                if random_dga(s)[0].dim == 4 and len(set(random_dga(s)[0].space.parities)) == 2)
    h = canonical_hodge(V)
    n = V.dim
    i, j = next((i, j) for i in range(n) for j in range(n)
                if V.space.parity(i) != V.space.parity(j))
    bad = h.with_s(h.s + GradedMap(V.space, V.space, 1, {(i, j): 1}))
    assert not verify_bvhat_homotopy(bad).passed


def test_dual_gauge_homotopy_distinct():
    M = grassmann_datum()
    S, S2 = seeded_contraction(M, 0).s, seeded_contraction(M, 1).s
    assert S != S2
    assert verify_dual_gauge_homotopy(M.base, S, S2).passed


def test_dual_gauge_homotopy_same():
    M = grassmann_datum()
    S = seeded_contraction(M, 0).s
    assert verify_dual_gauge_homotopy(M.base, S, S).passed


def test_two_dim_space_has_one_square_zero_homotopy():
    # d eps = 1: S 1 = eps and S eps = c 1 for any c, and S^2 = c
    M = exterior_datum()
    V = M.space
    S = cyclic_hodge(M.base, M.ip).s
    odd, even = (0, 1) if V.parity(0) else (1, 0)
    other = S + GradedMap(V, V, 1, {(even, odd): 1})
    assert compose(M.base.d, other) + compose(other, M.base.d) == identity(V)
    assert not compose(other, other).is_zero()
    rep = verify_dual_gauge_homotopy(M.base, S, other)
    assert not rep.passed
    assert [c.name for c in rep.failures()] == ["S'^2 = 0"]


def test_dual_gauge_rejects_non_homotopy():
    M = grassmann_datum()
    S = seeded_contraction(M, 0).s
    rep = verify_dual_gauge_homotopy(M.base, S, S + S)
    assert not rep.passed
    assert "[d, S'] = 1" in [c.name for c in rep.failures()]


def test_contractible_random_space():
    V = GradedSpace([("x", 1), ("y", 0)])
    base = DgSpace(V, GradedMap(V, V, 1, {(1, 0): 1}))
    S = GradedMap(V, V, 1, {(0, 1): 1})
    assert verify_dual_gauge_homotopy(base, S, S).passed
