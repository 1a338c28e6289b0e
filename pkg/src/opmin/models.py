"""
Seeded random inputs: dg associative and dg Lie algebras built inside
super-matrix algebras, written on the parity-reversed space with a random
parity-preserving change of basis.

A matrix unit E_ij of a super-matrix algebra has parity p_i + p_j; the
differential is the inner derivation by an odd square-zero element x,
d(a) = x a - (-1)^|a| a x.
"""

from __future__ import annotations

import random
from fractions import Fraction

from .exactlin import GradedMap, GradedSpace, MultiMap, compose, compose_tensor, inverse
from .hodge import DgSpace

# positions (i, j) spanning each algebra shape, 0-based
SHAPES = {
    "nil4": [(i, j) for i in range(4) for j in range(i + 1, 4)],
    "nil3": [(0, 1), (0, 2), (1, 2)],
    "upper3": [(i, j) for i in range(3) for j in range(i, 3)],
    "upper2": [(0, 0), (0, 1), (1, 1)],
    "full2": [(0, 0), (0, 1), (1, 0), (1, 1)],
    "borel3a": [(0, 0), (0, 1), (0, 2), (1, 2)],
    "borel3b": [(0, 0), (1, 1), (0, 1), (0, 2), (1, 2)],
    "borel3c": [(2, 2), (0, 1), (0, 2), (1, 2)],
}
ASSOC_SHAPES = ["nil4", "nil3", "upper3", "upper2", "full2"]
LIE_SHAPES = ["nil3", "borel3a", "borel3b", "borel3c", "upper2"]


def _size(shape):
    return 1 + max(max(p) for p in SHAPES[shape])


class MatrixAlgebra:
    """Span of the matrix units of ``shape`` with index parities ``ipar``."""

    def __init__(self, shape: str, ipar):
        self.shape = shape
        self.units = list(SHAPES[shape])
        self.ipar = tuple(ipar)
        self.n = _size(shape)
        self.pos = {u: k for k, u in enumerate(self.units)}
        self.space = GradedSpace(("E%d%d" % (i + 1, j + 1), (self.ipar[i] + self.ipar[j]) % 2)
                                 for i, j in self.units)

    def unit_parity(self, k):
        return self.space.parities[k]

    def product(self, a, b):
        """Structure constants of E_ij E_kl = delta_jk E_il, as {index: 1}."""
        (i, j), (k, l) = self.units[a], self.units[b]
        if j != k:
            return None
        return self.pos.get((i, l))

    def odd_square_zero(self, rng: random.Random, tries=200):
        """A random odd element x of the algebra with x^2 = 0 (coordinates)."""
        odd = [k for k in range(len(self.units)) if self.unit_parity(k)]
        if not odd:
            return [Fraction(0)] * len(self.units)
        for _ in range(tries):
            x = [Fraction(0)] * len(self.units)
            for k in odd:
                x[k] = Fraction(rng.randint(-2, 2))
            if all(v == 0 for v in x):
                continue
            if not any(self.mul_vec(x, x)):
                return x
        return [Fraction(0)] * len(self.units)

    def mul_vec(self, x, y):
        out = [Fraction(0)] * len(self.units)
        for a, xa in enumerate(x):
            if not xa:
                continue
            for b, yb in enumerate(y):
                if yb:
                    c = self.product(a, b)
                    if c is not None:
                        out[c] += xa * yb
        return out

    def inner_derivation(self, x):
        """Matrix of a -> x a - (-1)^|a| a x."""
        n = len(self.units)
        cols = []
        for a in range(n):
            e = [Fraction(int(k == a)) for k in range(n)]
            left = self.mul_vec(x, e)
            right = self.mul_vec(e, x)
            sg = -1 if self.unit_parity(a) else 1
            cols.append([left[k] - sg * right[k] for k in range(n)])
        return [[cols[j][i] for j in range(n)] for i in range(n)]


def _random_even_invertible(space: GradedSpace, rng: random.Random):
    """Random invertible parity-preserving integer matrix."""
    n = space.dim
    while True:
        M = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            for j in range(n):
                if space.parities[i] == space.parities[j]:
                    M[i][j] = Fraction(rng.randint(-1, 1) + (2 if i == j else 0))
        try:
            Minv = inverse(M)
        except ValueError:
            continue
        return M, Minv


def conjugate_structure(ops: dict, P: GradedMap, Pinv: GradedMap) -> dict:
    """Transport maps m_n on V to P m_n (Pinv)^{(x)n}."""
    return {n: compose(P, compose_tensor(m, [Pinv] * m.arity)) for n, m in ops.items()}


def random_change_of_basis(space: GradedSpace, rng: random.Random, names=None):
    M, Minv = _random_even_invertible(space, rng)
    new = GradedSpace(((names[k] if names else "v%d" % (k + 1)), space.parities[k])
                      for k in range(space.dim))
    return GradedMap.from_matrix(space, new, 0, M), GradedMap.from_matrix(new, space, 0, Minv)


def dga_on_pi(alg: MatrixAlgebra, d_matrix, m1_sign=-1):
    """(m1, m2) on Pi A for the dg algebra (alg, d).

    m2(Pi a, Pi b) = (-1)^|a| Pi(ab) and m1 = m1_sign * Pi d.
    """
    PA = GradedSpace((nm, 1 - p) for nm, p in alg.space.basis())
    n = len(alg.units)
    m2 = {}
    for a in range(n):
        for b in range(n):
            c = alg.product(a, b)
            if c is not None:
                m2[((c,), (a, b))] = Fraction(-1 if alg.unit_parity(a) else 1)
    d = {}
    for i in range(n):
        for j in range(n):
            if d_matrix[i][j]:
                d[((i,), (j,))] = m1_sign * d_matrix[i][j]
    return PA, GradedMap(PA, PA, 1, d), MultiMap(PA, PA, 2, 1, 1, m2)


def dgla_on_pi(alg: MatrixAlgebra, d_matrix, m1_sign=-1):
    """(m1, m2) on Pi L for the supercommutator bracket.

    m2(Pi a, Pi b) = (-1)^|a| Pi[a, b], graded-symmetric on Pi L.
    """
    PA = GradedSpace((nm, 1 - p) for nm, p in alg.space.basis())
    n = len(alg.units)
    m2 = {}
    for a in range(n):
        pa = alg.unit_parity(a)
        for b in range(n):
            pb = alg.unit_parity(b)
            sg = -1 if pa else 1
            c = alg.product(a, b)
            if c is not None:
                m2[((c,), (a, b))] = m2.get(((c,), (a, b)), 0) + sg
            c = alg.product(b, a)
            if c is not None:
                m2[((c,), (a, b))] = m2.get(((c,), (a, b)), 0) - sg * (-1 if pa and pb else 1)
    d = {}
    for i in range(n):
        for j in range(n):
            if d_matrix[i][j]:
                d[((i,), (j,))] = m1_sign * d_matrix[i][j]
    return PA, GradedMap(PA, PA, 1, d), MultiMap(PA, PA, 2, 1, 1, m2)


def _random_algebra(shapes, seed):
    rng = random.Random(seed)
    shape = shapes[rng.randrange(len(shapes))]
    ipar = [rng.randint(0, 1) for _ in range(_size(shape))]
    alg = MatrixAlgebra(shape, ipar)
    x = alg.odd_square_zero(rng)
    return rng, alg, alg.inner_derivation(x)


def random_dga(seed: int, conjugate: bool = True):
    """(DgSpace on Pi A, {2: m2}) for a seeded random dg associative algebra."""
    rng, alg, D = _random_algebra(ASSOC_SHAPES, seed)
    PA, m1, m2 = dga_on_pi(alg, D)
    ops = {1: m1, 2: m2}
    if conjugate:
        P, Pinv = random_change_of_basis(PA, rng)
        ops = conjugate_structure(ops, P, Pinv)
    return DgSpace(ops[1].source, ops[1]), {2: ops[2]}


def random_dgla(seed: int, conjugate: bool = True):
    """(DgSpace on Pi L, {2: m2}) for a seeded random dg Lie superalgebra."""
    rng, alg, D = _random_algebra(LIE_SHAPES, seed)
    PA, m1, m2 = dgla_on_pi(alg, D)
    ops = {1: m1, 2: m2}
    if conjugate:
        P, Pinv = random_change_of_basis(PA, rng)
        ops = conjugate_structure(ops, P, Pinv)
    return DgSpace(ops[1].source, ops[1]), {2: ops[2]}


def dgla_from_table(basis, bracket: dict, d: dict, m1_sign=-1):
    """(DgSpace on Pi L, {2: m2}) from structure constants.

    ``basis`` lists (name, parity) of L; ``bracket[(a, b)] = {c: coef}`` gives
    [e_a, e_b] for the listed ordered pairs, the rest follows from graded
    antisymmetry; ``d[a] = {c: coef}``.
    """
    L = GradedSpace(basis)
    PA = GradedSpace((nm, 1 - p) for nm, p in L.basis())
    full = {}
    for (a, b), out in bracket.items():
        sg = -1 if (L.parity(a) and L.parity(b)) else 1
        for c, v in out.items():
            full[(a, b, c)] = full.get((a, b, c), 0) + Fraction(v)
            if a != b:
                full[(b, a, c)] = full.get((b, a, c), 0) - sg * Fraction(v)
    m2 = {((c,), (a, b)): (-v if L.parity(a) else v) for (a, b, c), v in full.items()}
    m1 = {((c,), (a,)): m1_sign * Fraction(v) for a, out in d.items() for c, v in out.items()}
    return DgSpace(PA, GradedMap(PA, PA, 1, m1)), {2: MultiMap(PA, PA, 2, 1, 1, m2)}


def massey_dgla():
    """Five-dimensional dg Lie algebra whose homology span{a, b, w} has zero
    bracket but a nonzero triple bracket: [a,b]=c, du=c, [u,a]=w.  a is odd,
    so Pi a is even and the symmetric triple bracket on (a, b, a) survives."""
    basis = [("a", 1), ("b", 0), ("c", 1), ("u", 0), ("w", 1)]
    bracket = {(0, 1): {2: 1}, (3, 0): {4: 1}}
    return dgla_from_table(basis, bracket, {3: {2: 1}})


def random_frobenius_space(seed: int, max_dim: int = 8):
    """(DgSpace, InnerProduct) with <da,b> + (-1)^|a| <a,db> = 0, built from
    paired homology classes and acyclic blocks, then moved by a random
    parity-preserving change of basis."""
    from .hodge import InnerProduct
    rng = random.Random(seed)
    p = rng.randint(0, 1)
    names, pars, d, gram = [], [], {}, {}

    def new(par):
        names.append("b%d" % len(names))
        pars.append(par % 2)
        return len(names) - 1

    blocks = []
    budget = rng.randint(1, max_dim)
    while budget > 0:
        kinds = ["h"] if budget < 4 else ["h", "a4"]
        if p == 1 and budget >= 2:
            kinds.append("a2")
        if budget >= 2:
            kinds.append("h2")
        k = rng.choice(kinds)
        if k == "h" and p == 1:
            k = "h2" if budget >= 2 else None
        if k is None:
            break
        blocks.append(k)
        budget -= {"h": 1, "h2": 2, "a2": 2, "a4": 4}[k]
    for k in blocks:
        if k == "h":
            w = new(0)
            gram[(w, w)] = Fraction(rng.choice([1, 2, -1]))
        elif k == "h2":
            a = rng.randint(0, 1)
            w1, w2 = new(a), new(a + p)
            gram[(w1, w2)] = Fraction(1)
        elif k == "a2":
            x = new(1)
            y = new(0)
            d[(y, x)] = Fraction(1)
            gram[(y, x)] = Fraction(1)
        else:
            a = rng.randint(0, 1)
            x, y = new(a), new(a + 1)
            x2, y2 = new(p + a + 1), new(p + a)
            d[(y, x)] = Fraction(1)
            d[(y2, x2)] = Fraction(1)
            gram[(y, x2)] = Fraction(1)
            # <dx, x2> + (-1)^|x| <x, dx2> = 0
            gram[(x, y2)] = Fraction(-1 if a == 0 else 1)
    V = GradedSpace(zip(names, pars))
    dmap = GradedMap(V, V, 1, d)
    ip = InnerProduct.from_entries(V, p, gram)
    if not V.dim:
        return DgSpace(V, dmap), ip
    M, Minv = _random_even_invertible(V, rng)
    new_space = GradedSpace(("v%d" % (k + 1), V.parities[k]) for k in range(V.dim))
    D = GradedMap.from_matrix(new_space, new_space, 1, _mm(_mm(M, dmap.matrix()), Minv))
    G = ip.matrix()
    MinvT = [list(r) for r in zip(*Minv)]
    G2 = _mm(_mm(MinvT, G), Minv)
    ip2 = InnerProduct(new_space, p, tuple(tuple(r) for r in G2))
    return DgSpace(new_space, D), ip2


def _mm(A, B):
    from .exactlin import mat_mul
    return mat_mul(A, B)
