"""
Maurer-Cartan theory in nilpotent dg Lie algebras: the master equation,
the gauge action, Sullivan homotopies, path-ordered exponentials and the
two operator-level homotopies between contracting data.

Elements of a Lie algebra are dense coordinate vectors of Fractions.
Polynomials in z are lists of coefficients, lowest degree first.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial

from .exactlin import GradedMap, GradedSpace, MultiMap, compose, identity, mat_mul
from .hodge import DgSpace, HodgeData
from .models import MatrixAlgebra, SHAPES
from .report import Report


def _zero(n):
    return [Fraction(0)] * n


def _add(x, y):
    return [a + b for a, b in zip(x, y)]


def _sub(x, y):
    return [a - b for a, b in zip(x, y)]


def _scale(c, x):
    return [c * a for a in x]


def _vec_parity(V: GradedSpace, x):
    ps = {V.parity(i) for i, c in enumerate(x) if c}
    if len(ps) > 1:
        raise ValueError("element is not homogeneous")
    return ps.pop() if ps else 0


# ---------------------------------------------------------------------------
# nilpotent dg Lie algebras

@dataclass
class NilpotentDgLie:
    """Bracket on L itself (not on Pi L), even and graded-antisymmetric;
    every ``nilpotency``-fold nested bracket vanishes."""

    space: GradedSpace
    bracket: MultiMap
    d: GradedMap
    nilpotency: int
    matrix_model: MatrixAlgebra = None
    delta: tuple = None

    @property
    def dim(self):
        return self.space.dim

    def zero(self):
        return _zero(self.dim)

    def br(self, x, y):
        out = _zero(self.dim)
        for ((k,), (i, j)), c in self.bracket.entries.items():
            if x[i] and y[j]:
                out[k] += c * x[i] * y[j]
        return out

    def dif(self, x):
        return self.d.apply(x)

    def ad_power_series(self, xi, x, coeff):
        """sum_k coeff(k) (ad xi)^k x, stopping when the iterate vanishes."""
        out = _zero(self.dim)
        cur = list(x)
        k = 0
        while any(cur):
            out = _add(out, _scale(coeff(k), cur))
            cur = self.br(xi, cur)
            k += 1
            if k > self.nilpotency + self.dim:
                raise ValueError("ad xi is not nilpotent")
        return out

    # matrix model conversions
    def to_matrix(self, x):
        alg = self.matrix_model
        n = alg.n
        M = [[Fraction(0)] * n for _ in range(n)]
        for k, (i, j) in enumerate(alg.units):
            M[i][j] += x[k]
        return M

    def from_matrix(self, M):
        alg = self.matrix_model
        out = _zero(self.dim)
        for k, (i, j) in enumerate(alg.units):
            out[k] = M[i][j]
        back = self.to_matrix(out)
        if back != [list(r) for r in M]:
            raise ValueError("matrix is outside the model")
        return out


def check_lie_axioms(L: NilpotentDgLie) -> Report:
    V = L.space
    n = L.dim
    rep = Report("nilpotent dg Lie axioms")
    e = [[Fraction(int(k == i)) for k in range(n)] for i in range(n)]
    rep.add("d odd", L.d.is_zero() or L.d.parity == 1)
    rep.add("d^2 = 0", compose(L.d, L.d).is_zero())
    anti = jac = der = True
    for i, j in itertools.product(range(n), repeat=2):
        pi, pj = V.parity(i), V.parity(j)
        ij = L.br(e[i], e[j])
        ji = L.br(e[j], e[i])
        if ij != _scale(-(-1) ** (pi * pj), ji):
            anti = False
        lhs = L.dif(ij)
        rhs = _add(L.br(L.dif(e[i]), e[j]), _scale((-1) ** pi, L.br(e[i], L.dif(e[j]))))
        if lhs != rhs:
            der = False
        for k in range(n):
            # [a,[b,c]] = [[a,b],c] + (-1)^{|a||b|} [b,[a,c]]
            l = L.br(e[i], L.br(e[j], e[k]))
            r = _add(L.br(ij, e[k]), _scale((-1) ** (pi * pj), L.br(e[j], L.br(e[i], e[k]))))
            if l != r:
                jac = False
    rep.add("graded antisymmetry", anti)
    rep.add("graded Jacobi", jac)
    rep.add("d is a derivation", der)
    # nested brackets of length nilpotency vanish
    layer = [v for v in e if any(v)]
    for _ in range(L.nilpotency - 1):
        layer = [w for w in (L.br(a, b) for a in e for b in layer) if any(w)]
    rep.add("%d-fold brackets vanish" % L.nilpotency, not layer)
    return rep


def matrix_dgla(alg: MatrixAlgebra, delta) -> NilpotentDgLie:
    """Supercommutator bracket on the span of ``alg`` with d = [delta, -]."""
    V = alg.space
    n = len(alg.units)
    ent = {}
    for a in range(n):
        for b in range(n):
            sg = -1 if alg.unit_parity(a) and alg.unit_parity(b) else 1
            c = alg.product(a, b)
            if c is not None:
                ent[((c,), (a, b))] = ent.get(((c,), (a, b)), 0) + 1
            c = alg.product(b, a)
            if c is not None:
                ent[((c,), (a, b))] = ent.get(((c,), (a, b)), 0) - sg
    ent = {k: Fraction(v) for k, v in ent.items() if v}
    D = alg.inner_derivation(list(delta))
    d = GradedMap.from_matrix(V, V, 1, D)
    return NilpotentDgLie(V, MultiMap(V, V, 2, 1, 0, ent), d, alg.n, alg, tuple(delta))


def abelian_dgla(base: DgSpace) -> NilpotentDgLie:
    """Zero bracket on a dg space."""
    V = base.space
    return NilpotentDgLie(V, MultiMap(V, V, 2, 1, 0, {}), base.d, 2)


def nilpotent_model(seed: int = 0, size: int = 4) -> NilpotentDgLie:
    """Strictly upper-triangular size x size super-matrices, d = [delta, -] for
    a seeded odd square-zero delta (which need not lie in the algebra)."""
    rng = random.Random(seed)
    units = [(i, j) for i in range(size) for j in range(i + 1, size)]
    SHAPES.setdefault("nil%d" % size, units)
    while True:
        ipar = [rng.randint(0, 1) for _ in range(size)]
        if len(set(ipar)) == 2:
            break
    alg = MatrixAlgebra("nil%d" % size, ipar)
    delta = alg.odd_square_zero(rng)
    return matrix_dgla(alg, delta)


# ---------------------------------------------------------------------------
# Maurer-Cartan elements and the gauge action

@dataclass
class MCElement:
    algebra: NilpotentDgLie
    x: list

    def residual(self):
        L = self.algebra
        return _add(L.dif(self.x), _scale(Fraction(1, 2), L.br(self.x, self.x)))


def check_mc(m: MCElement) -> Report:
    rep = Report("master equation")
    par = _vec_parity(m.algebra.space, m.x)
    rep.add("x is odd", par == 1 or not any(m.x))
    r = m.residual()
    bad = next((m.algebra.space.names[i] for i, c in enumerate(r) if c), None)
    rep.add("dx + 1/2 [x,x] = 0", bad is None, "" if bad is None else "nonzero at %s" % bad)
    return rep


def gauge(xi, m: MCElement) -> MCElement:
    """e^{ad xi} x - sum_k (ad xi)^k / (k+1)! (d xi)."""
    L = m.algebra
    if _vec_parity(L.space, xi):
        raise ValueError("gauge parameter must be even")
    head = L.ad_power_series(xi, m.x, lambda k: Fraction(1, factorial(k)))
    tail = L.ad_power_series(xi, L.dif(xi), lambda k: Fraction(1, factorial(k + 1)))
    return MCElement(L, _sub(head, tail))


def gauge_by_conjugation(xi, m: MCElement):
    """Oracle in the matrix model: e^xi (delta + x) e^-xi - delta."""
    L = m.algebra
    X = L.to_matrix(xi)
    g = matrix_exp(X)
    ginv = matrix_exp([[-c for c in r] for r in X])
    D = L.to_matrix(list(L.delta))
    T = [[a + b for a, b in zip(r1, r2)] for r1, r2 in zip(D, L.to_matrix(m.x))]
    out = mat_mul(mat_mul(g, T), ginv)
    return L.from_matrix([[a - b for a, b in zip(r1, r2)] for r1, r2 in zip(out, D)])


def solve_mc_from_gauge(L: NilpotentDgLie, xi) -> MCElement:
    """The gauge transform of x = 0: an MC element by construction."""
    return gauge(xi, MCElement(L, L.zero()))


# ---------------------------------------------------------------------------
# exact matrix exponential and logarithm for nilpotent matrices

def _mat_identity(n):
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def _mat_add(A, B, c=1):
    return [[a + c * b for a, b in zip(r1, r2)] for r1, r2 in zip(A, B)]


def matrix_exp(X):
    n = len(X)
    out = _mat_identity(n)
    term = _mat_identity(n)
    for k in range(1, n + 2):
        term = [[c / k for c in r] for r in mat_mul(term, X)]
        if not any(any(r) for r in term):
            break
        out = _mat_add(out, term)
    else:
        raise ValueError("matrix is not nilpotent")
    return out


def matrix_log(G):
    """log of a unipotent matrix."""
    n = len(G)
    N = _mat_add(G, _mat_identity(n), -1)
    out = [[Fraction(0)] * n for _ in range(n)]
    term = _mat_identity(n)
    for k in range(1, n + 2):
        term = mat_mul(term, N)
        if not any(any(r) for r in term):
            break
        out = _mat_add(out, term, Fraction((-1) ** (k + 1), k))
    else:
        raise ValueError("matrix is not unipotent")
    return out


# ---------------------------------------------------------------------------
# truncated free tensor algebra

class FreeTensorAlgebra:
    """Words in even generators 0..r-1 up to length ``max_degree``; elements
    are dicts word -> coefficient.  The coproduct makes generators primitive."""

    def __init__(self, generators: int, max_degree: int):
        self.r = generators
        self.N = max_degree

    def one(self):
        return {(): Fraction(1)}

    def zero(self):
        return {}

    def gen(self, i):
        return {(i,): Fraction(1)}

    def add(self, a, b, c=1):
        out = dict(a)
        for w, v in b.items():
            out[w] = out.get(w, 0) + c * v
        return {w: v for w, v in out.items() if v}

    def scale(self, c, a):
        return {w: c * v for w, v in a.items() if c * v}

    def mul(self, a, b):
        out = {}
        for w1, v1 in a.items():
            for w2, v2 in b.items():
                if len(w1) + len(w2) <= self.N:
                    w = w1 + w2
                    out[w] = out.get(w, 0) + v1 * v2
        return {w: v for w, v in out.items() if v}

    def is_zero(self, a):
        return not any(a.values())

    def coproduct(self, a):
        """Unshuffle coproduct, as dict (w1, w2) -> coefficient."""
        out = {}
        for w, v in a.items():
            n = len(w)
            for mask in range(1 << n):
                left = tuple(w[k] for k in range(n) if mask >> k & 1)
                right = tuple(w[k] for k in range(n) if not mask >> k & 1)
                out[(left, right)] = out.get((left, right), 0) + v
        return {k: v for k, v in out.items() if v}

    def tensor(self, a, b):
        out = {}
        for w1, v1 in a.items():
            for w2, v2 in b.items():
                if len(w1) + len(w2) <= self.N:
                    out[(w1, w2)] = out.get((w1, w2), 0) + v1 * v2
        return {k: v for k, v in out.items() if v}


class MatrixRing:
    """Square matrices as an algebra for path-ordered exponentials."""

    def __init__(self, n):
        self.n = n

    def one(self):
        return _mat_identity(self.n)

    def zero(self):
        return [[Fraction(0)] * self.n for _ in range(self.n)]

    def add(self, a, b, c=1):
        return _mat_add(a, b, c)

    def scale(self, c, a):
        return [[c * x for x in r] for r in a]

    def mul(self, a, b):
        return mat_mul(a, b)

    def is_zero(self, a):
        return not any(any(r) for r in a)


# ---------------------------------------------------------------------------
# polynomials with coefficients in an algebra

def poly_eval(R, p, z):
    out = R.zero()
    zk = Fraction(1)
    for c in p:
        out = R.add(out, R.scale(zk, c))
        zk *= z
    return out


def poly_mul(R, p, q):
    if not p or not q:
        return []
    out = [R.zero() for _ in range(len(p) + len(q) - 1)]
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] = R.add(out[i + j], R.mul(a, b))
    return out


def poly_integrate(R, p):
    """Antiderivative vanishing at 0."""
    return [R.zero()] + [R.scale(Fraction(1, k + 1), c) for k, c in enumerate(p)]


def poly_derivative(R, p):
    return [R.scale(Fraction(k), c) for k, c in enumerate(p)][1:]


def poly_trim(R, p):
    p = list(p)
    while p and R.is_zero(p[-1]):
        p.pop()
    return p


def poly_exp(R, p, max_terms: int = 64):
    """exp of a polynomial with nilpotent coefficients, sum_k p^k / k!."""
    total = [R.one()]
    cur = [R.one()]
    for k in range(1, max_terms):
        cur = poly_trim(R, [R.scale(Fraction(1, k), c) for c in poly_mul(R, cur, p)])
        if not cur:
            return poly_trim(R, total)
        total = [R.add(a, b) for a, b in itertools.zip_longest(
            total, cur, fillvalue=R.zero())]
    raise ValueError("exponential did not terminate")


def path_ordered_exp(R, y, max_terms: int = 64):
    """1 + sum_n of iterated integrals of y(t_n) ... y(t_1) over
    0 <= t_1 <= ... <= t_n <= z, via I_n = int_0^z y I_{n-1}."""
    total = [R.one()]
    cur = [R.one()]
    for _ in range(max_terms):
        cur = poly_trim(R, poly_integrate(R, poly_mul(R, y, cur)))
        if not cur:
            return poly_trim(R, total)
        total = [R.add(a, b) for a, b in itertools.zip_longest(
            total, cur, fillvalue=R.zero())]
    raise ValueError("path-ordered exponential did not terminate")


def solve_transport(R, y, degree: int):
    """Degree-by-degree solution of g' = y g, g(0) = 1, up to z^degree."""
    g = [R.one()]
    for k in range(degree):
        acc = R.zero()
        for i in range(k + 1):
            if i < len(y) and k - i < len(g):
                acc = R.add(acc, R.mul(y[i], g[k - i]))
        g.append(R.scale(Fraction(1, k + 1), acc))
    return poly_trim(R, g)


def check_transport(R, y, g) -> Report:
    rep = Report("path-ordered exponential")
    lhs = poly_derivative(R, g)
    rhs = poly_mul(R, y, g)
    diff = poly_trim(R, [R.add(a, b, -1) for a, b in itertools.zip_longest(
        lhs, rhs, fillvalue=R.zero())])
    rep.add("d/dz g = y g", not diff, "" if not diff else "first bad degree %d" % len(diff))
    rep.add("g(0) = 1", R.add(g[0], R.one(), -1) == R.zero() or R.is_zero(R.add(g[0], R.one(), -1)))
    return rep


def grouplike_check(F: FreeTensorAlgebra, g) -> Report:
    """Delta g(z) = g(z) (x) g(z) coefficientwise in z, through word length N."""
    rep = Report("group-like")
    deg = len(g)
    bad = None
    for k in range(2 * deg):
        lhs = F.coproduct(g[k]) if k < deg else {}
        rhs = {}
        for i in range(max(0, k - deg + 1), min(k, deg - 1) + 1):
            for key, v in F.tensor(g[i], g[k - i]).items():
                rhs[key] = rhs.get(key, 0) + v
        lhs = {kk: v for kk, v in lhs.items() if len(kk[0]) + len(kk[1]) <= F.N}
        diff = {kk: lhs.get(kk, 0) - rhs.get(kk, 0) for kk in set(lhs) | set(rhs)}
        if any(diff.values()):
            bad = k
            break
    rep.add("Delta g = g (x) g up to length %d" % F.N, bad is None,
            "" if bad is None else "fails at z^%d" % bad)
    return rep


# ---------------------------------------------------------------------------
# Baker-Campbell-Hausdorff

def _nested(L: NilpotentDgLie, word, gens):
    """[g_{w1}, [g_{w2}, ... g_{wn}]]."""
    cur = gens[word[-1]]
    for i in reversed(word[:-1]):
        cur = L.br(gens[i], cur)
    return cur


def bch(L: NilpotentDgLie, a, b, order: int = None):
    """log(e^a e^b) for even a, b through words of length ``order``
    (the nilpotency bound by default), using the Dynkin projection of the
    free-algebra logarithm."""
    N = order if order is not None else L.nilpotency
    F = FreeTensorAlgebra(2, N)
    ea = _free_exp(F, F.gen(0))
    eb = _free_exp(F, F.gen(1))
    lg = _free_log(F, F.mul(ea, eb))
    out = L.zero()
    gens = [a, b]
    for w, c in sorted(lg.items()):
        if w:
            out = _add(out, _scale(c / len(w), _nested(L, w, gens)))
    return out


def _free_exp(F, x):
    out = F.one()
    term = F.one()
    for k in range(1, F.N + 1):
        term = F.scale(Fraction(1, k), F.mul(term, x))
        out = F.add(out, term)
    return out


def _free_log(F, g):
    u = F.add(g, F.one(), -1)
    out = F.zero()
    term = F.one()
    for k in range(1, F.N + 1):
        term = F.mul(term, u)
        out = F.add(out, term, Fraction((-1) ** (k + 1), k))
    return out


# ---------------------------------------------------------------------------
# Sullivan homotopies

@dataclass
class PolyPath:
    """X = x(z) + y(z) dz with x odd-valued and y even-valued."""

    algebra: NilpotentDgLie
    x: list
    y: list


def _vpoly_eval(L, p, z):
    out = L.zero()
    zk = Fraction(1)
    for c in p:
        out = _add(out, _scale(zk, c))
        zk *= z
    return out


def sullivan_from_gauge(xi, x0: MCElement) -> PolyPath:
    """x(z) = e^{z ad xi} x0 - sum_k z^{k+1} (ad xi)^k (d xi)/(k+1)!, y = xi."""
    L = x0.algebra
    xs = []
    cur = list(x0.x)
    k = 0
    while any(cur):
        xs.append(_scale(Fraction(1, factorial(k)), cur))
        cur = L.br(xi, cur)
        k += 1
    tail = [L.zero()]
    cur = L.dif(xi)
    k = 0
    while any(cur):
        tail.append(_scale(Fraction(-1, factorial(k + 1)), cur))
        cur = L.br(xi, cur)
        k += 1
    n = max(len(xs), len(tail))
    x = [_add(xs[i] if i < len(xs) else L.zero(), tail[i] if i < len(tail) else L.zero())
         for i in range(n)]
    return PolyPath(L, x, [list(xi)])


def check_sullivan(path: PolyPath, x0=None, x1=None) -> Report:
    """[x~, x~] = 0 and d/dz x~ = [y, x~], written on x as
    dx + 1/2[x,x] = 0 and x' = -dy + [y, x], coefficientwise in z."""
    L = path.algebra
    rep = Report("Sullivan homotopy")
    x, y = path.x, path.y
    deg = len(x) + len(y)
    # homotop1
    bad = None
    for k in range(2 * max(len(x), 1)):
        acc = L.dif(x[k]) if k < len(x) else L.zero()
        for i in range(len(x)):
            j = k - i
            if 0 <= j < len(x):
                acc = _add(acc, _scale(Fraction(1, 2), L.br(x[i], x[j])))
        if any(acc):
            bad = k
            break
    rep.add("[x~(z), x~(z)] = 0", bad is None, "" if bad is None else "fails at z^%d" % bad)
    bad = None
    for k in range(deg + 1):
        lhs = _scale(Fraction(k + 1), x[k + 1]) if k + 1 < len(x) else L.zero()
        rhs = _scale(-1, L.dif(y[k])) if k < len(y) else L.zero()
        for i in range(len(y)):
            j = k - i
            if 0 <= j < len(x):
                rhs = _add(rhs, L.br(y[i], x[j]))
        if lhs != rhs:
            bad = k
            break
    rep.add("d/dz x~(z) = [y(z), x~(z)]", bad is None, "" if bad is None else "fails at z^%d" % bad)
    if x0 is not None:
        rep.add("x(0) = x0", _vpoly_eval(L, x, 0) == list(x0))
    if x1 is not None:
        rep.add("x(1) = x1", _vpoly_eval(L, x, 1) == list(x1))
    return rep


# ---------------------------------------------------------------------------
# operators with coefficients in k[z, dz]

class OperatorDzElement:
    """Sum of terms A (x) z^k dz^e with A a homogeneous operator on V.

    Product: (A (x) f)(B (x) g) = (-1)^{|f||B|} AB (x) fg.
    Differential: D(A (x) f) = [d, A] (x) f + (-1)^{|A|} A (x) df.
    """

    def __init__(self, space: GradedSpace, terms=None):
        self.space = space
        self.terms = {}
        for key, A in (terms or {}).items():
            self._acc(key, A)

    def _acc(self, key, A):
        k, e, p = key
        if e > 1:
            return
        if A.is_zero():
            return
        old = self.terms.get(key)
        new = A if old is None else old + A
        if new.is_zero():
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    @classmethod
    def const(cls, A: GradedMap, k=0, e=0):
        p = A.parity if not A.is_zero() else 0
        return cls(A.source, {(k, e, p): A})

    def __add__(self, other):
        out = OperatorDzElement(self.space, self.terms)
        for key, A in other.terms.items():
            out._acc(key, A)
        return out

    def __neg__(self):
        return OperatorDzElement(self.space, {k: -A for k, A in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = OperatorDzElement(self.space)
        for (k1, e1, p1), A in self.terms.items():
            for (k2, e2, p2), B in other.terms.items():
                if e1 + e2 > 1:
                    continue
                sg = -1 if e1 and p2 else 1
                AB = compose(A, B)
                out._acc((k1 + k2, e1 + e2, (p1 + p2) % 2), AB if sg == 1 else -AB)
        return out

    def differential(self, d: GradedMap):
        out = OperatorDzElement(self.space)
        for (k, e, p), A in self.terms.items():
            comm = compose(d, A) - (compose(A, d) if p == 0 else -compose(A, d))
            out._acc((k, e, (p + 1) % 2), comm)
            if e == 0 and k > 0:
                term = Fraction(k) * A
                out._acc((k - 1, 1, p), -term if p else term)
        return out

    def at(self, z) -> GradedMap:
        """Specialise z and set dz = 0."""
        acc = None
        for (k, e, p), A in self.terms.items():
            if e:
                continue
            term = (Fraction(z) ** k) * A
            if term.is_zero():
                continue
            acc = term if acc is None or acc.is_zero() else acc + term
        return acc if acc is not None else GradedMap(self.space, self.space, 0, {})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (self - other).is_zero()

    def first_term(self):
        if not self.terms:
            return None
        key = min(self.terms)
        return key, self.terms[key]


def _maps_equal(A: GradedMap, B: GradedMap) -> bool:
    return A.entries == B.entries


def verify_bvhat_homotopy(h: HodgeData) -> Report:
    """u(s) = S(1 - z^2), u(t) = T + (1 - T) z - S dz satisfy
    D u(s) = 1 - u(t)^2 and D u(t) = 0, with the expected endpoints."""
    rep = Report("operator homotopy for two generators s, t")
    V = h.space
    d, S, T = h.d, h.s, h.t
    I = identity(V)
    one = OperatorDzElement.const(I)
    us = OperatorDzElement.const(S) - OperatorDzElement.const(S, k=2)
    ut = (OperatorDzElement.const(T) + OperatorDzElement.const(I - T, k=1)
          - OperatorDzElement.const(S, e=1))
    lhs = us.differential(d)
    rhs = one - ut * ut
    diff = lhs - rhs
    ft = diff.first_term()
    rep.add("D u(s) = 1 - u(t)^2", diff.is_zero(),
            "" if ft is None else "first bad term z^%d dz^%d" % ft[0][:2])
    dt = ut.differential(d)
    ft = dt.first_term()
    rep.add("D u(t) = 0", dt.is_zero(), "" if ft is None else "first bad term z^%d dz^%d" % ft[0][:2])
    rep.add("u(s)|z=0 = S", _maps_equal(us.at(0), S))
    rep.add("u(t)|z=0 = T", _maps_equal(ut.at(0), T))
    rep.add("u(s)|z=1 = 0", us.at(1).is_zero())
    rep.add("u(t)|z=1 = 1", _maps_equal(ut.at(1), I))
    return rep


def verify_dual_gauge_homotopy(base: DgSpace, S: GradedMap, S2: GradedMap) -> Report:
    """h(s) = S + (S' - S)(z - S dz): D h(s) = 1 with endpoints S and S'."""
    rep = Report("gauge homotopy between contracting homotopies")
    V = base.space
    d = base.d
    I = identity(V)
    for name, X in (("S", S), ("S'", S2)):
        ok = compose(d, X) + compose(X, d) == I
        rep.add("[d, %s] = 1" % name, ok)
        rep.add("%s^2 = 0" % name, compose(X, X).is_zero())
    if not rep.passed:
        return rep
    diff = S2 - S
    h = (OperatorDzElement.const(S) + OperatorDzElement.const(diff, k=1)
         - OperatorDzElement.const(compose(diff, S), e=1))
    Dh = h.differential(d) - OperatorDzElement.const(I)
    ft = Dh.first_term()
    rep.add("D h(s) = 1", Dh.is_zero(), "" if ft is None else "first bad term z^%d dz^%d" % ft[0][:2])
    rep.add("h(s)|z=0 = S", _maps_equal(h.at(0), S))
    rep.add("h(s)|z=1 = S'", _maps_equal(h.at(1), S2))
    return rep
