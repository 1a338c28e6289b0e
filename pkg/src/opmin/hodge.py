"""
Hodge decompositions (s, t) of dg spaces.

    s^2 = 0,  t^2 = t,  dt = td,  st = ts = 0,  ds + sd = id - t

The canonical decomposition splits V = W + U + U' with U = im d, W a
complement of U in ker d and U' a complement of ker d; t projects onto W and
s inverts d from U back to U'.  All complements are chosen by the
first-suitable-pivot rule so results are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exactlin import (GradedMap, GradedSpace, columns_to_matrix, compose, extend_to_basis,
                       identity, inverse, kernel_from_rref, mat_mul, rank, rref, rref_matrix,
                       solve)
from .report import Report


class HodgeError(ValueError):
    pass


@dataclass(frozen=True)
class DgSpace:
    space: GradedSpace
    d: GradedMap

    def __post_init__(self):
        if self.d.source != self.space or self.d.target != self.space:
            raise ValueError("differential must be an endomorphism of the space")
        if self.d.parity != 1 and not self.d.is_zero():
            raise ValueError("differential must be odd")
        if not compose(self.d, self.d).is_zero():
            raise ValueError("d o d != 0")

    @classmethod
    def zero(cls, space: GradedSpace) -> "DgSpace":
        return cls(space, GradedMap(space, space, 1, {}))

    @property
    def dim(self):
        return self.space.dim

    def homology_dim(self) -> int:
        M = self.d.matrix()
        r = rank(M) if self.dim else 0
        return (self.dim - r) - r


@dataclass(frozen=True)
class HodgeData:
    """Operators (s, t) on a dg space.

    ``inclusion``/``projection`` identify im(t) with a space W whose basis is
    named after pivot basis vectors of V; they are filled in by the
    constructors below and derived lazily otherwise.
    """

    base: DgSpace
    s: GradedMap
    t: GradedMap
    canonical: bool = False
    inclusion: GradedMap = None
    projection: GradedMap = None

    @property
    def space(self):
        return self.base.space

    @property
    def d(self):
        return self.base.d

    def with_s(self, s: GradedMap) -> "HodgeData":
        return HodgeData(self.base, s, self.t, self.canonical, self.inclusion, self.projection)

    def image_of_t(self):
        """(W, inclusion W->V, projection V->W)."""
        if self.inclusion is not None:
            return self.inclusion.source, self.inclusion, self.projection
        return _image_split(self.t)


def _image_split(t: GradedMap):
    V = t.source
    T = t.matrix()
    if not V.dim:
        return V, t, t
    _, piv = rref_matrix(T, V.dim)
    # t is idempotent, so t(e_c) for the pivot columns c is a basis of im(t)
    cols = [[T[i][c] for i in range(V.dim)] for c in piv]
    W = GradedSpace((V.names[c], V.parities[c]) for c in piv)
    if not cols:
        return W, GradedMap(W, V, 0, {}), GradedMap(V, W, 0, {})
    A = columns_to_matrix(cols, V.dim)
    coords = [solve(A, [T[i][j] for i in range(V.dim)]) for j in range(V.dim)]
    P = [list(r) for r in zip(*coords)]
    return W, GradedMap.from_matrix(W, V, 0, A), GradedMap.from_matrix(V, W, 0, P)


def trivial_hodge(V: DgSpace) -> HodgeData:
    I = identity(V.space)
    return HodgeData(V, GradedMap(V.space, V.space, 1, {}), I,
                     canonical=V.d.is_zero(), inclusion=I, projection=I)


def _assemble(V: DgSpace, w_vecs, u_prime_vecs, w_names, canonical=True) -> HodgeData:
    sp = V.space
    n = sp.dim
    D = V.d.matrix()
    u_vecs = [[sum((D[i][k] * v[k] for k in range(n)), Fraction(0)) for i in range(n)]
              for v in u_prime_vecs]
    cols = list(w_vecs) + u_vecs + list(u_prime_vecs)
    w, u = len(w_vecs), len(u_vecs)
    if len(cols) != n:
        raise HodgeError("complements do not span V (%d of %d)" % (len(cols), n))
    B = columns_to_matrix(cols, n)
    Binv = inverse(B)
    Tdiag = [[Fraction(int(i == j and i < w)) for j in range(n)] for i in range(n)]
    Sn = [[Fraction(0)] * n for _ in range(n)]
    for k in range(u):
        Sn[w + u + k][w + k] = Fraction(1)
    T = mat_mul(mat_mul(B, Tdiag), Binv)
    S = mat_mul(mat_mul(B, Sn), Binv)
    t = GradedMap.from_matrix(sp, sp, 0, T)
    s = GradedMap.from_matrix(sp, sp, 1, S)
    W = GradedSpace((nm, sp.parities[sp.index(nm)]) for nm in w_names)
    inc = GradedMap.from_matrix(W, sp, 0, columns_to_matrix(w_vecs, n)) if w else GradedMap(W, sp, 0, {})
    proj = GradedMap.from_matrix(sp, W, 0, Binv[:w]) if w else GradedMap(sp, W, 0, {})
    return HodgeData(V, s, t, canonical, inc, proj)


def _pieces(V: DgSpace):
    n = V.dim
    r = rref(V.d)
    kernel = [list(v) for v in r.kernel]
    image = [list(v) for v in r.image]
    picked = extend_to_basis(image, kernel, n)
    w_vecs = [kernel[k] for k in picked]
    free_cols = [c for c in range(n) if c not in set(r.pivots)]
    w_names = [V.space.names[free_cols[k]] for k in picked]
    return kernel, image, w_vecs, w_names


def canonical_hodge(V: DgSpace) -> HodgeData:
    n = V.dim
    if n == 0:
        return _assemble(V, [], [], [])
    kernel, image, w_vecs, w_names = _pieces(V)
    std = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    picked = extend_to_basis(kernel, std, n)
    u_prime = [std[j] for j in picked]
    return _assemble(V, w_vecs, u_prime, w_names)


def verify_hodge(h: HodgeData) -> Report:
    d, s, t = h.d, h.s, h.t
    V = h.space
    I = identity(V)
    rep = Report("hodge axioms")

    def zero_check(name, m):
        fn = m.first_nonzero()
        rep.add(name, fn is None, "" if fn is None else
                "nonzero at %s = %s" % (m.describe_entry(fn[0]), fn[1]))

    rep.add("parity of s", s.is_zero() or s.parity == 1)
    rep.add("parity of t", t.is_zero() or t.parity == 0)
    zero_check("s^2 = 0", compose(s, s))
    zero_check("t^2 = t", compose(t, t) - t)
    zero_check("dt = td", compose(d, t) - compose(t, d))
    zero_check("st = 0", compose(s, t))
    zero_check("ts = 0", compose(t, s))
    zero_check("ds + sd = id - t", compose(d, s) + compose(s, d) - (I - t))
    if h.canonical:
        zero_check("dt = 0 (canonical)", compose(d, t))
    return rep


def hodge_rank_report(h: HodgeData) -> Report:
    """im(t) + im(id - t) = V; for canonical data rank(t) = dim H(V)."""
    rep = Report("hodge ranks")
    n = h.space.dim
    T = h.t.matrix()
    I_T = (identity(h.space) - h.t).matrix()
    rt = rank(T) if n else 0
    rk = rank(I_T) if n else 0
    rep.add("rank t + rank(id - t) = dim V", rt + rk == n, "%d + %d vs %d" % (rt, rk, n))
    if h.canonical:
        hd = h.base.homology_dim()
        rep.add("rank t = dim ker d - rank d", rt == hd, "%d vs %d" % (rt, hd))
    return rep


# ---------------------------------------------------------------------------
# inner products

@dataclass(frozen=True)
class InnerProduct:
    base: GradedSpace
    parity: int
    gram: tuple   # gram[i][j] = <e_i, e_j>

    @classmethod
    def from_entries(cls, V: GradedSpace, parity: int, entries: dict, symmetrize=True):
        G = [[Fraction(0)] * V.dim for _ in range(V.dim)]
        for (i, j), c in entries.items():
            c = Fraction(c)
            G[i][j] = c
            if symmetrize:
                G[j][i] = c if not (V.parities[i] and V.parities[j]) else -c
        return cls(V, parity % 2, tuple(tuple(r) for r in G))

    def __post_init__(self):
        V = self.base
        G = self.gram
        for i in range(V.dim):
            for j in range(V.dim):
                c = G[i][j]
                sym = -1 if (V.parities[i] and V.parities[j]) else 1
                if c != sym * G[j][i]:
                    raise ValueError("pairing is not graded-symmetric at (%s, %s)"
                                     % (V.names[i], V.names[j]))
                if c and (V.parities[i] + V.parities[j]) % 2 != self.parity:
                    raise ValueError("pairing entry (%s, %s) violates parity %d"
                                     % (V.names[i], V.names[j], self.parity))
        if V.dim and rank([list(r) for r in G]) != V.dim:
            raise ValueError("pairing is degenerate")

    def pair(self, x, y) -> Fraction:
        G = self.gram
        tot = Fraction(0)
        for i, a in enumerate(x):
            if a:
                row = G[i]
                for j, b in enumerate(y):
                    if b and row[j]:
                        tot += a * row[j] * b
        return tot

    def matrix(self):
        return [list(r) for r in self.gram]

    def inverse_matrix(self):
        """C with sum_j G[i][j] C[j][k] = delta_ik: the Casimir coefficients."""
        return inverse(self.matrix())


def _left(M, G):
    """<M e_a, e_b> as a matrix in (a, b)."""
    Mt = [list(r) for r in zip(*M)]
    return mat_mul(Mt, G)


def adjointness_report(h: HodgeData, ip: InnerProduct, include_d=True) -> Report:
    """<s a, b> = (-1)^{|a|} <a, s b>,  <t a, b> = <a, t b>, and the dg
    condition <d a, b> + (-1)^{|a|} <a, d b> = 0."""
    V = h.space
    G = ip.matrix()
    rep = Report("inner-product compatibility")

    def run(name, M, sign_of_a):
        L = _left(M, G)
        R = mat_mul(G, M)
        bad = None
        for a in range(V.dim):
            sg = sign_of_a(V.parities[a])
            for b in range(V.dim):
                if L[a][b] != sg * R[a][b]:
                    bad = (V.names[a], V.names[b])
                    break
            if bad:
                break
        rep.add(name, bad is None, "" if bad is None else "violated at %r" % (bad,))

    if include_d:
        run("<da,b> = -(-1)^|a| <a,db>", h.d.matrix(), lambda p: -1 if p == 0 else 1)
    run("<sa,b> = (-1)^|a| <a,sb>", h.s.matrix(), lambda p: -1 if p else 1)
    run("<ta,b> = <a,tb>", h.t.matrix(), lambda p: 1)
    return rep


def check_dg_frobenius(V: DgSpace, ip: InnerProduct) -> Report:
    G = ip.matrix()
    D = V.d.matrix()
    L = _left(D, G)
    R = mat_mul(G, D)
    rep = Report("dg Frobenius condition")
    for a in range(V.dim):
        sg = -1 if V.space.parities[a] == 0 else 1
        for b in range(V.dim):
            if L[a][b] != sg * R[a][b]:
                rep.add("<da,b> + (-1)^|a| <a,db> = 0", False,
                        "violated at (%s, %s)" % (V.space.names[a], V.space.names[b]))
                return rep
    rep.add("<da,b> + (-1)^|a| <a,db> = 0", True)
    return rep


def cyclic_hodge(V: DgSpace, ip: InnerProduct) -> HodgeData:
    if ip.base != V.space:
        raise HodgeError("pairing lives on a different space")
    pre = check_dg_frobenius(V, ip)
    if not pre.passed:
        raise HodgeError("d and the pairing are incompatible: " + pre.checks[-1].detail)
    n = V.dim
    if n == 0:
        return _assemble(V, [], [], [])
    G = ip.matrix()
    kernel, image, w_vecs, w_names = _pieces(V)
    # W-perp
    if w_vecs:
        rows = mat_mul([list(w) for w in w_vecs], G)
        R, piv = rref_matrix(rows, n)
        perp = kernel_from_rref(R, piv, n)
    else:
        perp = [[Fraction(int(i == j)) for i in range(n)] for j in range(n)]
    picked = extend_to_basis(image, perp, n)
    cand = [perp[k] for k in picked]
    if len(cand) != len(image):
        raise HodgeError("no complement of im d inside the orthogonal of W")
    par = lambda v: next(V.space.parities[i] for i, x in enumerate(v) if x)
    # unknowns alpha[i][j] for parity(u_j) == parity(c_i)
    unknowns = [(i, j) for i in range(len(cand)) for j in range(len(image))
                if par(cand[i]) == par(image[j])]
    col = {u: k for k, u in enumerate(unknowns)}
    A, b = [], []
    for i in range(len(cand)):
        for k in range(i, len(cand)):
            row = [Fraction(0)] * len(unknowns)
            for j in range(len(image)):
                if (k, j) in col:
                    row[col[(k, j)]] += ip.pair(cand[i], image[j])
                if (i, j) in col:
                    row[col[(i, j)]] += ip.pair(image[j], cand[k])
            A.append(row)
            b.append(-ip.pair(cand[i], cand[k]))
    if unknowns:
        alpha = solve(A, b)
        if alpha is None:
            raise HodgeError("no isotropic complement found")
    else:
        alpha = []
        if any(b):
            raise HodgeError("no isotropic complement found")
    u_prime = []
    for i, c in enumerate(cand):
        v = list(c)
        for j, u in enumerate(image):
            if (i, j) in col:
                a = alpha[col[(i, j)]]
                v = [x + a * y for x, y in zip(v, u)]
        u_prime.append(v)
    return _assemble(V, w_vecs, u_prime, w_names)
