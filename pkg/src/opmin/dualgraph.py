"""
Graph amplitudes of a contractible dg Frobenius datum, the graph cochain they
define, its cocycle check and the gauge-independence certificate.

Amplitude of a labelled graph
-----------------------------
Half-edges are listed edge by edge (start, end) and fed into the propagators;
the vertex tensors read them vertex by vertex, each vertex taking its flags
in edge order.  The value is

    (Y_0 (x) ... (x) Y_{n-1}) o sigma o (K_0 (x) ... (x) K_{E-1})

with sigma the Koszul-signed shuffle from edge order to vertex order.

Orientation
-----------
Read the expression as the ordered list [Y_0, ..., Y_{n-1}, K_0, ..., K_{E-1}]
of homogeneous tensors.  Relabelling the graph reorders this list (Koszul
sign in the tensor parities) and may reverse edges (the symmetry sign of K).
So the amplitude transforms by a character that depends only on the parity
profile of the datum: vertex tensors of parity |Y_{g,k}|, propagators of
parity |K| and reversal sign eps_K.  For an even pairing K is odd and the
character contains the edge-order sign; for an odd pairing the vertex-order
sign appears instead.

Contracting an edge e = (a, b) uses the Casimir C: when [Y_a, Y_b, C] are
adjacent in the list with C's first leg at a, they glue to the merged vertex
tensor.  With d s + s d = id, (d (x) 1 + 1 (x) d) K = C, and d-closed vertex
tensors give

    sum_e (-1)^{|K| e} amp(H with C on e) = 0,

which is the cocycle identity once each term is rewritten as a signed
amplitude of H/e.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .combin import (LabelledGraph, automorphisms, canonicalize,
                     contract_edge, enum_stable_graphs, graph_string, perm_sign)
from .exactlin import (GROUND, GradedMap, GradedSpace, MultiMap, compose, identity,
                       inverse, kernel_from_rref, koszul_sign, mat_mul, permute_inputs, rref_matrix,
                       solve, tensor)
from .hodge import (DgSpace, HodgeData, InnerProduct, adjointness_report, check_dg_frobenius,
                    cyclic_hodge, verify_hodge)
from .report import Report


class DatumError(ValueError):
    pass


# ---------------------------------------------------------------------------
# commutative Frobenius algebras

@dataclass(frozen=True)
class CommutativeAlgebra:
    """Graded-commutative algebra by structure constants
    ``mult[(i, j)] = {k: c}`` with an invariant pairing ``gram[(i, j)]``.

    No unit is assumed: Y_{0,k}(a_1..a_k) = <a_1 ... a_{k-1}, a_k>.
    """

    space: GradedSpace
    mult: dict
    gram: dict
    pairing_parity: int

    @classmethod
    def with_trace(cls, space, mult, trace):
        ps = {space.parity(i) for i, c in enumerate(trace) if c}
        if len(ps) != 1:
            raise DatumError("trace must be homogeneous and nonzero")
        gram = {}
        for (i, j), out in mult.items():
            c = sum((v * trace[k] for k, v in out.items()), Fraction(0))
            if c:
                gram[(i, j)] = c
        return cls(space, mult, gram, ps.pop())

    def product_vec(self, x, y):
        out = [Fraction(0)] * self.space.dim
        for i, a in enumerate(x):
            if not a:
                continue
            for j, b in enumerate(y):
                if not b:
                    continue
                for k, c in self.mult.get((i, j), {}).items():
                    out[k] += a * b * c
        return out

    def pair_vec(self, x, y) -> Fraction:
        return sum((x[i] * y[j] * c for (i, j), c in self.gram.items()), Fraction(0))


def _basis_vec(n, i):
    return [Fraction(int(k == i)) for k in range(n)]


def check_algebra(alg: CommutativeAlgebra, d: GradedMap) -> Report:
    V = alg.space
    n = V.dim
    rep = Report("dg cyclic algebra axioms")
    e = [_basis_vec(n, i) for i in range(n)]
    assoc = comm = deriv = inv = True
    for i, j in itertools.product(range(n), repeat=2):
        ab = alg.product_vec(e[i], e[j])
        ba = alg.product_vec(e[j], e[i])
        sg = -1 if V.parity(i) and V.parity(j) else 1
        if ab != [sg * c for c in ba]:
            comm = False
        lhs = d.apply(ab)
        r1 = alg.product_vec(d.apply(e[i]), e[j])
        r2 = alg.product_vec(e[i], d.apply(e[j]))
        s2 = -1 if V.parity(i) else 1
        if lhs != [x + s2 * y for x, y in zip(r1, r2)]:
            deriv = False
        for k in range(n):
            bc = alg.product_vec(e[j], e[k])
            if alg.product_vec(ab, e[k]) != alg.product_vec(e[i], bc):
                assoc = False
            if alg.pair_vec(ab, e[k]) != alg.pair_vec(e[i], bc):
                inv = False
    rep.add("associative", assoc)
    rep.add("graded-commutative", comm)
    rep.add("d is a derivation", deriv)
    rep.add("<ab, c> = <a, bc>", inv)
    return rep


# ---------------------------------------------------------------------------
# the datum

@dataclass
class ModularFrobeniusDatum:
    """Contractible dg space, pairing, Casimir and vertex tensors Y_{g,k}.

    ``tensors`` maps (g, k) to a MultiMap V^{(x)k} -> ground.  When
    ``algebra`` is set, missing tensors are generated: Y_{0,k}(a_1..a_k) =
    <a_1 ... a_{k-1}, a_k> and Y_{g,k} = Y_{g-1,k+2} o (id^k (x) C).
    """

    base: DgSpace
    ip: InnerProduct
    tensors: dict = field(default_factory=dict)
    algebra: CommutativeAlgebra = None
    name: str = "datum"

    def __post_init__(self):
        if self.base.homology_dim() != 0:
            raise DatumError("the dg space is not contractible")
        if self.ip.base != self.base.space:
            raise DatumError("pairing lives on a different space")

    @property
    def space(self):
        return self.base.space

    @property
    def generated(self) -> bool:
        return self.algebra is not None

    def casimir(self) -> MultiMap:
        """C in V (x) V with (1 (x) <,>)(C (x) 1) = id, so that
        C^{ij} = (-1)^{p|i|} (G^{-1})_{ij}."""
        return MultiMap(GROUND, self.space, 0, 2, self.ip.parity, _casimir_entries(self))

    def vertex_tensor(self, g: int, k: int) -> MultiMap:
        got = self.tensors.get((g, k))
        if got is not None:
            return got
        if not self.generated:
            raise DatumError("missing vertex tensor for (g, k) = (%d, %d)" % (g, k))
        if g == 0:
            got = _product_tensor(self.algebra, k)
        else:
            up = self.vertex_tensor(g - 1, k + 2)
            glue = tensor([identity(self.space)] * k + [self.casimir()]) if k else self.casimir()
            got = compose(up, glue)
        self.tensors[(g, k)] = got
        return got

    def vertex_parity(self, g: int, k: int) -> int:
        Y = self.vertex_tensor(g, k)
        if Y.entries:
            return Y.parity
        p = self.ip.parity
        return (p * (1 + g)) % 2


def _casimir_entries(M):
    C = M.ip.inverse_matrix()
    V = M.space
    p = M.ip.parity
    out = {}
    for i in range(V.dim):
        sg = -1 if p and V.parity(i) else 1
        for j in range(V.dim):
            if C[i][j]:
                out[((i, j), ())] = sg * C[i][j]
    return out


def _product_tensor(alg: CommutativeAlgebra, k: int) -> MultiMap:
    """Y_{0,k}(a_1..a_k) = <a_1 ... a_{k-1}, a_k>."""
    V = alg.space
    n = V.dim
    if k < 2:
        raise DatumError("genus-0 vertex tensors need valence >= 2")
    layer = {(i,): _basis_vec(n, i) for i in range(n)}
    for _ in range(k - 2):
        new = {}
        for tup, vec in layer.items():
            for j in range(n):
                p = alg.product_vec(vec, _basis_vec(n, j))
                if any(p):
                    new[tup + (j,)] = p
        layer = new
    ent = {}
    for tup, vec in layer.items():
        for j in range(n):
            c = sum((vec[i] * alg.gram.get((i, j), 0) for i in range(n)), Fraction(0))
            if c:
                ent[((), tup + (j,))] = c
    return MultiMap(V, GROUND, k, 0, alg.pairing_parity, ent)


def frobenius_datum(alg: CommutativeAlgebra, d: GradedMap, name="datum") -> ModularFrobeniusDatum:
    rep = check_algebra(alg, d)
    if not rep.passed:
        raise DatumError(str(rep))
    ip = InnerProduct.from_entries(alg.space, alg.pairing_parity, dict(alg.gram), symmetrize=False)
    return ModularFrobeniusDatum(DgSpace(alg.space, d), ip, {}, alg, name)


def monomial_datum(generators, reduced=False, name="monomial") -> ModularFrobeniusDatum:
    """Monomial algebra Lambda[eps] (x) F, d = d/d eps, pairing read off the
    coefficient of the top monomial eps * top(F).

    ``generators`` lists (name, parity, order) for F with x^order = 0 (odd
    generators have order 2).  With ``reduced`` the factor F is replaced by
    its maximal ideal modulo the top monomial: a non-unital cyclic algebra.
    """
    gens = [("eps", 1, 2)] + [(nm, p, 2 if p else o) for nm, p, o in generators]
    n = len(gens)
    orders = [o for _, _, o in gens]
    par = [p for _, p, _ in gens]
    top = tuple(o - 1 for o in orders)
    monos = list(itertools.product(*[range(o) for o in orders]))
    if reduced:
        rest_top = top[1:]
        monos = [m for m in monos if any(m[1:]) and m[1:] != rest_top]
    monos.sort(key=lambda m: (sum(m), [-x for x in m]))
    idx = {m: k for k, m in enumerate(monos)}

    def label(m):
        parts = []
        for (nm, _, _), e in zip(gens, m):
            if e:
                parts.append(nm if e == 1 else "%s%d" % (nm, e))
        return "".join(parts) or "1"

    def mparity(m):
        return sum(par[k] * m[k] for k in range(n)) % 2

    def product(a, b):
        c = tuple(x + y for x, y in zip(a, b))
        if any(x >= o for x, o in zip(c, orders)):
            return None, 0
        sign = 1
        for k in range(n):
            if b[k] and par[k] and sum(a[j] for j in range(k + 1, n) if par[j]) % 2:
                sign = -sign
        return c, sign

    V = GradedSpace((label(m), mparity(m)) for m in monos)
    mult, gram = {}, {}
    for a in monos:
        for b in monos:
            c, sg = product(a, b)
            if c is None:
                continue
            if c in idx:
                mult[(idx[a], idx[b])] = {idx[c]: sg}
            if c == top:
                gram[(idx[a], idx[b])] = sg
    d = {}
    for m in monos:
        if m[0]:
            d[(idx[(0,) + m[1:]], idx[m])] = 1
    alg = CommutativeAlgebra(V, mult, gram, mparity(top))
    return frobenius_datum(alg, GradedMap(V, V, 1, d), name)


def exterior_datum() -> ModularFrobeniusDatum:
    """Lambda[eps], d eps = 1, odd trace tr(eps) = 1."""
    return monomial_datum([], name="exterior-2")


def dual_numbers_datum() -> ModularFrobeniusDatum:
    """k[x]/x^2 (x) Lambda[eps], d = d/d eps, odd trace tr(eps x) = 1."""
    return monomial_datum([("x", 0, 2)], name="dual-numbers-4")


def grassmann_datum() -> ModularFrobeniusDatum:
    """Lambda(eps, theta), d = d/d eps, even trace tr(eps theta) = 1."""
    return monomial_datum([("th", 1, 2)], name="grassmann-4")


def torus_datum() -> ModularFrobeniusDatum:
    """Lambda(eps, a, b) with a, b odd, d = d/d eps, odd trace tr(eps a b) = 1."""
    return monomial_datum([("a", 1, 2), ("b", 1, 2)], name="torus-8")


DATA = {"exterior-2": exterior_datum, "dual-numbers-4": dual_numbers_datum,
        "grassmann-4": grassmann_datum, "torus-8": torus_datum}


# ---------------------------------------------------------------------------
# datum verification

def _graded_symmetric(Y: MultiMap) -> bool:
    for k in range(Y.arity - 1):
        perm = list(range(Y.arity))
        perm[k], perm[k + 1] = perm[k + 1], perm[k]
        if permute_inputs(Y, perm) != Y:
            return False
    return True


def _d_closed(Y: MultiMap, d: GradedMap) -> bool:
    if Y.arity == 0:
        return True
    I = identity(d.source)
    total = None
    for k in range(Y.arity):
        term = compose(Y, tensor([I] * k + [d] + [I] * (Y.arity - k - 1)))
        total = term if total is None else total + term
    return total.is_zero()


def reachable_types(max_genus: int, max_valence: int = None):
    """(g, k) with 2g - 2 + k > 0 that can occur at a vertex of a legless
    graph of total genus <= max_genus."""
    out = []
    for g in range(max_genus + 1):
        top = 2 * (max_genus - g) + 2 if max_valence is None else max_valence
        for k in range(0, top + 1):
            if 2 * g - 2 + k > 0 and g + (k // 2 if k else 0) <= max_genus + 1:
                out.append((g, k))
    return out


def verify_modular_datum(M: ModularFrobeniusDatum, max_genus: int = 2) -> Report:
    rep = Report("modular Frobenius datum %s" % M.name)
    rep.extend(check_dg_frobenius_datum(M))
    types = reachable_types(max_genus)
    C = M.casimir()
    I = identity(M.space)
    d = M.base.d
    have = {}
    for g, k in types:
        try:
            have[(g, k)] = M.vertex_tensor(g, k)
        except DatumError:
            continue
    sym_bad = [gk for gk, Y in have.items() if not _graded_symmetric(Y)]
    rep.add("vertex tensors graded-symmetric", not sym_bad,
            "" if not sym_bad else "fails at %r" % (sym_bad[0],))
    closed_bad = [gk for gk, Y in have.items() if not _d_closed(Y, d)]
    rep.add("vertex tensors d-closed", not closed_bad,
            "" if not closed_bad else "fails at %r" % (closed_bad[0],))
    # self-gluing of the last two slots
    bad = None
    for (g, k), Y in sorted(have.items()):
        if (g + 1, k - 2) not in have or k < 2:
            continue
        glue = tensor([I] * (k - 2) + [C]) if k > 2 else C
        if compose(Y, glue) != have[(g + 1, k - 2)]:
            bad = (g, k)
            break
    rep.add("self-gluing Y_{g,k} o (id (x) C) = Y_{g+1,k-2}", bad is None,
            "" if bad is None else "fails at %r" % (bad,))
    # gluing two vertices along one slot each
    bad = None
    for (g1, k1), Y1 in sorted(have.items()):
        for (g2, k2), Y2 in sorted(have.items()):
            tgt = (g1 + g2, k1 + k2 - 2)
            if tgt not in have or k1 < 1 or k2 < 1 or k1 + k2 - 2 > 6:
                continue
            glue = tensor([I] * (k1 - 1) + [C] + [I] * (k2 - 1))
            if compose(tensor([Y1, Y2]), glue) != have[tgt]:
                bad = ((g1, k1), (g2, k2))
                break
        if bad:
            break
    rep.add("gluing (Y_a (x) Y_b) o (id (x) C (x) id) = Y_{a+b}", bad is None,
            "" if bad is None else "fails at %r" % (bad,))
    return rep


def check_dg_frobenius_datum(M: ModularFrobeniusDatum) -> Report:
    rep = check_dg_frobenius(M.base, M.ip)
    rep.add("contractible", M.base.homology_dim() == 0)
    return rep


# ---------------------------------------------------------------------------
# propagators and orientation profile

def propagator(h: HodgeData, M: ModularFrobeniusDatum) -> MultiMap:
    """K = (s (x) 1) C as an element of V (x) V."""
    V = M.space
    S = h.s.matrix()
    C = [[Fraction(0)] * V.dim for _ in range(V.dim)]
    for ((i, j), ()), c in _casimir_entries(M).items():
        C[i][j] = c
    K = mat_mul(S, C)
    ent = {((i, j), ()): K[i][j] for i in range(V.dim) for j in range(V.dim) if K[i][j]}
    return MultiMap(GROUND, V, 0, 2, (M.ip.parity + 1) % 2, ent)


def reversal_sign(K: MultiMap):
    """eps with K^{ji} (-1)^{|i||j|} = eps K^{ij}, or None if K has no symmetry."""
    V = K.target
    signs = set()
    for ((i, j), ()), c in K.entries.items():
        other = K.entries.get(((j, i), ()), Fraction(0))
        kz = -1 if V.parity(i) and V.parity(j) else 1
        if other == 0:
            return None
        signs.add(kz * other / c)
    if not signs:
        return 1
    if len(signs) != 1:
        return None
    eps = signs.pop()
    return int(eps) if eps in (1, -1) else None


@dataclass(frozen=True)
class OrientationProfile:
    """Parities that determine how amplitudes transform."""

    pairing_parity: int
    edge_parity: int
    reversal: int
    vertex_parities: tuple   # ((g, k), parity) pairs

    def vparity(self, g, k) -> int:
        for key, p in self.vertex_parities:
            if key == (g, k):
                return p
        return (self.pairing_parity * (1 + g)) % 2

    @property
    def casimir_parity(self):
        return self.pairing_parity


def orientation_profile(M: ModularFrobeniusDatum, h: HodgeData, max_genus: int) -> OrientationProfile:
    K = propagator(h, M)
    eps = reversal_sign(K)
    if eps is None:
        raise DatumError("propagator has no symmetry: s is not compatible with the pairing")
    vp = []
    for g, k in reachable_types(max_genus):
        try:
            vp.append(((g, k), M.vertex_parity(g, k)))
        except DatumError:
            pass
    return OrientationProfile(M.ip.parity, K.parity, eps, tuple(vp))


def _vertex_parities(lg: LabelledGraph, prof: OrientationProfile):
    return [prof.vparity(g, lg.valence(v)) for v, g in enumerate(lg.genus)]


def relabel_character(lg: LabelledGraph, iso, prof: OrientationProfile) -> int:
    """amp(iso(lg)) = character * amp(lg)."""
    n = lg.n_vertices
    inv = [0] * n
    for i, p in enumerate(iso.vperm):
        inv[p] = i
    s = koszul_sign(_vertex_parities(lg, prof), inv)
    if prof.edge_parity:
        s *= perm_sign(iso.eperm)
    if prof.reversal == -1 and sum(iso.eflip) % 2:
        s = -s
    return s


def apply_iso(lg: LabelledGraph, iso) -> LabelledGraph:
    n = lg.n_vertices
    genus = [0] * n
    for i, p in enumerate(iso.vperm):
        genus[p] = lg.genus[i]
    edges = [None] * len(lg.edges)
    for k, (a, b) in enumerate(lg.edges):
        pa, pb = iso.vperm[a], iso.vperm[b]
        edges[iso.eperm[k]] = (pb, pa) if iso.eflip[k] else (pa, pb)
    return LabelledGraph(tuple(genus), tuple(edges))


def is_odd_graph(lg: LabelledGraph, prof: OrientationProfile) -> bool:
    """Some automorphism acts by -1, forcing every amplitude to vanish."""
    return any(relabel_character(lg, a, prof) == -1 for a in automorphisms(lg))


def contraction_sign(lg: LabelledGraph, k: int, prof: OrientationProfile):
    """(sign, lg/e) with amp(lg with C on edge k) = sign * amp(lg/e)."""
    a, b = lg.edges[k]
    n = lg.n_vertices
    vpar = _vertex_parities(lg, prof)
    E = len(lg.edges)
    # tokens: ('Y', v) and ('K', e); the contracted edge carries C
    tokens = [("Y", v) for v in range(n)] + [("K", e) for e in range(E)]

    def parity(tok):
        if tok[0] == "Y":
            return vpar[tok[1]]
        return prof.casimir_parity if tok[1] == k else prof.edge_parity

    rest_v = [v for v in range(n) if v not in (a, b)]
    rest_e = [("K", e) for e in range(E) if e != k]
    if a != b:
        target = [("Y", a), ("Y", b), ("K", k)] + [("Y", v) for v in rest_v] + rest_e
    else:
        target = [("Y", a), ("K", k)] + [("Y", v) for v in rest_v] + rest_e
    pos = {t: i for i, t in enumerate(tokens)}
    sign = koszul_sign([parity(t) for t in tokens], [pos[t] for t in target])
    contracted, _ = contract_edge(lg, k)
    # the merged vertex sits first; move it to its place in contract_edge order
    mpar = sum(parity(t) for t in target[:3 if a != b else 2]) % 2
    if a != b:
        keep = min(a, b)
        new_order = [v for v in range(n) if v != max(a, b)]
    else:
        keep = a
        new_order = list(range(n))
    listed = ["m"] + [v for v in rest_v]
    pars = [mpar] + [vpar[v] for v in rest_v]
    final = ["m" if v == keep else v for v in new_order]
    p2 = {t: i for i, t in enumerate(listed)}
    sign *= koszul_sign(pars, [p2[t] for t in final])
    return sign, contracted


# ---------------------------------------------------------------------------
# amplitudes

def _half_edges(lg: LabelledGraph):
    """perm[pos] = edge-stream index of the pos-th half-edge in vertex order,
    and the vertex blocks."""
    perm, blocks = [], []
    for v in range(lg.n_vertices):
        fl = lg.flags(v)
        blocks.append([2 * e + end for e, end in fl])
        perm += [2 * e + end for e, end in fl]
    return perm, blocks


def _vertex_tensors(lg: LabelledGraph, M: ModularFrobeniusDatum):
    return [M.vertex_tensor(g, lg.valence(v)) for v, g in enumerate(lg.genus)]


def graph_amplitude(lg: LabelledGraph, M: ModularFrobeniusDatum, h: HodgeData = None,
                    edge_elements=None, schedule: int = 0) -> Fraction:
    """Full contraction by a pruned search over basis labels of half-edges.

    ``edge_elements`` overrides the propagator per edge; ``schedule`` 0 visits
    vertices in order, 1 in reverse.
    """
    E = len(lg.edges)
    if edge_elements is None:
        if h is None:
            raise ValueError("need Hodge data or explicit edge elements")
        _require_contracting(h)
        K = propagator(h, M)
        edge_elements = [K] * E
    V = M.space
    Ys = _vertex_tensors(lg, M)
    perm, blocks = _half_edges(lg)
    ypar = [Y.parity for Y in Ys]
    const = 1
    for v in range(len(Ys)):
        for w in range(v + 1, len(Ys)):
            if ypar[v] and ypar[w]:
                const = -const
    ents = [[(ins, c) for ((), ins), c in Y.entries.items()] for Y in Ys]
    kent = [{oi: c for (oi, _), c in Kx.entries.items()} for Kx in edge_elements]
    order = list(range(len(Ys)))
    if schedule == 1:
        order.reverse()
    assign = [None] * (2 * E)
    total = Fraction(0)

    def rec(step, coef):
        nonlocal total
        if step == len(order):
            pars = [V.parity(i) for i in assign]
            total += const * koszul_sign(pars, perm) * coef
            return
        v = order[step]
        slots = blocks[v]
        for ins, c in ents[v]:
            ok = True
            cc = coef * c
            done = []
            for slot, idx in zip(slots, ins):
                assign[slot] = idx
                done.append(slot)
            # edge factors completed by this vertex
            seen = set()
            for slot in slots:
                e = slot // 2
                if e in seen:
                    continue
                s0, s1 = 2 * e, 2 * e + 1
                if assign[s0] is not None and assign[s1] is not None:
                    seen.add(e)
                    kc = kent[e].get((assign[s0], assign[s1]))
                    if not kc:
                        ok = False
                        break
                    cc *= kc
            if ok:
                rec(step + 1, cc)
            for slot in done:
                assign[slot] = None

    rec(0, Fraction(1))
    return total


def amplitude_oracle(lg: LabelledGraph, M: ModularFrobeniusDatum, h: HodgeData = None,
                     edge_elements=None) -> Fraction:
    """The same number by explicit composition of exactlin maps."""
    E = len(lg.edges)
    if edge_elements is None:
        edge_elements = [propagator(h, M)] * E
    Ys = _vertex_tensors(lg, M)
    Ytot = tensor(Ys)
    perm, _ = _half_edges(lg)
    if E == 0:
        return Ytot.entries.get(((), ()), Fraction(0))
    Ktot = tensor(edge_elements)
    val = compose(permute_inputs(Ytot, perm), Ktot)
    return val.entries.get(((), ()), Fraction(0))


def _require_contracting(h: HodgeData):
    if not h.t.is_zero():
        raise DatumError("the dual construction needs t = 0 (contractible space)")


# ---------------------------------------------------------------------------
# cochains

@dataclass
class GraphCochain:
    """Values Z(G) = amp(G)/|Aut G| on canonical graphs of the window."""

    values: dict
    graphs: dict
    profile: OrientationProfile
    window: tuple

    def pairing(self, key) -> Fraction:
        """<[G], Z> = |Aut G| Z(G) = amplitude in the canonical labelling."""
        return self.values.get(key, Fraction(0)) * self.graphs[key].aut_order

    def to_rows(self):
        return [(k, graph_string(self.graphs[k].graph), self.values[k]) for k in sorted(self.values)]


def window_graphs(max_genus: int, max_vertices: int):
    out = []
    for g in range(1, max_genus + 1):
        out += enum_stable_graphs(g, max_vertices)
    return out


def dual_cocycle(M: ModularFrobeniusDatum, h: HodgeData, window) -> GraphCochain:
    max_genus, max_vertices = window
    _require_contracting(h)
    prof = orientation_profile(M, h, max_genus)
    K = propagator(h, M)
    vals, graphs = {}, {}
    for sg in window_graphs(max_genus, max_vertices):
        key = sg.key()
        graphs[key] = sg
        amp = graph_amplitude(sg.graph, M, edge_elements=[K] * len(sg.edges))
        vals[key] = amp / sg.aut_order
    return GraphCochain(vals, graphs, prof, tuple(window))


def boundary(lg: LabelledGraph, prof: OrientationProfile):
    """d lg = sum_e (-1)^{|K| e} sign_e (lg/e), as {canonical key: coefficient}
    with each term moved to its canonical labelling."""
    out = {}
    for k in range(len(lg.edges)):
        sg = -1 if (prof.edge_parity and k % 2) else 1
        cs, contracted = contraction_sign(lg, k, prof)
        canon, iso = canonicalize(contracted)
        chi = relabel_character(contracted, iso, prof)
        key = graph_string(canon)
        out[key] = out.get(key, 0) + sg * cs * chi
    return {k: c for k, c in out.items() if c}


def check_cocycle(Z: GraphCochain, window=None) -> Report:
    rep = Report("cocycle: Z(dH) = 0 on every window graph")
    window = Z.window if window is None else window
    for key, sg in sorted(Z.graphs.items(), key=lambda kv: (len(kv[1].edges), kv[0])):
        if sg.total_genus() > window[0]:
            continue
        terms = boundary(sg.graph, Z.profile)
        missing = [k for k in terms if k not in Z.graphs]
        if missing:
            rep.add(key, False, "window too small: %s not evaluated" % missing[0])
            continue
        res = sum((c * Z.pairing(k) for k, c in terms.items()), Fraction(0))
        rep.add(key, res == 0, "" if res == 0 else "residual %s" % res)
    return rep


def gauge_independence(M: ModularFrobeniusDatum, h1: HodgeData, h2: HodgeData, window) -> Report:
    """Solve Z1 - Z2 = c o d over the window; c is reported in pairing
    normalisation (values on canonical labellings)."""
    rep = Report("gauge independence")
    for name, h in (("first", h1), ("second", h2)):
        vh = verify_hodge(h)
        adj = adjointness_report(h, M.ip, include_d=False)
        ok = vh.passed and adj.passed and h.t.is_zero()
        rep.add("%s homotopy is a cyclic contraction" % name, ok,
                "" if ok else "; ".join(c.line() for c in (vh.failures() + adj.failures())))
    if not rep.passed:
        return rep
    Z1 = dual_cocycle(M, h1, window)
    Z2 = dual_cocycle(M, h2, window)
    p1, p2 = Z1.profile, Z2.profile
    if (p1.edge_parity, p1.reversal) != (p2.edge_parity, p2.reversal):
        rep.add("same orientation profile", False)
        return rep
    prof = p1
    keys = sorted(Z1.graphs, key=lambda k: (len(Z1.graphs[k].edges), k))
    unknowns = [k for k in keys if not is_odd_graph(Z1.graphs[k].graph, prof)]
    col = {k: i for i, k in enumerate(unknowns)}
    rows, rhs = [], []
    for key in keys:
        diff = Z1.pairing(key) - Z2.pairing(key)
        terms = boundary(Z1.graphs[key].graph, prof)
        row = [Fraction(0)] * len(unknowns)
        for k, c in terms.items():
            if k in col:
                row[col[k]] += c
        rows.append(row)
        rhs.append(diff)
    nonzero = sum(1 for r in rhs if r)
    rep.data["difference_nonzero"] = nonzero
    sol = solve(rows, rhs) if unknowns else ([] if not any(rhs) else None)
    if sol is None:
        rep.add("certificate", False, "UNSAT within window")
        return rep
    resid = [sum((a * x for a, x in zip(r, sol)), Fraction(0)) - b for r, b in zip(rows, rhs)]
    rep.add("certificate", not any(resid), "%d nonzero differences" % nonzero)
    rep.data["certificate"] = {k: sol[col[k]] for k in unknowns if sol[col[k]]}
    rep.data["Z1"], rep.data["Z2"] = Z1, Z2
    return rep


# ---------------------------------------------------------------------------
# cyclic contractions

def cyclic_contraction_family(M: ModularFrobeniusDatum):
    """Affine family of odd s with d s + s d = 1 and <s a, b> = (-1)^|a| <a, s b>.

    Returns (slots, particular, directions): s is the matrix with entries
    particular + sum c_k directions[k] at the listed (row, col) slots.
    """
    V = M.space
    n = V.dim
    D = M.base.d.matrix()
    G = M.ip.matrix()
    slots = [(i, j) for i in range(n) for j in range(n) if V.parity(i) != V.parity(j)]
    col = {u: k for k, u in enumerate(slots)}
    A, b = [], []
    for i in range(n):
        for k in range(n):
            # (d s + s d)[i][k]
            row = [Fraction(0)] * len(slots)
            for j in range(n):
                if D[i][j] and (j, k) in col:
                    row[col[(j, k)]] += D[i][j]
                if D[j][k] and (i, j) in col:
                    row[col[(i, j)]] += D[j][k]
            A.append(row)
            b.append(Fraction(int(i == k)))
    for a in range(n):
        sg = -1 if V.parity(a) else 1
        for c in range(n):
            # sum_j s[j][a] G[j][c] - sg sum_j G[a][j] s[j][c] = 0
            row = [Fraction(0)] * len(slots)
            for j in range(n):
                if (j, a) in col:
                    row[col[(j, a)]] += G[j][c]
                if (j, c) in col:
                    row[col[(j, c)]] -= sg * G[a][j]
            A.append(row)
            b.append(Fraction(0))
    x = solve(A, b)
    if x is None:
        raise DatumError("no cyclic contraction exists")
    R, piv = rref_matrix(A, len(slots))
    return slots, x, kernel_from_rref(R, piv, len(slots))


def contraction_from_matrix(M: ModularFrobeniusDatum, S) -> HodgeData:
    V = M.space
    zero = GradedMap(V, V, 0, {})
    return HodgeData(M.base, GradedMap.from_matrix(V, V, 1, S), zero, canonical=False,
                     inclusion=GradedMap(GradedSpace([]), V, 0, {}),
                     projection=GradedMap(V, GradedSpace([]), 0, {}))


def _family_matrix(n, slots, part, dirs, coeffs):
    S = [[Fraction(0)] * n for _ in range(n)]
    for k, (i, j) in enumerate(slots):
        S[i][j] = part[k] + sum((c * d[k] for c, d in zip(coeffs, dirs)), Fraction(0))
    return S


def search_cyclic_contractions(M: ModularFrobeniusDatum, bound: int = 1, probe=None):
    """Cyclic contractions with s^2 = 0 over integer parameters in [-bound, bound],
    in a fixed enumeration order.  With ``probe`` (a labelled graph) only those
    giving a nonzero amplitude on it are kept."""
    slots, part, dirs = cyclic_contraction_family(M)
    n = M.space.dim
    out = []
    for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(dirs)):
        S = _family_matrix(n, slots, part, dirs, coeffs)
        if any(any(r) for r in mat_mul(S, S)):
            continue
        h = contraction_from_matrix(M, S)
        if probe is not None and graph_amplitude(probe, M, h) == 0:
            continue
        out.append((coeffs, h))
    return out


def orthogonal_symmetries(M: ModularFrobeniusDatum):
    """Basis of even X with d X = X d and <X a, b> + <a, X b> = 0."""
    V = M.space
    n = V.dim
    D = M.base.d.matrix()
    G = M.ip.matrix()
    slots = [(i, j) for i in range(n) for j in range(n) if V.parity(i) == V.parity(j)]
    col = {u: k for k, u in enumerate(slots)}
    A = []
    for i in range(n):
        for k in range(n):
            row = [Fraction(0)] * len(slots)
            for j in range(n):
                if D[i][j] and (j, k) in col:
                    row[col[(j, k)]] += D[i][j]
                if D[j][k] and (i, j) in col:
                    row[col[(i, j)]] -= D[j][k]
            A.append(row)
    for a in range(n):
        for c in range(n):
            row = [Fraction(0)] * len(slots)
            for j in range(n):
                if (j, a) in col:
                    row[col[(j, a)]] += G[j][c]
                if (j, c) in col:
                    row[col[(j, c)]] += G[a][j]
            A.append(row)
    R, piv = rref_matrix(A, len(slots))
    out = []
    for v in kernel_from_rref(R, piv, len(slots)):
        X = [[Fraction(0)] * n for _ in range(n)]
        for k, (i, j) in enumerate(slots):
            X[i][j] = v[k]
        out.append(X)
    return out


def conjugated_contraction(M: ModularFrobeniusDatum, h: HodgeData, X) -> HodgeData:
    """g s g^{-1} for the Cayley transform g = (1 + X)(1 - X)^{-1} of a
    symmetry X; g is orthogonal and commutes with d, so the result is again a
    cyclic contraction with s^2 = 0."""
    n = M.space.dim
    I = [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    P = [[I[i][j] + X[i][j] for j in range(n)] for i in range(n)]
    Q = [[I[i][j] - X[i][j] for j in range(n)] for i in range(n)]
    g = mat_mul(P, inverse(Q))
    S = mat_mul(mat_mul(g, h.s.matrix()), inverse(g))
    return contraction_from_matrix(M, S)


def seeded_contraction(M: ModularFrobeniusDatum, seed: int, spread: int = 1) -> HodgeData:
    """A cyclic contraction obtained from the canonical one by a seeded
    orthogonal symmetry."""
    rng = random.Random(seed)
    basis = orthogonal_symmetries(M)
    n = M.space.dim
    h0 = contraction_from_matrix(M, cyclic_hodge(M.base, M.ip).s.matrix())
    for _ in range(100):
        coeffs = [rng.randint(-spread, spread) for _ in basis]
        X = [[sum((c * B[i][j] for c, B in zip(coeffs, basis)), Fraction(0)) for j in range(n)]
             for i in range(n)]
        try:
            return conjugated_contraction(M, h0, X)
        except ValueError:
            continue
    return h0
