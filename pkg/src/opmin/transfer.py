"""
A-infinity and L-infinity structures on a parity-reversed space, their
constraint checks, and transfer to homology by sums over trees.

Conventions
-----------
All structure maps m_n are odd maps (Pi A)^{(x)n} -> Pi A; m_1 is the
differential of the underlying DgSpace.  The constraint in arity n is

    sum_{j=1..n} sum_{i+k=n-j} m_{i+1+k} o (id^i (x) m_j (x) id^k) = 0.

A tree amplitude puts the structure maps at vertices, the inclusion of
W = im(t) at leaves, ``EDGE_SIGN * s`` on internal edges and the projection
onto W at the root.  EDGE_SIGN = -1 is the homological-perturbation sign
for id - t = ds + sd; for inputs with only m_1, m_2 the global sign is
irrelevant (every n-leaf binary tree has n-2 internal edges).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .combin import (LEAF, enum_labelled, enum_planar, labelled_shape,
                     labels_in_order, compositions)
from .exactlin import (GradedMap, GradedSpace, MultiMap, compose, compose_tensor,
                       identity, permute_inputs, plug)
from .hodge import DgSpace, HodgeData, canonical_hodge
from .report import Report

EDGE_SIGN = -1


class TruncationError(ValueError):
    pass


@dataclass(frozen=True)
class AInfStructure:
    """m_1 = base.d and ops[n] for 2 <= n <= truncation (missing = zero)."""

    base: DgSpace
    ops: dict = field(default_factory=dict)
    truncation: int = 2

    def __post_init__(self):
        V = self.base.space
        for n, m in self.ops.items():
            if not 2 <= n <= self.truncation:
                raise ValueError("arity %d outside 2..%d" % (n, self.truncation))
            if m.arity != n or m.coarity != 1 or m.source != V or m.target != V:
                raise ValueError("m_%d has the wrong shape" % n)
            if m.entries and m.parity != 1:
                raise ValueError("m_%d must be odd" % n)

    @property
    def space(self) -> GradedSpace:
        return self.base.space

    def m(self, n: int) -> MultiMap:
        if n == 1:
            return self.base.d
        if n > self.truncation:
            raise TruncationError("truncation exceeded: m_%d requested, N=%d" % (n, self.truncation))
        got = self.ops.get(n)
        if got is None:
            return MultiMap.zero(self.space, self.space, n, 1, 1)
        return got

    def all_ops(self) -> dict:
        return {n: self.m(n) for n in range(1, self.truncation + 1)}


class LInfStructure(AInfStructure):
    """Same data; each m_n is expected to be graded-symmetric."""


@dataclass(frozen=True)
class AInfMorphism:
    source: AInfStructure
    target: AInfStructure
    components: dict

    def f(self, n: int) -> MultiMap:
        got = self.components.get(n)
        if got is None:
            return MultiMap.zero(self.source.space, self.target.space, n, 1, 0)
        return got


# ---------------------------------------------------------------------------
# constraints

def ainf_residual(A: AInfStructure, n: int) -> MultiMap:
    acc = MultiMap.zero(A.space, A.space, n, 1, 0)
    for j in range(1, n + 1):
        mj = A.m(j)
        outer = A.m(n - j + 1)
        for i in range(n - j + 1):
            acc = acc + plug(outer, i + 1, mj)
    return acc


def _residual_report(title, A, N, residual):
    rep = Report(title)
    if N > A.truncation:
        raise TruncationError("truncation exceeded: N=%d > %d" % (N, A.truncation))
    for n in range(1, N + 1):
        r = residual(A, n)
        k = r.first_nonzero()
        detail = "" if k is None else "first nonzero %s = %s" % (r.describe_entry(k[0]), k[1])
        rep.add("arity %d" % n, k is None, detail)
    return rep


def check_ainf(A: AInfStructure, N: int) -> Report:
    return _residual_report("A-infinity identities", A, N, ainf_residual)


def unshuffles(n: int, j: int):
    """Permutations listing a j-subset (increasing) then its complement."""
    for I in itertools.combinations(range(n), j):
        rest = [x for x in range(n) if x not in I]
        yield list(I) + rest


def linf_residual(L: AInfStructure, n: int) -> MultiMap:
    acc = MultiMap.zero(L.space, L.space, n, 1, 0)
    for j in range(1, n + 1):
        inner = plug(L.m(n - j + 1), 1, L.m(j))
        if inner.is_zero():
            continue
        for perm in unshuffles(n, j):
            acc = acc + permute_inputs(inner, perm)
    return acc


def symmetry_defect(m: MultiMap):
    """First adjacent transposition that does not fix m, or None."""
    for k in range(m.arity - 1):
        perm = list(range(m.arity))
        perm[k], perm[k + 1] = perm[k + 1], perm[k]
        if permute_inputs(m, perm) != m:
            return k
    return None


def check_linf(L: AInfStructure, N: int) -> Report:
    rep = Report("L-infinity identities")
    if N > L.truncation:
        raise TruncationError("truncation exceeded: N=%d > %d" % (N, L.truncation))
    for n in range(2, N + 1):
        k = symmetry_defect(L.m(n))
        rep.add("symmetry of m_%d" % n, k is None,
                "" if k is None else "transposition (%d %d)" % (k + 1, k + 2))
    rep.extend(_residual_report("", L, N, linf_residual))
    return rep


# ---------------------------------------------------------------------------
# tree amplitudes

class _Amplitudes:
    """Memoised subtree amplitudes for one (structure, leaf, edge) labelling."""

    def __init__(self, A: AInfStructure, leaf: GradedMap, edge: GradedMap, max_arity=None):
        self.A = A
        self.leaf = leaf
        self.edge = edge
        self.max_arity = A.truncation if max_arity is None else max_arity
        self.memo = {}

    def label(self, sub):
        if sub == LEAF:
            return self.leaf
        return compose(self.edge, self.vertex(sub))

    def vertex(self, tree):
        got = self.memo.get(tree)
        if got is None:
            if len(tree) > self.max_arity:
                raise TruncationError("vertex arity %d exceeds truncation %d"
                                      % (len(tree), self.max_arity))
            got = compose_tensor(self.A.m(len(tree)), [self.label(c) for c in tree])
            self.memo[tree] = got
        return got


def _signed_s(h: HodgeData, sign: int) -> GradedMap:
    return h.s if sign == 1 else -h.s


def tree_amplitude(T, A: AInfStructure, h: HodgeData, edge_sign: int = EDGE_SIGN) -> MultiMap:
    """t o m_T o t^{(x)n} on the full space, internal edges labelled by s."""
    amp = _Amplitudes(A, h.t, _signed_s(h, edge_sign))
    if T == LEAF:
        return h.t
    return compose(h.t, amp.vertex(T))


def _leaf_root(h: HodgeData):
    W, inc, proj = h.image_of_t()
    return W, inc, proj


def _require_canonical(h: HodgeData):
    # the trivial decomposition is accepted too: the transfer is then the identity
    if h.canonical or (h.s.is_zero() and h.t == identity(h.space)):
        return
    raise ValueError("minimal models need a canonical Hodge decomposition")


def minimal_ainf(A: AInfStructure, h: HodgeData = None, N: int = None,
                 edge_sign: int = EDGE_SIGN):
    """Transferred structure on W = im(t).

    Returns (AInfStructure on W, inclusion W->V, projection V->W).
    """
    if h is None:
        h = canonical_hodge(A.base)
    _require_canonical(h)
    N = A.truncation if N is None else N
    if N > A.truncation:
        raise TruncationError("truncation exceeded: N=%d > %d" % (N, A.truncation))
    W, inc, proj = _leaf_root(h)
    amp = _Amplitudes(A, inc, _signed_s(h, edge_sign))
    ops = {}
    for n in range(2, N + 1):
        acc = MultiMap.zero(W, W, n, 1, 1)
        for T in enum_planar(n):
            acc = acc + compose(proj, amp.vertex(T))
        if not acc.is_zero():
            ops[n] = acc
    d_w = compose(proj, compose(A.base.d, inc))
    out = AInfStructure(DgSpace(W, GradedMap(W, W, 1, d_w.entries)), ops, N)
    return out, inc, proj


def minimal_linf(L: AInfStructure, h: HodgeData = None, N: int = None,
                 edge_sign: int = EDGE_SIGN):
    """Transferred L-infinity structure on W: sum over leaf-labelled trees."""
    if h is None:
        h = canonical_hodge(L.base)
    _require_canonical(h)
    N = L.truncation if N is None else N
    if N > L.truncation:
        raise TruncationError("truncation exceeded: N=%d > %d" % (N, L.truncation))
    W, inc, proj = _leaf_root(h)
    amp = _Amplitudes(L, inc, _signed_s(h, edge_sign))
    ops = {}
    for n in range(2, N + 1):
        acc = MultiMap.zero(W, W, n, 1, 1)
        for T in enum_labelled(n):
            planar = compose(proj, amp.vertex(labelled_shape(T)))
            # leaf in position k receives input number labels[k]
            order = [lab - 1 for lab in labels_in_order(T)]
            acc = acc + permute_inputs(planar, order)
        if not acc.is_zero():
            ops[n] = acc
    d_w = compose(proj, compose(L.base.d, inc))
    out = LInfStructure(DgSpace(W, GradedMap(W, W, 1, d_w.entries)), ops, N)
    return out, inc, proj


def symmetrize(m: MultiMap) -> MultiMap:
    """sum over all input permutations sigma of m o sigma (Koszul signs)."""
    acc = MultiMap.zero(m.source, m.target, m.arity, m.coarity, m.parity)
    for perm in itertools.permutations(range(m.arity)):
        acc = acc + permute_inputs(m, list(perm))
    return acc


def commutator_structure(A: AInfStructure) -> LInfStructure:
    """The L-infinity structure l_n = sum_sigma m_n o sigma of an A-infinity one."""
    ops = {n: symmetrize(m) for n, m in A.ops.items()}
    return LInfStructure(A.base, {n: m for n, m in ops.items() if not m.is_zero()},
                         A.truncation)


def transfer_morphism(A: AInfStructure, h: HodgeData = None, N: int = None,
                      edge_sign: int = EDGE_SIGN):
    """The A-infinity quasi-isomorphism from the minimal model into A.

    f_1 is the inclusion of W; f_n sums the planar trees with ``edge_sign * s``
    at the root as well as on internal edges.
    """
    if h is None:
        h = canonical_hodge(A.base)
    minimal, inc, proj = minimal_ainf(A, h, N, edge_sign)
    N = minimal.truncation
    s = _signed_s(h, edge_sign)
    amp = _Amplitudes(A, inc, s)
    comps = {1: inc}
    for n in range(2, N + 1):
        acc = MultiMap.zero(minimal.space, A.space, n, 1, 0)
        for T in enum_planar(n):
            acc = acc + compose(s, amp.vertex(T))
        comps[n] = acc
    return AInfMorphism(minimal, A, comps)


def morphism_residual(F: AInfMorphism, n: int) -> MultiMap:
    """sum m^B_r (f_{i_1} (x) ... (x) f_{i_r}) - sum f_{i+1+k}(id^i (x) m^A_j (x) id^k)."""
    A, B = F.source, F.target
    acc = MultiMap.zero(A.space, B.space, n, 1, 1)
    for r in range(1, n + 1):
        mB = B.m(r)
        if mB.is_zero():
            continue
        for comp in compositions(n, r):
            acc = acc + compose_tensor(mB, [F.f(c) for c in comp])
    for j in range(1, n + 1):
        mA = A.m(j)
        if mA.is_zero():
            continue
        outer = F.f(n - j + 1)
        for i in range(n - j + 1):
            acc = acc - plug(outer, i + 1, mA)
    return acc


def check_morphism(F: AInfMorphism, N: int) -> Report:
    rep = Report("A-infinity morphism identities")
    for n in range(1, N + 1):
        r = morphism_residual(F, n)
        k = r.first_nonzero()
        rep.add("arity %d" % n, k is None,
                "" if k is None else "first nonzero %s = %s" % (r.describe_entry(k[0]), k[1]))
    return rep


# ---------------------------------------------------------------------------
# Maurer-Cartan form: the structure as a solution of d x + 1/2 [x, x] = 0 in
# the Hochschild cochains with the Gerstenhaber bracket.

def pre_lie(f: MultiMap, g: MultiMap) -> MultiMap:
    """f o g = sum_i f o_i g."""
    acc = MultiMap.zero(g.source, f.target, f.arity + g.arity - 1, 1, f.parity + g.parity)
    for i in range(f.arity):
        acc = acc + plug(f, i + 1, g)
    return acc


def gerstenhaber(f: MultiMap, g: MultiMap) -> MultiMap:
    """Graded commutator of the pre-Lie product: f o g - (-1)^{|f||g|} g o f."""
    if f.parity and g.parity:
        return pre_lie(f, g) + pre_lie(g, f)
    return pre_lie(f, g) - pre_lie(g, f)


@dataclass(frozen=True)
class MCDescription:
    """x = sum_{n>=2} m_n in C(Pi A) = prod_n Hom((Pi A)^n, Pi A), with
    differential [m_1, -]."""

    structure: AInfStructure
    components: dict
    residuals: dict


def ainf_to_mc(A: AInfStructure, N: int = None):
    """Order-n components of d x + 1/2 [x, x], compared with the A-infinity
    residuals arity by arity."""
    N = A.truncation if N is None else N
    ops = {n: A.m(n) for n in range(2, N + 1)}
    m1 = A.m(1)
    res = {}
    rep = Report("Maurer-Cartan form of the A-infinity identities")
    for n in range(1, N + 1):
        acc = MultiMap.zero(A.space, A.space, n, 1, 0)
        if n == 1:
            acc = acc + Fraction(1, 2) * gerstenhaber(m1, m1)
        if n >= 2 and n in ops:
            acc = acc + gerstenhaber(m1, ops[n])
        for p in range(2, n):
            q = n + 1 - p
            if 2 <= q <= N and p in ops and q in ops:
                acc = acc + Fraction(1, 2) * gerstenhaber(ops[p], ops[q])
        res[n] = acc
        direct = ainf_residual(A, n)
        same = acc == direct
        k = acc.first_nonzero()
        rep.add("arity %d" % n, same,
                ("MC residual %s" % ("zero" if k is None else "nonzero"))
                + ("" if same else "; differs from the A-infinity residual"))
    return MCDescription(A, ops, res), rep
