"""
Chains of decorated BV-trees: the differential (contract or whiten a black
edge) and operadic composition with the bivalent-vertex rule.

Two decoration instances are supported.  ``ass``: the planar order of the
children of a vertex is its decoration, so a planar leaf-labelled tree is a
basis element.  ``com``: decorations are trivial and trees are stored with
children sorted by least leaf label.

Black edges carry a determinant twist.  Their reference order is the
preorder of their lower vertices in the stored form; a term obtained by
some operation is normalised by the sign of the permutation taking the
order the operation produced to the reference order.

Sign rules (validated by d^2 = 0 and the derivation property):

    d T = sum_e (-1)^{pos(e)} (T_e - T^e)
    d(x o_i y) = (dx) o_i y + (-1)^{|x|} x o_i (dy),   |x| = #black edges.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from fractions import Fraction

from .combin import (bv_leaves, bv_string, bv_valid, bv_vertex_count,
                     enum_bvtrees, perm_sign)
from .report import Report

DECORATIONS = ("ass", "com")


# ---------------------------------------------------------------------------
# annotated trees: vertex = (color, kids, vid)

def _annotate(node, counter):
    if isinstance(node, int):
        return node
    vid = next(counter)
    color, kids = node
    return (color, tuple(_annotate(k, counter) for k in kids), vid)


def _strip(node):
    if isinstance(node, int):
        return node
    return (node[0], tuple(_strip(k) for k in node[1]))


def _black_ids(node):
    if isinstance(node, int):
        return []
    out = [node[2]] if node[0] == "b" else []
    for k in node[1]:
        out += _black_ids(k)
    return out


def _min_label(node):
    if isinstance(node, int):
        return node
    return min(_min_label(k) for k in node[1])


def _sort_ann(node):
    if isinstance(node, int):
        return node
    kids = sorted((_sort_ann(k) for k in node[1]), key=_min_label)
    return (node[0], tuple(kids), node[2])


def _finish(ann, produced_order, decoration):
    """Canonicalise an annotated tree; return (tree, sign) where sign compares
    ``produced_order`` (black vertex ids) with the reference order."""
    if decoration == "com":
        ann = _sort_ann(ann)
    ref = _black_ids(ann)
    if sorted(ref) != sorted(produced_order):
        raise AssertionError("black edge bookkeeping lost an edge")
    pos = {v: k for k, v in enumerate(ref)}
    return _strip(ann), perm_sign([pos[v] for v in produced_order])


# ---------------------------------------------------------------------------
# decorated trees and chains

@dataclass(frozen=True)
class DecoratedBVTree:
    """A tree with a coefficient and an explicit black-edge order.

    ``black_order[k]`` is the reference position of the k-th black edge in
    this term's order; ``normalize`` absorbs the permutation into the sign.
    """

    tree: object
    coefficient: Fraction = Fraction(1)
    black_order: tuple = None

    def normalize(self):
        n = len(_black_ids(_annotate(self.tree, itertools.count())))
        order = tuple(range(n)) if self.black_order is None else self.black_order
        if sorted(order) != list(range(n)):
            raise ValueError("black_order must permute the %d black edges" % n)
        return self.tree, self.coefficient * perm_sign(order)


class BVChain:
    """Finite Q-linear combination of canonical BV-trees."""

    __slots__ = ("terms", "decoration")

    def __init__(self, terms=None, decoration="ass"):
        if decoration not in DECORATIONS:
            raise ValueError("decoration must be 'ass' or 'com'")
        self.decoration = decoration
        acc = {}
        for t, c in (terms or {}).items():
            if decoration == "com":
                t, sg = _finish(_annotate(t, itertools.count()),
                                _black_ids(_annotate(t, itertools.count())), "com")
                c = c * sg
            if c:
                acc[t] = acc.get(t, 0) + Fraction(c)
        self.terms = {t: c for t, c in acc.items() if c}

    @classmethod
    def of(cls, tree, coefficient=1, decoration="ass"):
        return cls({tree: Fraction(coefficient)}, decoration)

    @classmethod
    def from_terms(cls, terms, decoration="ass"):
        acc = {}
        for term in terms:
            t, c = term.normalize()
            acc[t] = acc.get(t, 0) + c
        return cls(acc, decoration)

    def _new(self, terms):
        out = BVChain.__new__(BVChain)
        out.decoration = self.decoration
        out.terms = {t: c for t, c in terms.items() if c}
        return out

    def __add__(self, other):
        acc = dict(self.terms)
        for t, c in other.terms.items():
            acc[t] = acc.get(t, 0) + c
        return self._new(acc)

    def __neg__(self):
        return self._new({t: -c for t, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        return self._new({t: Fraction(c) * v for t, v in self.terms.items()})

    def __eq__(self, other):
        return isinstance(other, BVChain) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def is_zero(self):
        return not self.terms

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("%s*%s" % (c, bv_string(t)) for t, c in sorted(
            self.terms.items(), key=lambda kv: bv_string(kv[0])))


def black_count(tree) -> int:
    return len(_black_ids(_annotate(tree, itertools.count())))


# ---------------------------------------------------------------------------
# differential

def _contract(ann, vid):
    """Merge the vertex ``vid`` into its parent, splicing its children."""
    if isinstance(ann, int):
        return ann
    color, kids, me = ann
    new = []
    for k in kids:
        if not isinstance(k, int) and k[2] == vid:
            new.extend(k[1])
        else:
            new.append(_contract(k, vid))
    return (color, tuple(new), me)


def _whiten(ann, vid):
    if isinstance(ann, int):
        return ann
    color, kids, me = ann
    if me == vid:
        color = "w"
    return (color, tuple(_whiten(k, vid) for k in kids), me)


def tree_differential(tree, decoration="ass") -> dict:
    return dict(_tree_differential(tree, decoration))


@lru_cache(maxsize=None)
def _tree_differential(tree, decoration):
    ann = _annotate(tree, itertools.count())
    order = _black_ids(ann)
    out = {}
    for pos, e in enumerate(order):
        sg = -1 if pos % 2 else 1
        rest = order[:pos] + order[pos + 1:]
        t1, s1 = _finish(_contract(ann, e), rest, decoration)
        out[t1] = out.get(t1, 0) + sg * s1
        t2, s2 = _finish(_whiten(ann, e), rest, decoration)
        out[t2] = out.get(t2, 0) - sg * s2
    return tuple((t, c) for t, c in out.items() if c)


def bv_differential(x: BVChain) -> BVChain:
    acc = {}
    for t, c in x.terms.items():
        for u, v in _tree_differential(t, x.decoration):
            acc[u] = acc.get(u, 0) + c * v
    return x._new(acc)


# ---------------------------------------------------------------------------
# composition

def _relabel(node, f):
    if isinstance(node, int):
        return f(node)
    return (node[0], tuple(_relabel(k, f) for k in node[1]), node[2])


def _graft(xa, i, ya):
    """Replace leaf i of xa by the children of ya's root (Ass composition at
    the parent vertex).  Returns (tree, merged vertex id)."""
    merged = [None]

    def rec(node):
        if isinstance(node, int):
            return node
        color, kids, me = node
        if i in kids:
            k = kids.index(i)
            merged[0] = me
            return (color, kids[:k] + ya[1] + kids[k + 1:], me)
        return (color, tuple(rec(c) for c in kids), me)

    return rec(xa), merged[0]


def _resolve_bivalent(node, vid):
    """Apply the bivalent rule at the merged vertex: returns the tree, or None
    when the term vanishes."""
    if isinstance(node, int):
        return node
    color, kids, me = node
    new = []
    for k in kids:
        if not isinstance(k, int) and k[2] == vid and len(k[1]) == 1 and not isinstance(k[1][0], int):
            # bivalent between two internal edges
            child = k[1][0]
            if k[0] != "w" or child[0] != "w":
                return None
            new.append(_resolve_bivalent(child, vid))
        else:
            r = _resolve_bivalent(k, vid)
            if r is None:
                return None
            new.append(r)
    if any(r is None for r in new):
        return None
    return (color, tuple(new), me)


@lru_cache(maxsize=None)
def tree_compose(x, i: int, y, decoration="ass"):
    """x o_i y for single trees: (tree, sign) or None."""
    nx = len(bv_leaves(x))
    ny = len(bv_leaves(y))
    if not 1 <= i <= nx:
        raise IndexError("slot %d out of range for %d leaves" % (i, nx))
    counter = itertools.count()
    xa = _annotate(x, counter)
    ya = _annotate(y, counter)
    order = _black_ids(xa) + _black_ids(ya)
    xa = _relabel(xa, lambda a: a if a < i else (a + ny - 1 if a > i else a))
    ya = _relabel(ya, lambda a: a + i - 1)
    grafted, vid = _graft(xa, i, ya)
    resolved = _resolve_bivalent(grafted, vid)
    if resolved is None:
        return None
    t, sg = _finish(resolved, order, decoration)
    if not bv_valid(t):
        raise AssertionError("composition produced an invalid BV-tree: %s" % bv_string(t))
    return t, sg


def bv_compose(x: BVChain, i: int, y: BVChain) -> BVChain:
    """x o_i y, bilinear."""
    if x.decoration != y.decoration:
        raise ValueError("decoration mismatch")
    acc = {}
    for tx, cx in x.terms.items():
        for ty, cy in y.terms.items():
            got = tree_compose(tx, i, ty, x.decoration)
            if got is None:
                continue
            t, sg = got
            acc[t] = acc.get(t, 0) + sg * cx * cy
    return x._new(acc)


def chain_parity(x: BVChain) -> int:
    """Parity (#black edges mod 2) of a homogeneous chain."""
    ps = {black_count(t) % 2 for t in x.terms}
    if len(ps) > 1:
        raise ValueError("chain is not homogeneous")
    return ps.pop() if ps else 0


# ---------------------------------------------------------------------------
# named elements

UNIT = ("r", (1,))
T_ELEMENT = ("r", (("w", (1,)),))
S_ELEMENT = ("r", (("b", (1,)),))


def unit(decoration="ass") -> BVChain:
    return BVChain.of(UNIT, 1, decoration)


# ---------------------------------------------------------------------------
# the subcomplex spanned by trees T_t

def is_t_truncated(tree) -> bool:
    """Every extremity passes through a bivalent vertex and a white edge."""
    color, kids = tree
    if len(kids) != 1 or isinstance(kids[0], int) or kids[0][0] != "w":
        return False

    def leaves_ok(node):
        if isinstance(node, int):
            return False
        c, ks = node
        for k in ks:
            if isinstance(k, int):
                if not (len(ks) == 1 and c == "w"):
                    return False
            elif not leaves_ok(k):
                return False
        return True

    return leaves_ok(kids[0])


def bv_subcomplex_check(n: int, max_vertices: int, decoration="ass") -> Report:
    rep = Report("T_t subcomplex closed under d (n=%d, <=%d vertices)" % (n, max_vertices))
    gens = [t for t in enum_bvtrees(n, max_vertices, planar=(decoration == "ass"))
            if is_t_truncated(t)]
    bad = []
    for t in gens:
        for u in tree_differential(t, decoration):
            if not is_t_truncated(u):
                bad.append((t, u))
    rep.add("closure", not bad,
            "" if not bad else "d(%s) contains %s" % (bv_string(bad[0][0]), bv_string(bad[0][1])))
    rep.data["generators"] = len(gens)
    return rep


# ---------------------------------------------------------------------------
# exhaustive self-tests

def check_d_squared(max_leaves=4, max_vertices=4, decoration="ass") -> Report:
    rep = Report("d^2 = 0 (%s, <=%d leaves, <=%d vertices)" % (decoration, max_leaves, max_vertices))
    for n in range(1, max_leaves + 1):
        bad = None
        count = 0
        for t in enum_bvtrees(n, max_vertices, planar=(decoration == "ass")):
            count += 1
            dd = bv_differential(bv_differential(BVChain.of(t, 1, decoration)))
            if not dd.is_zero():
                bad = t
                break
        rep.add("n=%d (%d trees)" % (n, count), bad is None,
                "" if bad is None else "d^2(%s) != 0" % bv_string(bad))
    return rep


def check_derivation(max_leaves=4, max_vertices=4, decoration="ass") -> Report:
    """d(x o_i y) = dx o_i y + (-1)^|x| x o_i dy over all pairs whose
    composite stays within the bounds."""
    rep = Report("derivation property (%s)" % decoration)
    planar = decoration == "ass"
    trees = {n: enum_bvtrees(n, max_vertices, planar=planar) for n in range(1, max_leaves + 1)}
    bad = None
    count = 0
    for nx in range(1, max_leaves + 1):
        for ny in range(1, max_leaves + 2 - nx):
            for x in trees[nx]:
                vx = bv_vertex_count(x)
                X = BVChain.of(x, 1, decoration)
                dX = bv_differential(X)
                sx = -1 if black_count(x) % 2 else 1
                for y in trees[ny]:
                    if vx + bv_vertex_count(y) - 1 > max_vertices:
                        continue
                    Y = BVChain.of(y, 1, decoration)
                    dY = bv_differential(Y)
                    for i in range(1, nx + 1):
                        count += 1
                        lhs = bv_differential(bv_compose(X, i, Y))
                        rhs = bv_compose(dX, i, Y) + sx * bv_compose(X, i, dY)
                        if lhs != rhs and bad is None:
                            bad = (x, i, y)
    rep.add("%d compositions" % count, bad is None,
            "" if bad is None else "fails for %s o_%d %s" % (bv_string(bad[0]), bad[1], bv_string(bad[2])))
    return rep


def check_associativity(max_leaves=3, max_vertices=3, decoration="ass") -> Report:
    """Sequential and parallel composition axioms on triples of trees."""
    rep = Report("composition axioms (%s)" % decoration)
    planar = decoration == "ass"
    trees = [t for n in range(1, max_leaves + 1) for t in enum_bvtrees(n, max_vertices, planar=planar)]
    seq_bad = par_bad = None
    nseq = npar = 0
    for x in trees:
        X = BVChain.of(x, 1, decoration)
        nx = len(bv_leaves(x))
        for y in trees:
            Y = BVChain.of(y, 1, decoration)
            ny = len(bv_leaves(y))
            for z in trees:
                Z = BVChain.of(z, 1, decoration)
                for i in range(1, nx + 1):
                    xy = bv_compose(X, i, Y)
                    for j in range(i, i + ny):
                        nseq += 1
                        lhs = bv_compose(xy, j, Z)
                        rhs = bv_compose(X, i, bv_compose(Y, j - i + 1, Z))
                        if lhs != rhs and seq_bad is None:
                            seq_bad = (x, i, y, j, z)
                    for j in range(i + 1, nx + 1):
                        npar += 1
                        lhs = bv_compose(xy, j + ny - 1, Z)
                        sg = -1 if (black_count(y) * black_count(z)) % 2 else 1
                        rhs = sg * bv_compose(bv_compose(X, j, Z), i, Y)
                        if lhs != rhs and par_bad is None:
                            par_bad = (x, i, y, j, z)
    rep.add("sequential (%d)" % nseq, seq_bad is None, "" if seq_bad is None else repr(seq_bad))
    rep.add("parallel (%d)" % npar, par_bad is None, "" if par_bad is None else repr(par_bad))
    return rep
