"""
Index sets for amplitudes: planar trees, leaf-labelled trees, BV-trees and
stable graphs, each with a canonical form and a deterministic order.

Encodings
---------
planar tree     leaf ``()``; internal vertex = tuple of >= 2 children.
                String form: leaf ``|``, vertex ``(`` children ``)``,
                e.g. ``((||)|)``.
labelled tree   leaf = int label; vertex = tuple of >= 2 children sorted by
                their smallest leaf label.  String form: ``(1(23))``-style
                with labels separated by commas, e.g. ``(1,(2,3))``.
BV-tree         leaf = int label; vertex = ``(color, children)`` where
                ``color`` is the color of the edge above the vertex: ``"b"``,
                ``"w"`` or ``"r"`` for the root extremity.
                String form: ``r[1,b[2,3]]``.
stable graph    genus labels per vertex plus a sorted edge list ``(u, v)``
                with ``u <= v``.  String form: ``g=0,0;e=0-1,0-1,0-1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from math import factorial

LEAF = ()


# ---------------------------------------------------------------------------
# planar trees

def compositions(n: int, k: int):
    """Ordered k-tuples of positive integers summing to n, lexicographic."""
    if k == 1:
        yield (n,)
        return
    for first in range(1, n - k + 2):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _planar(n: int):
    if n == 1:
        return (LEAF,)
    out = []
    for k in range(2, n + 1):
        for comp in compositions(n, k):
            for kids in itertools.product(*(_planar(c) for c in comp)):
                out.append(tuple(kids))
    return tuple(out)


def enum_planar(n: int) -> list:
    if n < 2:
        raise ValueError("planar trees need n >= 2 leaves")
    return list(_planar(n))


def leaf_count(tree) -> int:
    if tree == LEAF:
        return 1
    return sum(leaf_count(c) for c in tree)


def planar_string(tree) -> str:
    if tree == LEAF:
        return "|"
    return "(" + "".join(planar_string(c) for c in tree) + ")"


def parse_planar(s: str):
    pos = 0

    def node():
        nonlocal pos
        ch = s[pos]
        if ch == "|":
            pos += 1
            return LEAF
        if ch != "(":
            raise ValueError("bad planar tree string %r" % s)
        pos += 1
        kids = []
        while s[pos] != ")":
            kids.append(node())
        pos += 1
        return tuple(kids)

    t = node()
    if pos != len(s):
        raise ValueError("trailing characters in %r" % s)
    return t


def vertex_arities(tree):
    if tree == LEAF:
        return []
    out = [len(tree)]
    for c in tree:
        out += vertex_arities(c)
    return out


def internal_edges(tree) -> int:
    return max(len(vertex_arities(tree)) - 1, 0)


# ---------------------------------------------------------------------------
# leaf-labelled trees

def min_label(tree) -> int:
    if isinstance(tree, int):
        return tree
    return min(min_label(c) for c in tree)


def canonical_labelled(tree):
    """Sort children by smallest leaf label, recursively."""
    if isinstance(tree, int):
        return tree
    kids = [canonical_labelled(c) for c in tree]
    kids.sort(key=min_label)
    return tuple(kids)


def labels_in_order(tree) -> list:
    if isinstance(tree, int):
        return [tree]
    out = []
    for c in tree:
        out += labels_in_order(c)
    return out


def labelled_shape(tree):
    """Forget labels: the underlying planar tree of this embedding."""
    if isinstance(tree, int):
        return LEAF
    return tuple(labelled_shape(c) for c in tree)


def labelled_string(tree) -> str:
    if isinstance(tree, int):
        return str(tree)
    return "(" + ",".join(labelled_string(c) for c in tree) + ")"


def set_partitions(items):
    """All set partitions of a list, blocks in order of their first element."""
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        # first element joins an existing block or starts its own
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


@lru_cache(maxsize=None)
def _labelled(labels: tuple):
    if len(labels) == 1:
        return (labels[0],)
    out = []
    for part in set_partitions(labels):
        if len(part) < 2:
            continue
        blocks = sorted((tuple(sorted(b)) for b in part), key=lambda b: b[0])
        for kids in itertools.product(*(_labelled(b) for b in blocks)):
            out.append(tuple(kids))
    out.sort(key=labelled_string)
    return tuple(out)


def enum_labelled(n: int) -> list:
    if n < 2:
        raise ValueError("labelled trees need n >= 2 leaves")
    return list(_labelled(tuple(range(1, n + 1))))


# ---------------------------------------------------------------------------
# BV-trees

def bv_is_vertex(node) -> bool:
    return not isinstance(node, int)


def bv_string(node) -> str:
    if isinstance(node, int):
        return str(node)
    color, kids = node
    return color + "[" + ",".join(bv_string(k) for k in kids) + "]"


def parse_bv(s: str):
    pos = 0

    def node():
        nonlocal pos
        if s[pos].isdigit():
            j = pos
            while j < len(s) and s[j].isdigit():
                j += 1
            v = int(s[pos:j])
            pos = j
            return v
        color = s[pos]
        if s[pos + 1] != "[":
            raise ValueError("bad BV-tree string %r" % s)
        pos += 2
        kids = []
        while True:
            kids.append(node())
            if s[pos] == ",":
                pos += 1
                continue
            if s[pos] == "]":
                pos += 1
                break
        return (color, tuple(kids))

    t = node()
    if pos != len(s):
        raise ValueError("trailing characters in %r" % s)
    return t


def bv_leaves(node) -> list:
    if isinstance(node, int):
        return [node]
    out = []
    for k in node[1]:
        out += bv_leaves(k)
    return out


def bv_min_label(node) -> int:
    return min(bv_leaves(node))


def bv_vertex_count(node) -> int:
    if isinstance(node, int):
        return 0
    return 1 + sum(bv_vertex_count(k) for k in node[1])


def bv_canonical(node):
    """Abstract (non-planar) canonical form: children sorted by least label."""
    if isinstance(node, int):
        return node
    color, kids = node
    kids = sorted((bv_canonical(k) for k in kids), key=bv_min_label)
    return (color, tuple(kids))


def bv_edges(node, path=()):
    """Internal edges as (path-to-lower-vertex, color), preorder."""
    out = []
    if isinstance(node, int):
        return out
    color, kids = node
    if path:
        out.append((path, color))
    for i, k in enumerate(kids):
        out += bv_edges(k, path + (i,))
    return out


def bv_valid(node, is_root=True) -> bool:
    """Every vertex has >= 1 input; bivalent vertices touch an extremity."""
    if isinstance(node, int):
        return True
    color, kids = node
    if (color == "r") != is_root:
        return False
    if not kids:
        return False
    if len(kids) == 1 and not is_root and not isinstance(kids[0], int):
        return False
    return all(bv_valid(k, False) for k in kids)


def _bv_shapes(k: int, budget: int, is_root: bool):
    """Uncolored planar shapes (leaves = 0) with k leaves, at most ``budget``
    vertices; returns list of (node, vertices used).  Non-root vertices get
    the placeholder color ``"?"``."""
    out = []
    if budget < 1:
        return out
    color = "r" if is_root else "?"
    for a in range(1, k + 1):
        if a == 1 and not is_root and k != 1:
            continue
        for comp in compositions(k, a):
            parts = []
            for c in comp:
                opts = [(0, 0)] if c == 1 else []
                if not (a == 1 and not is_root):
                    opts += _bv_shapes(c, budget - 1, False)
                parts.append(opts)
            for combo in itertools.product(*parts):
                used = 1 + sum(u for _, u in combo)
                if used <= budget:
                    out.append(((color, tuple(n for n, _ in combo)), used))
    return out


def _color_all(node):
    if isinstance(node, int):
        yield node
        return
    color, kids = node
    colors = ("b", "w") if color == "?" else (color,)
    for c in colors:
        for kk in itertools.product(*(list(_color_all(k)) for k in kids)):
            yield (c, tuple(kk))


def _label(node, labels):
    it = iter(labels)

    def rec(n):
        if isinstance(n, int):
            return next(it)
        return (n[0], tuple(rec(k) for k in n[1]))

    return rec(node)


def enum_bvtrees(n: int, max_vertices: int, planar: bool = False) -> list:
    """All n-BV-trees with at most ``max_vertices`` vertices.

    ``planar=False`` gives isomorphism classes of leaf-labelled trees (the
    index set for Com decorations); ``planar=True`` keeps every planar
    embedding, which is the basis of Ass-decorated trees.
    """
    if n < 1:
        raise ValueError("BV-trees need n >= 1 leaves")
    seen = set()
    out = []
    for shape, _ in _bv_shapes(n, max_vertices, True):
        for colored in _color_all(shape):
            for perm in itertools.permutations(range(1, n + 1)):
                t = _label(colored, perm)
                if not planar:
                    t = bv_canonical(t)
                if t in seen:
                    continue
                seen.add(t)
                out.append(t)
    out.sort(key=lambda t: (bv_vertex_count(t), bv_string(t)))
    return out


def bv_recolor(node, path):
    """T^e: the black edge above the vertex at ``path`` becomes white."""
    if not path:
        color, kids = node
        if color != "b":
            raise ValueError("edge is not black")
        return ("w", kids)
    color, kids = node
    i = path[0]
    kids = kids[:i] + (bv_recolor(kids[i], path[1:]),) + kids[i + 1:]
    return (color, kids)


def bv_contract(node, path):
    """T_e: merge the vertex at ``path`` into its parent (planar splice)."""
    if len(path) == 1:
        color, kids = node
        i = path[0]
        child = kids[i]
        return (color, kids[:i] + child[1] + kids[i + 1:])
    color, kids = node
    i = path[0]
    kids = kids[:i] + (bv_contract(kids[i], path[1:]),) + kids[i + 1:]
    return (color, kids)


# ---------------------------------------------------------------------------
# stable graphs

@dataclass(frozen=True)
class LabelledGraph:
    """A graph with a chosen order on vertices and edges and a direction on
    every edge.  Loops are edges (v, v); parallel edges are allowed."""

    genus: tuple
    edges: tuple

    @property
    def n_vertices(self):
        return len(self.genus)

    def valence(self, v) -> int:
        return sum((a == v) + (b == v) for a, b in self.edges)

    def betti(self) -> int:
        return len(self.edges) - len(self.genus) + 1

    def total_genus(self) -> int:
        return self.betti() + sum(self.genus)

    def is_connected(self) -> bool:
        n = len(self.genus)
        if n == 0:
            return False
        adj = {v: set() for v in range(n)}
        for a, b in self.edges:
            adj[a].add(b)
            adj[b].add(a)
        seen = {0}
        stack = [0]
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == n

    def unstable_vertices(self) -> list:
        return [v for v, g in enumerate(self.genus) if 2 * g - 2 + self.valence(v) <= 0]

    def is_stable(self) -> bool:
        return not self.unstable_vertices()

    def flags(self, v):
        """Half-edges at v as (edge index, end) in edge order."""
        out = []
        for k, (a, b) in enumerate(self.edges):
            if a == v:
                out.append((k, 0))
            if b == v:
                out.append((k, 1))
        return out


@dataclass(frozen=True)
class Isomorphism:
    """vertex i -> vperm[i], edge k -> eperm[k], with eflip[k] set when the
    direction of edge k is reversed."""

    vperm: tuple
    eperm: tuple
    eflip: tuple


def perm_sign(p) -> int:
    p = list(p)
    sign = 1
    seen = [False] * len(p)
    for i in range(len(p)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def orientation_character(iso: Isomorphism, vertex_odd: bool, edge_odd: bool,
                          flip_odd: bool) -> int:
    s = 1
    if vertex_odd:
        s *= perm_sign(iso.vperm)
    if edge_odd:
        s *= perm_sign(iso.eperm)
    if flip_odd:
        s *= -1 if sum(iso.eflip) % 2 else 1
    return s


def _key(genus, edges, perm):
    inv = [0] * len(perm)
    for i, p in enumerate(perm):
        inv[p] = i
    g = tuple(genus[inv[i]] for i in range(len(perm)))
    e = tuple(sorted(tuple(sorted((perm[a], perm[b]))) for a, b in edges))
    return (g, e)


def _edge_matching(lg: LabelledGraph, perm, target_edges):
    """Match lg's edges to target edges along the vertex map ``perm``; returns
    (eperm, eflip) using the first free target edge for each source edge."""
    used = [False] * len(target_edges)
    eperm, eflip = [], []
    for a, b in lg.edges:
        pa, pb = perm[a], perm[b]
        want = tuple(sorted((pa, pb)))
        for k, te in enumerate(target_edges):
            if not used[k] and te == want:
                used[k] = True
                eperm.append(k)
                eflip.append(pa != pb and pa != te[0])
                break
        else:
            raise ValueError("vertex map is not an isomorphism")
    return tuple(eperm), tuple(eflip)


def canonicalize(lg: LabelledGraph):
    """(canonical LabelledGraph, Isomorphism from lg onto it)."""
    n = lg.n_vertices
    best = None
    for perm in itertools.permutations(range(n)):
        k = _key(lg.genus, lg.edges, perm)
        if best is None or k < best[0]:
            best = (k, perm)
    (g, e), perm = best
    canon = LabelledGraph(g, e)
    eperm, eflip = _edge_matching(lg, perm, e)
    return canon, Isomorphism(tuple(perm), eperm, eflip)


def automorphisms(lg: LabelledGraph) -> list:
    """All automorphisms as half-edge-level isomorphisms of lg onto itself."""
    n = lg.n_vertices
    out = []
    base = _key(lg.genus, lg.edges, tuple(range(n)))
    groups = {}
    for k, (a, b) in enumerate(lg.edges):
        groups.setdefault(tuple(sorted((a, b))), []).append(k)
    for perm in itertools.permutations(range(n)):
        if _key(lg.genus, lg.edges, perm) != base:
            continue
        # for every edge class choose a bijection onto its image class
        per_class = []
        for pair, ks in sorted(groups.items()):
            img = tuple(sorted((perm[pair[0]], perm[pair[1]])))
            targets = groups[img]
            loop = pair[0] == pair[1]
            options = []
            for bij in itertools.permutations(targets):
                if loop:
                    for flips in itertools.product((False, True), repeat=len(ks)):
                        options.append(list(zip(ks, bij, flips)))
                else:
                    options.append([(k, t, None) for k, t in zip(ks, bij)])
            per_class.append(options)
        for choice in itertools.product(*per_class):
            eperm = [0] * len(lg.edges)
            eflip = [False] * len(lg.edges)
            for part in choice:
                for k, t, fl in part:
                    eperm[k] = t
                    if fl is None:
                        a, b = lg.edges[k]
                        ta, tb = lg.edges[t]
                        eflip[k] = perm[a] != ta
                    else:
                        eflip[k] = fl
            out.append(Isomorphism(tuple(perm), tuple(eperm), tuple(eflip)))
    return out


def automorphism_order(lg: LabelledGraph) -> int:
    """|Aut| by the closed formula (vertex symmetries times edge symmetries)."""
    n = lg.n_vertices
    base = _key(lg.genus, lg.edges, tuple(range(n)))
    vsym = sum(1 for p in itertools.permutations(range(n))
               if _key(lg.genus, lg.edges, p) == base)
    mult = {}
    for a, b in lg.edges:
        mult[(a, b) if a <= b else (b, a)] = mult.get((a, b) if a <= b else (b, a), 0) + 1
    esym = 1
    for (a, b), m in mult.items():
        esym *= factorial(m) * (2 ** m if a == b else 1)
    return vsym * esym


@dataclass(frozen=True)
class StableGraph:
    """A canonical stable graph; its vertex/edge order is the reference
    orientation."""

    graph: LabelledGraph
    aut_order: int

    @property
    def genus(self):
        return self.graph.genus

    @property
    def edges(self):
        return self.graph.edges

    def key(self) -> str:
        return graph_string(self.graph)

    def total_genus(self):
        return self.graph.total_genus()


def graph_string(lg: LabelledGraph) -> str:
    g = ",".join(str(x) for x in lg.genus)
    e = ",".join("%d-%d" % ab for ab in lg.edges)
    return "g=%s;e=%s" % (g, e)


def parse_graph(s: str) -> LabelledGraph:
    gpart, epart = s.split(";")
    genus = tuple(int(x) for x in gpart[2:].split(",") if x != "")
    edges = tuple(tuple(int(y) for y in x.split("-")) for x in epart[2:].split(",") if x != "")
    return LabelledGraph(genus, edges)


def enum_stable_graphs(total_genus: int, max_vertices: int) -> list:
    """Stable connected legless graphs of the given total genus, one per
    isomorphism class, ordered by (#edges, #vertices, string)."""
    if total_genus < 1:
        raise ValueError("total genus must be at least 1")
    g = total_genus
    found = {}
    for nv in range(1, max_vertices + 1):
        pairs = [(a, b) for a in range(nv) for b in range(a, nv)]
        for labels in itertools.product(range(g + 1), repeat=nv):
            if list(labels) != sorted(labels):
                continue
            b1 = g - sum(labels)
            if b1 < 0:
                continue
            E = b1 + nv - 1
            for edges in itertools.combinations_with_replacement(pairs, E):
                lg = LabelledGraph(tuple(labels), tuple(edges))
                if not lg.is_connected() or not lg.is_stable():
                    continue
                canon, _ = canonicalize(lg)
                if canon not in found:
                    found[canon] = StableGraph(canon, automorphism_order(canon))
    out = list(found.values())
    out.sort(key=lambda sg: (len(sg.edges), sg.graph.n_vertices, sg.key()))
    return out


def contract_edge(lg: LabelledGraph, k: int):
    """Contract edge k.  Returns (graph, stable flag).

    Non-loop: the endpoints merge into the lower-numbered one, genera add,
    the higher-numbered vertex is deleted and later vertices shift down.
    Loop: the edge is removed and the vertex genus goes up by one.  Remaining
    edges keep their relative order and directions.
    """
    if not 0 <= k < len(lg.edges):
        raise IndexError("no edge %d" % k)
    a, b = lg.edges[k]
    rest = lg.edges[:k] + lg.edges[k + 1:]
    genus = list(lg.genus)
    if a == b:
        genus[a] += 1
        out = LabelledGraph(tuple(genus), rest)
        return out, out.is_stable()
    keep, gone = min(a, b), max(a, b)
    genus[keep] += genus[gone]
    del genus[gone]

    def rn(v):
        if v == gone:
            return keep
        return v - 1 if v > gone else v

    out = LabelledGraph(tuple(genus), tuple((rn(x), rn(y)) for x, y in rest))
    return out, out.is_stable()
