"""
Z/2-graded exact linear algebra over the rationals.

Maps are stored sparsely as ``{(outs, ins): coefficient}`` where ``outs``
and ``ins`` are tuples of basis indices.  A map with ``arity`` inputs and
``coarity`` outputs is an element of Hom(V^{(x)arity}, W^{(x)coarity}); the
ground field is the tensor power of length zero.

Sign rule, used everywhere:

    (f (x) g)(a (x) b) = (-1)^{|g||a|} f(a) (x) g(b)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

Scalar = Fraction


def Q(x) -> Fraction:
    """Coerce ints, strings like "3/4", or Fractions to an exact scalar."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point scalars are not accepted: %r" % (x,))
    return Fraction(x)


class GradedSpace:
    """An ordered basis of homogeneous vectors ``(name, parity)``."""

    __slots__ = ("names", "parities", "_index", "_hash")

    def __init__(self, basis: Iterable[tuple[str, int]]):
        basis = list(basis)
        self.names = tuple(str(n) for n, _ in basis)
        self.parities = tuple(int(p) % 2 for _, p in basis)
        if len(set(self.names)) != len(self.names):
            raise ValueError("basis names must be unique: %r" % (self.names,))
        self._index = {n: i for i, n in enumerate(self.names)}
        self._hash = hash((self.names, self.parities))

    @classmethod
    def from_parities(cls, parities: Sequence[int], prefix: str = "e") -> "GradedSpace":
        return cls(("%s%d" % (prefix, i), p) for i, p in enumerate(parities))

    @property
    def dim(self) -> int:
        return len(self.names)

    @property
    def even_dim(self) -> int:
        return self.parities.count(0)

    @property
    def odd_dim(self) -> int:
        return self.parities.count(1)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError("unknown basis vector %r" % (name,)) from None

    def parity(self, i: int) -> int:
        return self.parities[i]

    def tuple_parity(self, idx: Sequence[int]) -> int:
        p = 0
        for i in idx:
            p += self.parities[i]
        return p & 1

    def basis(self):
        return list(zip(self.names, self.parities))

    def __eq__(self, other):
        if not isinstance(other, GradedSpace):
            return NotImplemented
        return self.names == other.names and self.parities == other.parities

    def __hash__(self):
        return self._hash

    def __repr__(self):
        items = ", ".join("%s:%d" % (n, p) for n, p in zip(self.names, self.parities))
        return "GradedSpace(%s)" % items


GROUND = GradedSpace([("1", 0)])


def parity_reverse(V: GradedSpace) -> GradedSpace:
    return GradedSpace((n, 1 - p) for n, p in V.basis())


def koszul_sign(parities: Sequence[int], perm: Sequence[int]) -> int:
    """Sign of reordering homogeneous factors: position k of the result holds
    factor ``perm[k]`` of the input."""
    sign = 0
    n = len(perm)
    for a in range(n):
        pa = parities[perm[a]]
        if not pa:
            continue
        for b in range(a + 1, n):
            if perm[b] < perm[a] and parities[perm[b]]:
                sign ^= 1
    return -1 if sign else 1


class MultiMap:
    """A homogeneous linear map V^{(x)arity} -> W^{(x)coarity}.

    Immutable once built; zero coefficients are dropped and every stored
    entry is checked against ``parity``.
    """

    __slots__ = ("source", "target", "arity", "coarity", "parity", "entries", "_by_out")

    def __init__(self, source: GradedSpace, target: GradedSpace, arity: int,
                 coarity: int, parity: int, entries=None, check: bool = True):
        self.source = source
        self.target = target
        self.arity = int(arity)
        self.coarity = int(coarity)
        self.parity = int(parity) % 2
        clean = {}
        if entries:
            for key, c in entries.items():
                if c:
                    clean[key] = c if isinstance(c, Fraction) else Q(c)
        if check:
            for outs, ins in clean:
                if len(outs) != self.coarity or len(ins) != self.arity:
                    raise ValueError("entry %r has wrong shape for %d->%d map"
                                     % ((outs, ins), self.arity, self.coarity))
                if (target.tuple_parity(outs) + source.tuple_parity(ins)) % 2 != self.parity:
                    raise ValueError("entry %r violates parity %d" % ((outs, ins), self.parity))
        self.entries = clean
        self._by_out = None

    # -- construction helpers -------------------------------------------------

    def _like(self, entries, parity=None):
        cls = GradedMap if (self.arity, self.coarity) == (1, 1) else MultiMap
        return _build(cls, self.source, self.target, self.arity, self.coarity,
                      self.parity if parity is None else parity, entries)

    @staticmethod
    def zero(source, target, arity, coarity, parity):
        cls = GradedMap if (arity, coarity) == (1, 1) else MultiMap
        return _build(cls, source, target, arity, coarity, parity, {})

    # -- algebra ---------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.entries

    def _check_same_shape(self, other):
        if (self.source, self.target, self.arity, self.coarity) != (
                other.source, other.target, other.arity, other.coarity):
            raise ValueError("shape mismatch")

    def __add__(self, other: "MultiMap") -> "MultiMap":
        self._check_same_shape(other)
        if not other.entries:
            return self
        if not self.entries:
            return other
        if self.parity != other.parity:
            raise ValueError("cannot add maps of different parity")
        acc = dict(self.entries)
        for k, c in other.entries.items():
            acc[k] = acc.get(k, 0) + c
        return self._like(acc)

    def __neg__(self):
        return self._like({k: -c for k, c in self.entries.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rmul__(self, c):
        c = Q(c)
        return self._like({k: c * v for k, v in self.entries.items()})

    def __eq__(self, other):
        if not isinstance(other, MultiMap):
            return NotImplemented
        return ((self.source, self.target, self.arity, self.coarity)
                == (other.source, other.target, other.arity, other.coarity)
                and self.entries == other.entries
                and (not self.entries or self.parity == other.parity))

    def __hash__(self):
        return hash((self.source, self.target, self.arity, self.coarity,
                     frozenset(self.entries.items())))

    def __repr__(self):
        return "<%s %d->%d parity=%d nnz=%d>" % (
            type(self).__name__, self.arity, self.coarity, self.parity, len(self.entries))

    def by_output(self):
        """Index entries by output tuple (cached)."""
        if self._by_out is None:
            d = {}
            for (outs, ins), c in self.entries.items():
                d.setdefault(outs, []).append((ins, c))
            self._by_out = d
        return self._by_out

    def first_nonzero(self):
        if not self.entries:
            return None
        k = min(self.entries)
        return k, self.entries[k]

    def describe_entry(self, key) -> str:
        outs, ins = key
        o = "(x)".join(self.target.names[i] for i in outs) or "1"
        i = "(x)".join(self.source.names[j] for j in ins) or "1"
        return "%s <- %s" % (o, i)

    def restrict(self, source_map: "MultiMap", target_proj: "MultiMap") -> "MultiMap":
        """Conjugate: target_proj o self o source_map^{(x)arity}."""
        inner = compose_tensor(self, [source_map] * self.arity) if self.arity else self
        return compose(target_proj, inner) if self.coarity == 1 else inner


class GradedMap(MultiMap):
    """A single-input single-output map; a matrix with a parity."""

    __slots__ = ()

    def __init__(self, source, target, parity, entries=None, check=True):
        if entries and not all(isinstance(k[0], tuple) for k in entries):
            entries = {((i,), (j,)): c for (i, j), c in entries.items()}
        super().__init__(source, target, 1, 1, parity, entries, check)

    @classmethod
    def from_matrix(cls, source, target, parity, rows) -> "GradedMap":
        ent = {}
        for i, row in enumerate(rows):
            for j, c in enumerate(row):
                if c:
                    ent[((i,), (j,))] = Q(c)
        return cls(source, target, parity, ent)

    @classmethod
    def identity(cls, V: GradedSpace) -> "GradedMap":
        return cls(V, V, 0, {((i,), (i,)): Fraction(1) for i in range(V.dim)})

    def matrix(self):
        M = [[Fraction(0)] * self.source.dim for _ in range(self.target.dim)]
        for ((i,), (j,)), c in self.entries.items():
            M[i][j] = c
        return M

    def get(self, i, j):
        return self.entries.get(((i,), (j,)), Fraction(0))

    def apply(self, vec):
        """Apply to a dense coordinate vector."""
        out = [Fraction(0)] * self.target.dim
        for ((i,), (j,)), c in self.entries.items():
            if vec[j]:
                out[i] += c * vec[j]
        return out


def _build(cls, source, target, arity, coarity, parity, entries):
    obj = MultiMap.__new__(cls)
    MultiMap.__init__(obj, source, target, arity, coarity, parity, entries, check=False)
    return obj


def identity(V: GradedSpace) -> GradedMap:
    return GradedMap.identity(V)


def compose(f: MultiMap, g: MultiMap) -> MultiMap:
    """f o g.  No Koszul sign: composition does not move symbols past each other."""
    if g.coarity != f.arity:
        raise ValueError("dimension mismatch: %d outputs into %d inputs" % (g.coarity, f.arity))
    if g.coarity and g.target != f.source:
        raise ValueError("dimension mismatch: target of g is not source of f")
    f_by_in = {}
    for (fo, fi), c in f.entries.items():
        f_by_in.setdefault(fi, []).append((fo, c))
    acc = {}
    for (go, gi), c in g.entries.items():
        for fo, cf in f_by_in.get(go, ()):
            key = (fo, gi)
            acc[key] = acc.get(key, 0) + cf * c
    cls = GradedMap if (g.arity, f.coarity) == (1, 1) else MultiMap
    return _build(cls, g.source, f.target, g.arity, f.coarity, f.parity + g.parity, acc)


def tensor(fs: Sequence[MultiMap]) -> MultiMap:
    """f_1 (x) ... (x) f_k with the Koszul rule generalised left to right."""
    fs = list(fs)
    if not fs:
        raise ValueError("tensor of an empty list")
    source = next((f.source for f in fs if f.arity), fs[0].source)
    target = next((f.target for f in fs if f.coarity), fs[0].target)
    for f in fs:
        if f.arity and f.source != source:
            raise ValueError("tensor factors must share a source space")
        if f.coarity and f.target != target:
            raise ValueError("tensor factors must share a target space")
    combos = [((), (), Fraction(1), 0)]
    for f in fs:
        new = []
        fp = f.parity
        for outs, ins, c, pin in combos:
            flip = fp and pin
            for (o, i), cf in f.entries.items():
                v = c * cf
                new.append((outs + o, ins + i, -v if flip else v,
                            pin ^ source.tuple_parity(i)))
        combos = new
        if not combos:
            break
    acc = {}
    for outs, ins, c, _ in combos:
        key = (outs, ins)
        acc[key] = acc.get(key, 0) + c
    arity = sum(f.arity for f in fs)
    coarity = sum(f.coarity for f in fs)
    cls = GradedMap if (arity, coarity) == (1, 1) else MultiMap
    return _build(cls, source, target, arity, coarity, sum(f.parity for f in fs), acc)


def compose_tensor(outer: MultiMap, inners: Sequence[MultiMap]) -> MultiMap:
    """outer o (inners[0] (x) ... (x) inners[k-1]) for single-output inners.

    Equal to ``compose(outer, tensor(inners))`` without materialising the
    tensor product.
    """
    if len(inners) != outer.arity:
        raise ValueError("need %d inner maps, got %d" % (outer.arity, len(inners)))
    for g in inners:
        if g.coarity != 1:
            raise ValueError("compose_tensor needs single-output inner maps")
    if not inners:
        return outer
    V = inners[0].source
    src = next((g.source for g in inners if g.arity), V)
    idx = [g.by_output() for g in inners]
    pars = [g.parity for g in inners]
    acc = {}
    for (o, ins), c in outer.entries.items():
        combos = [((), c, 0)]
        for k, b in enumerate(ins):
            lst = idx[k].get((b,))
            if not lst:
                combos = None
                break
            pk = pars[k]
            new = []
            for gi, gc in lst:
                pi = src.tuple_parity(gi)
                for ins_acc, v, pin in combos:
                    w = v * gc
                    if pk and pin:
                        w = -w
                    new.append((ins_acc + gi, w, pin ^ pi))
            combos = new
        if not combos:
            continue
        for ins_acc, v, _ in combos:
            key = (o, ins_acc)
            acc[key] = acc.get(key, 0) + v
    arity = sum(g.arity for g in inners)
    cls = GradedMap if (arity, outer.coarity) == (1, 1) else MultiMap
    return _build(cls, src, outer.target, arity, outer.coarity,
                  outer.parity + sum(pars), acc)


def plug(outer: MultiMap, position: int, inner: MultiMap) -> MultiMap:
    """outer o_position inner, i.e. outer o (id^{position-1} (x) inner (x) id^{...}).

    ``position`` is 1-based.
    """
    if not 1 <= position <= outer.arity:
        raise IndexError("slot %d out of range for arity %d" % (position, outer.arity))
    if inner.coarity != 1:
        raise ValueError("plug needs a single-output inner map")
    k = position - 1
    src = outer.source
    by_out = inner.by_output()
    ip = inner.parity
    acc = {}
    for (o, ins), c in outer.entries.items():
        lst = by_out.get((ins[k],))
        if not lst:
            continue
        pre = ins[:k]
        post = ins[k + 1:]
        if ip and src.tuple_parity(pre):
            c = -c
        for gi, gc in lst:
            key = (o, pre + gi + post)
            acc[key] = acc.get(key, 0) + c * gc
    arity = outer.arity - 1 + inner.arity
    cls = GradedMap if (arity, outer.coarity) == (1, 1) else MultiMap
    return _build(cls, inner.source if inner.arity else src, outer.target, arity,
                  outer.coarity, outer.parity + ip, acc)


def permute_inputs(f: MultiMap, perm: Sequence[int]) -> MultiMap:
    """f o sigma, where sigma sends a_1 (x) ... (x) a_n to
    a_{perm[0]} (x) ... (x) a_{perm[n-1]} (0-based) with Koszul sign."""
    n = f.arity
    if sorted(perm) != list(range(n)):
        raise ValueError("not a permutation: %r" % (perm,))
    inv = [0] * n
    for pos, src in enumerate(perm):
        inv[src] = pos
    acc = {}
    src_space = f.source
    for (o, ins), c in f.entries.items():
        # f receives ins = (a_{perm[0]}, ...); recover the original a's.
        orig = [None] * n
        for pos in range(n):
            orig[perm[pos]] = ins[pos]
        pars = [src_space.parity(b) for b in orig]
        key = (o, tuple(orig))
        acc[key] = acc.get(key, 0) + koszul_sign(pars, perm) * c
    return f._like(acc)


# ---------------------------------------------------------------------------
# dense exact matrices

def zeros(r, c):
    return [[Fraction(0)] * c for _ in range(r)]


def mat_mul(A, B):
    n = len(B[0]) if B else 0
    out = zeros(len(A), n)
    for i, row in enumerate(A):
        oi = out[i]
        for k, a in enumerate(row):
            if a:
                for j, b in enumerate(B[k]):
                    if b:
                        oi[j] += a * b
    return out


@dataclass(frozen=True)
class RrefResult:
    reduced: tuple
    pivots: tuple
    kernel: tuple    # basis vectors of the kernel, in source coordinates
    image: tuple     # basis vectors of the image, in target coordinates


def rref_matrix(M, ncols=None):
    """Reduced row echelon form.  Pivot rule: first nonzero entry at or below
    the current row, scanning columns left to right."""
    R = [[Q(x) for x in row] for row in M]
    rows = len(R)
    cols = ncols if ncols is not None else (len(R[0]) if R else 0)
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        p = next((i for i in range(r, rows) if R[i][c]), None)
        if p is None:
            continue
        R[r], R[p] = R[p], R[r]
        inv = 1 / R[r][c]
        R[r] = [x * inv for x in R[r]]
        for i in range(rows):
            if i != r and R[i][c]:
                f = R[i][c]
                Ri, Rr = R[i], R[r]
                R[i] = [a - f * b for a, b in zip(Ri, Rr)]
        pivots.append(c)
        r += 1
    return R, pivots


def kernel_from_rref(R, pivots, ncols):
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in enumerate(pivots):
            if R[row][f]:
                v[pc] = -R[row][f]
        basis.append(v)
    return basis


def rref(m: GradedMap) -> RrefResult:
    """Row-reduce a graded map.  Row operations never mix parity blocks, so the
    kernel and image bases come out homogeneous."""
    M = m.matrix()
    ncols = m.source.dim
    R, piv = rref_matrix(M, ncols)
    ker = kernel_from_rref(R, piv, ncols)
    img = [[M[i][c] for i in range(m.target.dim)] for c in piv]
    return RrefResult(tuple(tuple(r) for r in R), tuple(piv),
                      tuple(tuple(v) for v in ker), tuple(tuple(v) for v in img))


def rank(M) -> int:
    if not M:
        return 0
    return len(rref_matrix(M)[1])


def columns_to_matrix(vectors, dim):
    """Matrix whose columns are the given vectors."""
    return [[Q(v[i]) for v in vectors] for i in range(dim)]


def inverse(M):
    n = len(M)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    R, piv = rref_matrix(aug, n)
    if piv != list(range(n)):
        raise ValueError("matrix is singular")
    return [row[n:] for row in R]


def solve(A, b):
    """One solution x of A x = b (free variables set to zero), or None."""
    n = len(A[0]) if A else 0
    aug = [list(row) + [Q(bi)] for row, bi in zip(A, b)]
    R, piv = rref_matrix(aug, n + 1)
    if n in piv:
        return None
    x = [Fraction(0)] * n
    for row, pc in enumerate(piv):
        x[pc] = R[row][n]
    return x


def extend_to_basis(chosen, candidates, dim):
    """Greedily add candidate vectors independent of ``chosen``; returns the
    indices of the candidates that were added (first-suitable rule)."""
    current = [list(v) for v in chosen]
    r = rank(current) if current else 0
    picked = []
    for k, v in enumerate(candidates):
        trial = current + [list(v)]
        rt = rank(trial)
        if rt > r:
            current, r = trial, rt
            picked.append(k)
    return picked
