"""
Batch front end: ``opmin check|minimal|graph|selftest``.

Documents are JSON with every scalar written as an exact rational string
("3", "-1/2").  Structure maps live on the parity-reversed space Pi A: the
``space`` block lists the basis of Pi A with its parities and every m_n is
odd there.  Graph data are the exception; their ``space`` is the Frobenius
algebra itself.

    {
      "format": "opmin-doc/1",
      "kind": "ainf" | "linf" | "frobenius",
      "space": [[name, parity], ...],
      "differential": [[out, in, coef], ...],
      "operations": {"2": [[out, [in1, in2], coef], ...], ...},
      "truncation": N,
      "pairing": {"parity": p, "entries": [[a, b, coef], ...]},
      "product": [[out, [a, b], coef], ...],
      "vertex_tensors": [{"genus": g, "valence": k, "entries": [[[a, ...], coef], ...]}],
      "hodge": {"s": [[out, in, coef], ...], "t": [[out, in, coef], ...]}
    }

Output files and the run report on stdout are byte-deterministic: keys are
sorted, entries are sorted and no timing is recorded unless asked for.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
import time
from fractions import Fraction

from . import __version__
from .bvoperad import check_associativity, check_d_squared, check_derivation
from .dualgraph import (DATA, CommutativeAlgebra, ModularFrobeniusDatum, check_cocycle,
                        dual_cocycle, frobenius_datum, gauge_independence, seeded_contraction)
from .exactlin import GROUND, GradedMap, GradedSpace, MultiMap, compose
from .hodge import (DgSpace, HodgeData, InnerProduct, canonical_hodge, cyclic_hodge,
                    trivial_hodge, verify_hodge)
from .mclie import (FreeTensorAlgebra, MatrixRing, MCElement, bch, check_lie_axioms, check_mc,
                    check_sullivan, check_transport, gauge, gauge_by_conjugation,
                    grouplike_check, nilpotent_model, path_ordered_exp, solve_transport,
                    sullivan_from_gauge, verify_bvhat_homotopy, verify_dual_gauge_homotopy)
from .models import random_dga
from .report import Report
from .transfer import (AInfStructure, LInfStructure, TruncationError, check_ainf, check_linf,
                       check_morphism, minimal_ainf, minimal_linf, transfer_morphism)

FORMAT = "opmin-doc/1"


class DocumentError(ValueError):
    """Malformed input; the message names the offending field."""


# ---------------------------------------------------------------------------
# parsing

def _rational(value, where):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise DocumentError("%s: expected a rational string, got %r" % (where, value))
    try:
        return Fraction(value)
    except (ValueError, ZeroDivisionError):
        raise DocumentError("%s: %r is not an exact rational" % (where, value)) from None


def _index(V: GradedSpace, name, where):
    if not isinstance(name, str):
        raise DocumentError("%s: basis names must be strings" % where)
    try:
        return V.index(name)
    except (KeyError, ValueError):
        raise DocumentError("%s: undeclared basis name %r" % (where, name)) from None


def _parse_space(raw, where="space"):
    if not isinstance(raw, list):
        raise DocumentError("%s: expected a list of [name, parity]" % where)
    basis, seen = [], set()
    for k, item in enumerate(raw):
        w = "%s[%d]" % (where, k)
        if not (isinstance(item, list) and len(item) == 2):
            raise DocumentError("%s: expected [name, parity]" % w)
        name, p = item
        if not isinstance(name, str) or p not in (0, 1):
            raise DocumentError("%s: bad name or parity" % w)
        if name in seen:
            raise DocumentError("%s: duplicate basis name %r" % (w, name))
        seen.add(name)
        basis.append((name, p))
    return GradedSpace(basis)


def _parse_linear(V, W, raw, parity, where):
    """Triplets [out, in, coef] into a GradedMap V -> W of the given parity."""
    ent = {}
    for k, item in enumerate(raw or []):
        w = "%s[%d]" % (where, k)
        if not (isinstance(item, list) and len(item) == 3):
            raise DocumentError("%s: expected [out, in, coef]" % w)
        o, i = _index(W, item[0], w), _index(V, item[1], w)
        c = _rational(item[2], w)
        if c and (W.parity(o) + V.parity(i)) % 2 != parity:
            raise DocumentError("%s: entry violates parity %d" % (w, parity))
        ent[((o,), (i,))] = ent.get(((o,), (i,)), 0) + c
    return GradedMap(V, W, parity, ent)


def _parse_multi(V, W, raw, arity, parity, where):
    ent = {}
    for k, item in enumerate(raw):
        w = "%s[%d]" % (where, k)
        if not (isinstance(item, list) and len(item) == 3 and isinstance(item[1], list)):
            raise DocumentError("%s: expected [out, [in, ...], coef]" % w)
        if len(item[1]) != arity:
            raise DocumentError("%s: expected %d inputs" % (w, arity))
        o = _index(W, item[0], w)
        ins = tuple(_index(V, x, w) for x in item[1])
        c = _rational(item[2], w)
        if c and (W.parity(o) + V.tuple_parity(ins)) % 2 != parity:
            raise DocumentError("%s: entry violates parity %d" % (w, parity))
        ent[((o,), ins)] = ent.get(((o,), ins), 0) + c
    return MultiMap(V, W, arity, 1, parity, ent)


def load_text(text: str) -> dict:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError("line %d column %d: %s" % (exc.lineno, exc.colno, exc.msg)) from None
    if not isinstance(doc, dict):
        raise DocumentError("top level: expected an object")
    if doc.get("format") != FORMAT:
        raise DocumentError("format: expected %r" % FORMAT)
    return doc


def load_file(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise DocumentError("%s: %s" % (path, exc.strerror)) from None
    try:
        return load_text(text)
    except DocumentError as exc:
        raise DocumentError("%s: %s" % (path, exc)) from None


def structure_from_doc(doc: dict, kind: str = None) -> AInfStructure:
    kind = kind or doc.get("kind", "ainf")
    if kind not in ("ainf", "linf"):
        raise DocumentError("kind: expected ainf or linf, got %r" % kind)
    V = _parse_space(doc.get("space"))
    d = _parse_linear(V, V, doc.get("differential"), 1, "differential")
    if not compose(d, d).is_zero():
        raise DocumentError("differential: d^2 != 0")
    raw_ops = doc.get("operations", {})
    if not isinstance(raw_ops, dict):
        raise DocumentError("operations: expected an object keyed by arity")
    ops = {}
    for key in sorted(raw_ops, key=lambda k: (len(k), k)):
        if not key.isdigit() or int(key) < 2:
            raise DocumentError("operations: bad arity %r" % key)
        n = int(key)
        m = _parse_multi(V, V, raw_ops[key], n, 1, "operations.%s" % key)
        if not m.is_zero():
            ops[n] = m
    trunc = doc.get("truncation", max(ops, default=2))
    if not isinstance(trunc, int) or trunc < max(ops, default=2):
        raise DocumentError("truncation: must be an integer >= every listed arity")
    cls = LInfStructure if kind == "linf" else AInfStructure
    return cls(DgSpace(V, d), ops, max(trunc, 2))


def hodge_from_doc(doc: dict, base: DgSpace) -> HodgeData:
    raw = doc.get("hodge")
    if not isinstance(raw, dict):
        raise DocumentError("hodge: missing block")
    V = base.space
    s = _parse_linear(V, V, raw.get("s"), 1, "hodge.s")
    t = _parse_linear(V, V, raw.get("t"), 0, "hodge.t")
    dt = compose(base.d, t)
    return HodgeData(base, s, t, canonical=dt.is_zero())


def datum_from_doc(doc: dict):
    V = _parse_space(doc.get("space"))
    d = _parse_linear(V, V, doc.get("differential"), 1, "differential")
    raw = doc.get("pairing")
    if not isinstance(raw, dict) or raw.get("parity") not in (0, 1):
        raise DocumentError("pairing: expected {parity, entries}")
    gram = {}
    for k, item in enumerate(raw.get("entries", [])):
        w = "pairing.entries[%d]" % k
        if not (isinstance(item, list) and len(item) == 3):
            raise DocumentError("%s: expected [a, b, coef]" % w)
        gram[(_index(V, item[0], w), _index(V, item[1], w))] = _rational(item[2], w)
    name = doc.get("name", "datum")
    if "product" in doc:
        mult = {}
        for k, item in enumerate(doc["product"]):
            w = "product[%d]" % k
            if not (isinstance(item, list) and len(item) == 3 and isinstance(item[1], list)
                    and len(item[1]) == 2):
                raise DocumentError("%s: expected [out, [a, b], coef]" % w)
            o = _index(V, item[0], w)
            a, b = (_index(V, x, w) for x in item[1])
            mult.setdefault((a, b), {})[o] = _rational(item[2], w)
        alg = CommutativeAlgebra(V, mult, gram, raw["parity"])
        return frobenius_datum(alg, d, name)
    ip = InnerProduct.from_entries(V, raw["parity"], gram, symmetrize=False)
    tensors = {}
    for k, block in enumerate(doc.get("vertex_tensors", [])):
        w = "vertex_tensors[%d]" % k
        g, val = block.get("genus"), block.get("valence")
        if not isinstance(g, int) or not isinstance(val, int):
            raise DocumentError("%s: genus and valence must be integers" % w)
        ent, par = {}, None
        for j, item in enumerate(block.get("entries", [])):
            ww = "%s.entries[%d]" % (w, j)
            ins = tuple(_index(V, x, ww) for x in item[0])
            if len(ins) != val:
                raise DocumentError("%s: expected %d inputs" % (ww, val))
            c = _rational(item[1], ww)
            p = V.tuple_parity(ins)
            if c and par is not None and p != par:
                raise DocumentError("%s: tensor is not homogeneous" % ww)
            if c:
                par = p
                ent[((), ins)] = c
        tensors[(g, val)] = MultiMap(V, GROUND, val, 0, par or 0, ent)
    return ModularFrobeniusDatum(DgSpace(V, d), ip, tensors, None, name)


# ---------------------------------------------------------------------------
# emitting

def _q(c) -> str:
    return str(Fraction(c))


def _linear_rows(m: MultiMap):
    S, T = m.source, m.target
    return [[T.names[o[0]], S.names[i[0]], _q(c)] for (o, i), c in sorted(m.entries.items())]


def _multi_rows(m: MultiMap):
    S, T = m.source, m.target
    return [[T.names[o[0]], [S.names[x] for x in i], _q(c)] for (o, i), c in sorted(m.entries.items())]


def _space_rows(V: GradedSpace):
    return [[nm, p] for nm, p in V.basis()]


def structure_to_doc(A: AInfStructure, kind: str) -> dict:
    return {
        "format": FORMAT,
        "kind": kind,
        "space": _space_rows(A.space),
        "differential": _linear_rows(A.base.d),
        "operations": {str(n): _multi_rows(m) for n, m in sorted(A.ops.items())},
        "truncation": A.truncation,
    }


def dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=1, ensure_ascii=True) + "\n"


def _write(path, doc):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(doc))


# ---------------------------------------------------------------------------
# commands

class RunReport:
    def __init__(self, argv):
        self.command = list(argv)
        self.reports = []
        self.outputs = []
        self.errors = []
        self.timing = None

    @property
    def passed(self):
        return not self.errors and all(r.passed for r in self.reports)

    def to_dict(self):
        out = {
            "command": self.command,
            "passed": self.passed,
            "reports": [r.to_dict() for r in self.reports],
            "outputs": self.outputs,
            "errors": self.errors,
            "version": __version__,
        }
        if self.timing is not None:
            out["seconds"] = round(self.timing, 3)
        return out


def cmd_check(args, run: RunReport):
    doc = load_file(args.file)
    A = structure_from_doc(doc, args.type)
    N = args.max_arity or A.truncation
    check = check_linf if isinstance(A, LInfStructure) else check_ainf
    run.reports.append(check(A, N))


def _choose_hodge(args, A):
    if args.hodge == "canonical":
        return canonical_hodge(A.base)
    if args.hodge == "trivial":
        return trivial_hodge(A.base)
    h = hodge_from_doc(load_file(args.hodge), A.base)
    rep = verify_hodge(h)
    if not rep.passed:
        raise DocumentError("hodge: axioms fail (%s)" % rep.failures()[0].line())
    if not h.canonical:
        raise DocumentError("hodge: minimal models need a canonical Hodge decomposition (dt = 0)")
    return h


def cmd_minimal(args, run: RunReport):
    doc = load_file(args.file)
    A = structure_from_doc(doc, args.type)
    N = args.max_arity or A.truncation
    if N > A.truncation:
        raise TruncationError("truncation exceeded: N=%d > %d" % (N, A.truncation))
    A = type(A)(A.base, {n: m for n, m in A.ops.items() if n <= N}, N)
    h = _choose_hodge(args, A)
    linf = isinstance(A, LInfStructure)
    build = minimal_linf if linf else minimal_ainf
    Mn, inc, proj = build(A, h, N)
    out = structure_to_doc(Mn, "linf" if linf else "ainf")
    out["inclusion"] = _linear_rows(inc)
    out["projection"] = _linear_rows(proj)
    run.reports.append((check_linf if linf else check_ainf)(Mn, N))
    if not linf:
        F = transfer_morphism(A, h, N)
        out["transfer_morphism"] = {str(n): _multi_rows(F.f(n)) for n in range(1, N + 1)}
        out["transfer_target_space"] = _space_rows(A.space)
        run.reports.append(check_morphism(F, N))
    # the emitted document must load back to the same structure
    again = structure_from_doc(load_text(dumps(out)), out["kind"])
    same = again.ops == Mn.ops and again.base.d == Mn.base.d and again.space == Mn.space
    rt = Report("round trip")
    rt.add("emitted document reloads identically", same)
    run.reports.append(rt)
    if args.out:
        _write(args.out, out)
        run.outputs.append(args.out)


def _graph_datum(args):
    if args.preset:
        if args.preset not in DATA:
            raise DocumentError("--preset: unknown datum %r (choose from %s)"
                                % (args.preset, ", ".join(sorted(DATA))))
        return DATA[args.preset]()
    if not args.file:
        raise DocumentError("graph: give a datum file or --preset")
    return datum_from_doc(load_file(args.file))


def datum_to_doc(M) -> dict:
    """Serialise a Frobenius datum (product form when available)."""
    V = M.space
    G = M.ip.matrix()
    doc = {
        "format": FORMAT,
        "kind": "frobenius",
        "name": M.name,
        "space": _space_rows(V),
        "differential": _linear_rows(M.base.d),
        "pairing": {"parity": M.ip.parity,
                    "entries": [[V.names[i], V.names[j], _q(G[i][j])]
                                for i in range(V.dim) for j in range(V.dim) if G[i][j]]},
    }
    if M.algebra is not None:
        doc["product"] = [[V.names[o], [V.names[a], V.names[b]], _q(c)]
                          for (a, b), out in sorted(M.algebra.mult.items())
                          for o, c in sorted(out.items()) if c]
    return doc


def _cochain_doc(Z, M, hname):
    return {
        "format": FORMAT,
        "kind": "graph-cochain",
        "datum": M.name,
        "homotopy": hname,
        "window": {"max_genus": Z.window[0], "max_vertices": Z.window[1]},
        "values": [{"graph": s, "value": _q(v), "aut_order": Z.graphs[k].aut_order}
                   for k, s, v in Z.to_rows()],
    }


def cmd_graph(args, run: RunReport):
    M = _graph_datum(args)
    window = (args.max_genus, args.max_vertices)
    if args.seed is None:
        h1 = cyclic_hodge(M.base, M.ip)
        name1 = "cyclic"
    else:
        h1 = seeded_contraction(M, args.seed)
        name1 = "seed %d" % args.seed
    Z = dual_cocycle(M, h1, window)
    run.reports.append(check_cocycle(Z))
    if args.out:
        _write(args.out, _cochain_doc(Z, M, name1))
        run.outputs.append(args.out)
    second = args.gauge_second_homotopy
    if second is None and args.second_seed is None:
        return
    if second is not None:
        h2 = hodge_from_doc(load_file(second), M.base)
        name2 = second
    else:
        h2 = seeded_contraction(M, args.second_seed)
        name2 = "seed %d" % args.second_seed
    rep = gauge_independence(M, h1, h2, window)
    run.reports.append(rep)
    if args.certificate and "certificate" in rep.data:
        cert = {
            "format": FORMAT,
            "kind": "gauge-certificate",
            "datum": M.name,
            "homotopies": [name1, name2],
            "window": {"max_genus": window[0], "max_vertices": window[1]},
            "difference_nonzero": rep.data["difference_nonzero"],
            "certificate": [{"graph": k, "value": _q(v)}
                            for k, v in sorted(rep.data["certificate"].items())],
            "residual": "0" if rep.passed else "nonzero",
        }
        _write(args.certificate, cert)
        run.outputs.append(args.certificate)


def selftest_reports(suite: str, fault: bool = False):
    """Quick property suites; ``fault`` plants a failing check (test hook)."""
    out = []
    if suite in ("bv", "all"):
        out.append(check_d_squared(3, 3))
        out.append(check_derivation(3, 3))
        out.append(check_associativity(2, 2))
    if suite in ("mc", "all"):
        out.extend(_mc_suite())
    if fault:
        r = Report("injected fault")
        r.add("planted failure", False, "requested by --inject-fault")
        out.append(r)
    return out


def _mc_suite():
    reps = []
    for seed in range(3):
        L = nilpotent_model(seed)
        rng = random.Random(seed)
        even = [i for i in range(L.dim) if not L.space.parity(i)]

        def rand_even():
            v = L.zero()
            for i in even:
                v[i] = Fraction(rng.randint(-2, 2))
            return v
        xi1, xi2 = rand_even(), rand_even()
        x0 = gauge(xi1, MCElement(L, L.zero()))
        x1 = gauge(xi2, x0)
        r = Report("MC model seed %d" % seed)
        r.extend(check_lie_axioms(L))
        r.extend(check_mc(x0))
        r.extend(check_mc(x1))
        r.add("gauge matches conjugation", x1.x == gauge_by_conjugation(xi2, x0))
        r.add("gauge is a group action", gauge(bch(L, xi2, xi1), MCElement(L, L.zero())).x == x1.x)
        r.extend(check_sullivan(sullivan_from_gauge(xi2, x0), x0.x, x1.x))
        reps.append(r)
    R = MatrixRing(3)
    A = [[Fraction(v) for v in row] for row in ((0, 1, 0), (0, 0, 2), (0, 0, 0))]
    B = [[Fraction(v) for v in row] for row in ((0, 0, 3), (0, 0, 1), (0, 0, 0))]
    g = path_ordered_exp(R, [A, B])
    r = check_transport(R, [A, B], g)
    r.add("degree-by-degree solution coincides", g == solve_transport(R, [A, B], 2 * len(g)))
    reps.append(r)
    F = FreeTensorAlgebra(2, 4)
    reps.append(grouplike_check(F, path_ordered_exp(F, [F.gen(0), F.gen(1)])))
    for seed in range(3):
        base, _ = random_dga(seed)
        reps.append(verify_bvhat_homotopy(canonical_hodge(base)))
    M = DATA["grassmann-4"]()
    reps.append(verify_dual_gauge_homotopy(M.base, seeded_contraction(M, 0).s,
                                           seeded_contraction(M, 1).s))
    return reps


def cmd_selftest(args, run: RunReport):
    run.reports.extend(selftest_reports(args.suite, args.inject_fault))


# ---------------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="opmin", description=__doc__.split("\n\n")[0].strip())
    p.add_argument("--version", action="version", version="opmin " + __version__)
    p.add_argument("--timing", action="store_true", help="record wall time (breaks byte-reproducibility)")
    p.add_argument("--report", metavar="PATH", help="also write the run report here")
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("check", help="check the A-infinity or L-infinity identities")
    c.add_argument("file")
    c.add_argument("--type", choices=["ainf", "linf"])
    c.add_argument("--max-arity", type=int)
    c.set_defaults(func=cmd_check)

    m = sub.add_parser("minimal", help="transfer to a minimal model")
    m.add_argument("file")
    m.add_argument("--type", choices=["ainf", "linf"])
    m.add_argument("--max-arity", type=int)
    m.add_argument("--hodge", default="canonical", help="canonical, trivial or a document path")
    m.add_argument("--out")
    m.set_defaults(func=cmd_minimal)

    g = sub.add_parser("graph", help="graph cochain of a contractible Frobenius datum")
    g.add_argument("file", nargs="?")
    g.add_argument("--preset")
    g.add_argument("--max-genus", type=int, default=2)
    g.add_argument("--max-vertices", type=int, default=3)
    g.add_argument("--seed", type=int, help="use a seeded cyclic contraction")
    g.add_argument("--gauge-second-homotopy", metavar="PATH")
    g.add_argument("--second-seed", type=int)
    g.add_argument("--out")
    g.add_argument("--certificate")
    g.set_defaults(func=cmd_graph)

    s = sub.add_parser("selftest", help="built-in property suites")
    s.add_argument("--suite", choices=["bv", "mc", "all"], default="all")
    s.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    run = RunReport(["opmin"] + argv)
    start = time.perf_counter()
    code = 0
    try:
        args.func(args, run)
    except (DocumentError, TruncationError, ValueError) as exc:
        run.errors.append(str(exc))
        code = 2
    if args.timing:
        run.timing = time.perf_counter() - start
    text = dumps(run.to_dict())
    sys.stdout.write(text)
    if args.report:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if code:
        return code
    return 0 if run.passed else 1


if __name__ == "__main__":
    sys.exit(main())
