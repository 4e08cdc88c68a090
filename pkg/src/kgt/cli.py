"""Command line front end.

Four subcommands: `validate` checks a graph document, `check` runs identity
suites against a graph/cocycle pair, `build` assembles product graphs (and
lifted cocycles), and `fock` dumps truncated creation matrices or relation
reports.  Documents are JSON; angles travel as exact "p/q turn" strings when
possible and float radians otherwise.

Exit codes: 0 all good, 1 a check failed, 2 parse or usage trouble, 3 a
validation counterexample, 4 an unknown suite selector.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from . import degrees as dg
from .cocycle import (
    EXACT,
    FLOAT,
    Coboundary,
    Cocycle,
    c_f,
    c_omega,
    c_sigma,
    check_cocycle,
    from_table,
    product_cocycle,
    skew_lift,
    tabulate,
    trivial_cocycle,
)
from .constructions import (
    CartesianProductGraph,
    CrossedProductGraph,
    SkewProductGraph,
    ZlAction,
    cartesian,
    crossed_product,
    cyclic_group,
    skew_product,
)
from .errors import KgtError, MalformedSkeleton, ParseError, UnknownCheck
from .fock import (
    FockSpace,
    ck_relations_check,
    cp_identity_check,
    creation_x,
    creation_y,
    psi_check,
    rep_axioms_check,
)
from .kgraph import KGraph, Path, make_skeleton, validate_skeleton
from .phases import Phase, format_angle, parse_angle, product
from .verify import Instance, SuiteConfig, run_suite
from .xmod import VertexFn, XElem
from .ymod import CylElem

REPORT_SCHEMA = "kgt-report/1"
FOCK_SCHEMA = "kgt-fock/1"


# -- document plumbing -------------------------------------------------------


def _read_json(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as err:
        raise ParseError(f"{path}: {err}", path) from err
    except json.JSONDecodeError as err:
        raise ParseError(f"{path}:{err.lineno}:{err.colno}: {err.msg}", path) from err


def _write_json(doc, path: str | None):
    text = json.dumps(doc, indent=2, sort_keys=False)
    if path:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _as_object(doc, allowed, where: str) -> dict:
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: expected an object", doc)
    extra = sorted(set(doc) - set(allowed))
    if extra:
        raise ParseError(f"{where}: unknown field(s) {extra}", extra)
    return doc


def _field(doc: dict, key: str, where: str):
    if key not in doc:
        raise ParseError(f"{where}: missing field {key!r}", key)
    return doc[key]


def parse_graph_doc(doc):
    """JSON object -> unvalidated skeleton; field errors raise ParseError."""
    _as_object(doc, {"k", "vertices", "edges", "squares"}, "graph document")
    k = int(_field(doc, "k", "graph document"))
    vertices = [str(v) for v in _field(doc, "vertices", "graph document")]
    edges = []
    for i, e in enumerate(_field(doc, "edges", "graph document")):
        _as_object(e, {"id", "color", "range", "source"}, f"edges[{i}]")
        edges.append(
            (
                str(_field(e, "id", f"edges[{i}]")),
                int(_field(e, "color", f"edges[{i}]")),
                str(_field(e, "range", f"edges[{i}]")),
                str(_field(e, "source", f"edges[{i}]")),
            )
        )
    squares = []
    for i, s in enumerate(doc.get("squares", [])):
        _as_object(s, {"first", "second"}, f"squares[{i}]")
        first = list(_field(s, "first", f"squares[{i}]"))
        second = list(_field(s, "second", f"squares[{i}]"))
        if len(first) != 2 or len(second) != 2:
            raise ParseError(f"squares[{i}]: need two edge ids per side", s)
        squares.append((tuple(map(str, first)), tuple(map(str, second))))
    return make_skeleton(k, vertices, edges, squares)


def emit_graph_doc(g) -> dict:
    """Canonical document form: sorted vertices, edges, and square keys."""
    sk = g.skeleton if isinstance(g, KGraph) else g
    return {
        "k": sk.k,
        "vertices": sorted(sk.vertices),
        "edges": [
            {"id": e.ident, "color": e.color, "range": e.range, "source": e.source}
            for e in sorted(sk.edges, key=lambda e: (e.color, e.ident))
        ],
        "squares": [
            {"first": list(key), "second": list(val)}
            for key, val in sorted(sk.squares.items())
        ],
    }


def load_graph(path: str) -> KGraph:
    return validate_skeleton(parse_graph_doc(_read_json(path)))


_BUILTIN_COCYCLES = ("trivial", "c_f", "c_omega", "c_sigma", "skew_lift", "product", "coboundary")


def _coboundary_from_params(g: KGraph, params: dict) -> Cocycle:
    _as_object(params, {"edge_phases", "degree_form"}, "coboundary params")
    label = {e.ident: Phase.one() for e in g.all_edges}
    for ident, ang in params.get("edge_phases", {}).items():
        if ident not in label:
            raise ParseError(f"coboundary params: unknown edge {ident!r}", ident)
        label[ident] = parse_angle(ang)
    form = [[parse_angle(x) for x in row] for row in params.get("degree_form", [])]
    if form and (len(form) != g.k or any(len(row) != g.k for row in form)):
        raise ParseError(f"coboundary params: degree_form must be {g.k}x{g.k}", form)

    def b(la: Path) -> Phase:
        out = product(label[e] for e in la.edges)
        for i in range(g.k):
            for j in range(g.k):
                if form:
                    out = out * form[i][j] ** (la.degree[i] * la.degree[j])
        return out

    return Coboundary(g, b, name="coboundary").delta()


def load_cocycle(doc, g: KGraph, check_cap=None) -> Cocycle:
    """Build a cocycle document against g; the pair/triple laws are checked
    on loading (table documents within their stored cap)."""
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError("cocycle document: missing field 'kind'", doc)
    kind = doc["kind"]
    if kind == "table":
        _as_object(doc, {"kind", "entries", "cap"}, "cocycle document")
        cap = dg.as_degree([int(x) for x in _field(doc, "cap", "cocycle document")], g.k)
        entries = {}
        exact = True
        for i, ent in enumerate(_field(doc, "entries", "cocycle document")):
            if len(ent) != 3:
                raise ParseError(f"entries[{i}]: need [first, second, angle]", ent)
            le, me, ang = ent
            p = parse_angle(ang)
            exact = exact and p.is_exact
            entries[(tuple(map(str, le)), tuple(map(str, me)))] = p
        return from_table(g, entries, cap, mode=EXACT if exact else FLOAT, check=True)
    if kind != "builtin":
        raise ParseError(f"cocycle document: unknown kind {kind!r}", kind)
    _as_object(doc, {"kind", "name", "params"}, "cocycle document")
    name = _field(doc, "name", "cocycle document")
    params = doc.get("params", {})
    if name == "trivial":
        c = trivial_cocycle(g)
    elif name == "coboundary":
        c = _coboundary_from_params(g, params)
    elif name in ("c_f", "c_omega", "c_sigma"):
        if not isinstance(g, CrossedProductGraph):
            raise ParseError(
                f"{name} needs an adjoined-lattice graph; build one in the same "
                "invocation (kgt build --op crossed) or use a table document",
                name,
            )
        if name == "c_f":
            table = {e: parse_angle(v) for e, v in _field(params, "f", "params").items()}
            c = c_f(g, table)
        elif name == "c_omega":
            c = c_omega(g, [parse_angle(x) for x in _field(params, "generators", "params")])
        else:
            c = c_sigma(g, [[parse_angle(x) for x in row] for row in _field(params, "theta", "params")])
    elif name == "skew_lift":
        if not isinstance(g, SkewProductGraph):
            raise ParseError("skew_lift needs a group-labelled graph built in the same invocation", name)
        c = skew_lift(load_cocycle(_field(params, "base", "params"), g.base), g)
    elif name == "product":
        if not isinstance(g, CartesianProductGraph):
            raise ParseError("product needs a product graph built in the same invocation", name)
        c = product_cocycle(
            load_cocycle(_field(params, "left", "params"), g.left),
            load_cocycle(_field(params, "right", "params"), g.right),
            g,
        )
    else:
        raise ParseError(
            f"cocycle document: unknown builtin {name!r}; know {_BUILTIN_COCYCLES}", name
        )
    cap = check_cap if check_cap is not None else _default_cap(g)
    rep = check_cocycle(c, cap)
    if not rep.ok:
        raise ParseError(f"cocycle fails the pair/triple laws: {rep.first_failure!r}", rep.first_failure)
    return c


def _clip_to_lattice(g: KGraph, cap: list) -> tuple:
    if isinstance(g, CrossedProductGraph):
        kb = g.base.k
        for j, cj in enumerate(g.cap):
            cap[kb + j] = min(cap[kb + j], cj)
    return tuple(cap)


def _default_cap(g: KGraph):
    return _clip_to_lattice(g, [2] * g.k)


def _default_table_cap(g: KGraph):
    # the default suite evaluates cocycle pairs up to three times its
    # per-entry degree cap (associativity triples), so emitted tables must
    # reach that far to be usable by `check` afterwards
    return tuple([3 * SuiteConfig().degree_entry_cap] * g.k)


def emit_cocycle_doc(c: Cocycle, cap) -> dict:
    table = tabulate(c, cap)
    return {
        "kind": "table",
        "cap": [int(x) for x in dg.as_degree(cap, c.graph.k)],
        "entries": [
            [list(le), list(me), format_angle(p)] for (le, me), p in sorted(table.items())
        ],
    }


def _path_str(p: Path) -> str:
    return ".".join(p.edges) if p.edges else p.range


def _parse_degree(text: str, k: int):
    try:
        parts = [int(x) for x in str(text).split(",")]
    except ValueError as err:
        raise ParseError(f"bad degree {text!r}", text) from err
    if len(parts) == 1:
        parts = parts * k
    if len(parts) != k or any(x < 0 for x in parts):
        raise ParseError(f"degree {text!r} does not fit rank {k}", text)
    return tuple(parts)


# -- subcommands -------------------------------------------------------------


def cmd_validate(args) -> int:
    try:
        skel = parse_graph_doc(_read_json(args.graph))
    except ParseError as err:
        print(f"ParseError: {err}", file=sys.stderr)
        return 2
    try:
        g = validate_skeleton(skel)
    except MalformedSkeleton as err:
        print(f"MalformedSkeleton: {err}", file=sys.stderr)
        return 2
    except KgtError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        if err.witness is not None:
            print(f"counterexample: {err.witness!r}", file=sys.stderr)
        return 3
    print(
        f"ok: rank {g.k}, {len(g.vertices)} vertices, {len(g.all_edges)} edges, "
        f"{len(g.skeleton.squares)} squares"
    )
    return 0


def _load_pair(args):
    g = load_graph(args.graph)
    c = load_cocycle(_read_json(args.cocycle), g)
    return g, c


def cmd_check(args) -> int:
    try:
        g, c = _load_pair(args)
    except MalformedSkeleton as err:
        print(f"MalformedSkeleton: {err}", file=sys.stderr)
        return 2
    except ParseError as err:
        print(f"ParseError: {err}", file=sys.stderr)
        return 2
    except KgtError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 3
    cfg = SuiteConfig(
        seed=args.seed,
        degree_entry_cap=args.cap,
        tolerance=args.tolerance,
        depth_margin=args.depth,
    )
    label = f"{os.path.basename(args.graph)}/{os.path.basename(args.cocycle)}"
    inst = Instance(label, g, c, is_fixture=True)
    selector = [s.strip() for s in args.suite.split(",") if s.strip()]
    try:
        rep = run_suite(selector, cfg, instances=[inst])
    except UnknownCheck as err:
        print(f"UnknownCheck: {err}", file=sys.stderr)
        return 4
    if args.format == "machine":
        doc = rep.to_dict()
        doc["schema"] = REPORT_SCHEMA
        _write_json(doc, args.out)
    else:
        lines = [rep.summary()]
        for r in rep.results:
            mark = {"pass": "ok  ", "fail": "FAIL", "skipped": "skip"}[r.status]
            lines.append(f"{mark} {r.case.check_id:40s} {r.millis:8.1f} ms")
        text = "\n".join(lines)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text + "\n")
        else:
            print(text)
    return 0 if rep.ok else 1


def _action_from_params(g: KGraph, doc) -> ZlAction:
    _as_object(doc, {"vertices", "edges"}, "action")
    vperms = [dict(d) for d in _field(doc, "vertices", "action")]
    eperms = [dict(d) for d in _field(doc, "edges", "action")]
    if len(vperms) != len(eperms):
        raise ParseError("action: vertex and edge permutation lists differ in length", doc)
    return ZlAction(g, tuple(vperms), tuple(eperms))


def cmd_build(args) -> int:
    try:
        params = json.loads(args.params) if args.params else {}
        if not isinstance(params, dict):
            raise ParseError("--params must be a JSON object", args.params)
        graphs = [load_graph(p) for p in args.graphs]
        if args.op == "cartesian":
            if len(graphs) != 2:
                raise ParseError("cartesian needs two graph files", args.graphs)
            _as_object(params, set(), "params")
            built = cartesian(*graphs)
        elif args.op == "skew":
            if len(graphs) != 1:
                raise ParseError("skew needs one graph file", args.graphs)
            _as_object(params, {"group", "labels"}, "params")
            grp = cyclic_group(int(_field(params, "group", "params")))
            labels = {str(e): str(a) for e, a in _field(params, "labels", "params").items()}
            built = skew_product(graphs[0], grp, labels)
        elif args.op == "crossed":
            if len(graphs) != 1:
                raise ParseError("crossed needs one graph file", args.graphs)
            _as_object(params, {"action", "cap"}, "params")
            beta = _action_from_params(graphs[0], _field(params, "action", "params"))
            cap = tuple(int(x) for x in _field(params, "cap", "params"))
            built = crossed_product(graphs[0], beta, cap)
        else:  # argparse choices guard this
            raise ParseError(f"unknown op {args.op!r}", args.op)
    except ParseError as err:
        print(f"ParseError: {err}", file=sys.stderr)
        return 2
    except KgtError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 3
    _write_json(emit_graph_doc(built), args.out_graph)
    if args.cocycle:
        cap = _parse_degree(args.table_cap, built.k) if args.table_cap else _default_table_cap(built)
        lift_on = built
        if isinstance(built, CrossedProductGraph):
            # the emitted graph document drops the lattice window, so `check`
            # re-reads it as a graph whose lattice edges compose freely; the
            # table must then cover the full cap, which can exceed the window
            # requested at build time.  The skeleton does not depend on the
            # window, so re-lift the cocycle on a wide enough copy.
            kb = built.base.k
            need = tuple(max(a, b) for a, b in zip(cap[kb:], built.cap))
            if need != built.cap:
                lift_on = crossed_product(built.base, built.action, need)
        try:
            c = load_cocycle(_read_json(args.cocycle), lift_on)
        except ParseError as err:
            print(f"ParseError: {err}", file=sys.stderr)
            return 2
        except KgtError as err:
            print(f"{type(err).__name__}: {err}", file=sys.stderr)
            return 3
        _write_json(emit_cocycle_doc(c, cap), args.out_cocycle)
    return 0


def _creations(space: FockSpace, c: Cocycle):
    """Degree-zero vertex generators plus one creation per edge that fits."""
    g = space.graph
    out = []
    for i, v in enumerate(g.vertices):
        f = XElem(g, dg.zero(g.k), np.eye(len(g.vertices))[i])
        if space.system == "X":
            out.append((f"vertex:{v}", creation_x(space, c, f)))
        else:
            out.append((f"vertex:{v}", creation_y(space, c, CylElem.delta(g, g.vertex_path(v)))))
    for e in g.all_edges:
        n = dg.unit(g.k, e.color)
        if not dg.leq(n, space.N):
            continue
        p = g.edge_path(e.ident)
        if space.system == "X":
            out.append((f"edge:{e.ident}", creation_x(space, c, XElem.delta(g, p))))
        else:
            out.append((f"edge:{e.ident}", creation_y(space, c, CylElem.delta(g, p))))
    return out


def _commutation_table(space: FockSpace, c: Cocycle, tol: float):
    """Measured scalar in S_f S_e = z * S_e S_f on the interior, per edge pair."""
    g = space.graph
    rows = []
    for e in g.all_edges:
        for f in g.all_edges:
            if not e.color < f.color:
                continue
            ne, nf = dg.unit(g.k, e.color), dg.unit(g.k, f.color)
            d = dg.add(ne, nf)
            if not dg.leq(d, space.N):
                continue
            Se = creation_x(space, c, XElem.delta(g, g.edge_path(e.ident)))
            Sf = creation_x(space, c, XElem.delta(g, g.edge_path(f.ident)))
            mask = space.interior_mask(d)
            A = (Sf @ Se).matrix[:, mask]
            B = (Se @ Sf).matrix[:, mask]
            nb = float(np.vdot(B, B).real)
            if nb < tol:
                continue
            z = complex(np.vdot(B, A) / nb)
            residual = float(np.linalg.norm(A - z * B))
            rows.append((f.ident, e.ident, z, residual))
    return rows


def cmd_fock(args) -> int:
    try:
        g, c = _load_pair(args)
        N = _parse_degree(args.N, g.k)
        if args.system == "Y" and args.D is None:
            print("usage error: --system Y needs --D", file=sys.stderr)
            return 2
        D = _parse_degree(args.D, g.k) if args.D is not None else None
        space = FockSpace(g, N, args.system, depth=D)
    except MalformedSkeleton as err:
        print(f"MalformedSkeleton: {err}", file=sys.stderr)
        return 2
    except ParseError as err:
        print(f"ParseError: {err}", file=sys.stderr)
        return 2
    except KgtError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 3

    if args.emit == "matrices":
        basis = [
            {
                "index": i,
                "degree": list(n),
                "path": _path_str(p),
                "depth": list(space.block_depth(n)),
            }
            for i, (n, p) in enumerate(space.basis())
        ]
        ops = [
            {
                "generator": name,
                "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in op.matrix],
            }
            for name, op in _creations(space, c)
        ]
        doc = {
            "schema": FOCK_SCHEMA,
            "system": space.system,
            "N": list(space.N),
            "D": list(space.D) if space.D is not None else None,
            "dim": space.dim,
            "basis": basis,
            "operators": ops,
        }
        _write_json(doc, args.out)
        return 0

    lines = []
    failed = False
    rep = rep_axioms_check(space, c, tol=args.tolerance)
    lines.append(f"{'ok' if rep.ok else 'FAIL'} representation axioms ({rep.cases_checked} cases)")
    failed = failed or not rep.ok
    if space.system == "X":
        degrees = [dg.unit(g.k, i) for i in range(1, g.k + 1) if dg.leq(dg.unit(g.k, i), space.N)]
        if any(space.N):
            degrees.append(space.N)
        for n in degrees:
            rep = ck_relations_check(space, c, n, tol=args.tolerance)
            lines.append(f"{'ok' if rep.ok else 'FAIL'} generator relations at degree {n}")
            failed = failed or not rep.ok
        for fid, eid, z, residual in _commutation_table(space, c, args.tolerance):
            lines.append(
                f"commutation S_{fid} S_{eid} = z S_{eid} S_{fid}: z = {z.real:+.12f}{z.imag:+.12f}i"
                f" (residual {residual:.3g})"
            )
    else:
        rep = psi_check(space, c, tol=args.tolerance)
        lines.append(f"{'ok' if rep.ok else 'FAIL'} cylinder representation ({rep.cases_checked} cases)")
        failed = failed or not rep.ok
        for i, v in enumerate(g.vertices):
            a = VertexFn.indicator(g, v)
            rep = cp_identity_check(space, c, a, space.N, tol=args.tolerance)
            lines.append(f"{'ok' if rep.ok else 'FAIL'} covariance defect match at vertex {v}")
            failed = failed or not rep.ok
    text = "\n".join(lines)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)
    return 1 if failed else 0


# -- argument parsing --------------------------------------------------------


def _env_seed() -> int:
    try:
        return int(os.environ.get("KGT_SEED", "0"))
    except ValueError:
        return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="kgt",
        description="Finite colored-graph algebras: validation, identity suites, "
        "product constructions, and truncated operator models.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("validate", help="validate a graph document")
    v.add_argument("graph", help="graph JSON file (or - for stdin)")
    v.set_defaults(func=cmd_validate)

    ch = sub.add_parser("check", help="run identity suites on a graph/cocycle pair")
    ch.add_argument("graph")
    ch.add_argument("cocycle")
    ch.add_argument("--suite", default="all", help="comma-separated glob selectors (default: all)")
    ch.add_argument("--seed", type=int, default=_env_seed())
    ch.add_argument("--cap", type=int, default=2, help="per-color degree window")
    ch.add_argument("--depth", type=int, default=None, help="extra cylinder depth margin")
    ch.add_argument("--tolerance", type=float, default=1e-9)
    ch.add_argument("--format", choices=("text", "machine"), default="text")
    ch.add_argument("--out", default=None)
    ch.set_defaults(func=cmd_check)

    b = sub.add_parser("build", help="assemble a product graph, optionally with a cocycle")
    b.add_argument("graphs", nargs="+", help="input graph JSON files")
    b.add_argument("--op", required=True, choices=("cartesian", "skew", "crossed"))
    b.add_argument("--params", default=None, help="JSON object with op parameters")
    b.add_argument("--cocycle", default=None, help="cocycle document to resolve against the result")
    b.add_argument("--table-cap", default=None, help="degree window for the emitted table")
    b.add_argument("--out-graph", default=None)
    b.add_argument("--out-cocycle", default=None)
    b.set_defaults(func=cmd_build)

    f = sub.add_parser("fock", help="emit creation matrices or relation reports")
    f.add_argument("graph")
    f.add_argument("cocycle")
    f.add_argument("--system", choices=("X", "Y"), default="X")
    f.add_argument("--N", required=True, help="truncation degree, e.g. 2,2")
    f.add_argument("--D", default=None, help="cylinder depth (system Y)")
    f.add_argument("--emit", choices=("matrices", "relations"), default="relations")
    f.add_argument("--tolerance", type=float, default=1e-9)
    f.add_argument("--out", default=None)
    f.set_defaults(func=cmd_fock)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UnknownCheck as err:
        print(f"UnknownCheck: {err}", file=sys.stderr)
        return 4
    except ParseError as err:
        print(f"ParseError: {err}", file=sys.stderr)
        return 2
    except KgtError as err:
        print(f"{type(err).__name__}: {err}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
