"""Finite higher-rank graphs presented by colored skeletons with squares.

A rank-k graph is given here by k colored edge layers over a common vertex
set, together with, for each color pair i < j, a bijection between the
composable two-edge paths (i then j) and (j then i).  Those bijections (the
"squares") generate the unique-factorization structure: every path has a
normal form listing its edges in ascending color blocks, and all composition
and factorization is done by applying squares to adjacent edge pairs.

Conventions: a path runs from its source to its range, so a pair (lambda, mu)
is composable when s(lambda) = r(mu), and v.Lambda^n denotes the degree-n
paths with range v.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import degrees as dg
from .errors import (
    DegreeOutOfRange,
    EndpointMismatch,
    HexagonViolation,
    MalformedSkeleton,
    NotComposable,
    SquareNotBijective,
    UnknownFixture,
)


@dataclass(frozen=True, slots=True)
class Edge:
    ident: str
    color: int  # 1-based
    range: str
    source: str


@dataclass(frozen=True, slots=True)
class Path:
    """A morphism in normal form: edge ids in ascending color blocks."""

    degree: dg.Degree
    edges: tuple[str, ...]
    range: str
    source: str

    @property
    def is_vertex(self) -> bool:
        return not self.edges

    def sort_key(self):
        return self.edges if self.edges else (self.range,)

    def __repr__(self) -> str:
        if self.edges:
            return "<" + ".".join(self.edges) + ">"
        return f"<vertex {self.range}>"


@dataclass
class KGraphSkeleton:
    """Raw presentation data, not yet validated."""

    k: int
    vertices: tuple[str, ...]
    edges: tuple[Edge, ...]
    squares: dict[tuple[str, str], tuple[str, str]] = field(default_factory=dict)


def make_skeleton(k, vertices, edges, squares=()) -> KGraphSkeleton:
    """Convenience constructor.

    edges: iterable of (ident, color, range, source) tuples or Edge objects.
    squares: iterable of ((e, f), (f2, e2)) id pairs, or an equivalent dict.
    """
    es = tuple(e if isinstance(e, Edge) else Edge(*e) for e in edges)
    sq = dict(squares.items() if isinstance(squares, dict) else squares)
    sq = {tuple(kk): tuple(v) for kk, v in sq.items()}
    return KGraphSkeleton(int(k), tuple(str(v) for v in vertices), es, sq)


class KGraph:
    """A validated skeleton plus memoized path tables.

    Instances are immutable after validation; the memo dictionaries only ever
    gain entries, and each entry is written once, so sharing across threads is
    safe under the usual dict atomicity guarantees.  Call precompute() to
    populate tables eagerly instead.
    """

    def __init__(self, skeleton: KGraphSkeleton, _token=None):
        if _token is not _VALIDATED:
            raise MalformedSkeleton("use validate_skeleton() to build a KGraph")
        self.skeleton = skeleton
        self.k = skeleton.k
        self.vertices = tuple(sorted(skeleton.vertices))
        self.vertex_index = {v: i for i, v in enumerate(self.vertices)}
        self._edge = {e.ident: e for e in skeleton.edges}
        self._color = {e.ident: e.color for e in skeleton.edges}
        self._by_color = {
            i: tuple(sorted((e for e in skeleton.edges if e.color == i), key=lambda e: e.ident))
            for i in range(1, self.k + 1)
        }
        self._sq = dict(skeleton.squares)
        self._sq_inv = {v: kk for kk, v in self._sq.items()}
        self._paths: dict[dg.Degree, tuple[Path, ...]] = {}
        self._index: dict[dg.Degree, dict[Path, int]] = {}
        self._splits: dict = {}
        self._compose: dict = {}
        self._factor: dict = {}
        self._ranges: dict = {}
        self._sources: dict = {}

    # -- basic structure ---------------------------------------------------

    def edge(self, ident: str) -> Edge:
        return self._edge[ident]

    def edges(self, color: int) -> tuple[Edge, ...]:
        return self._by_color[color]

    @property
    def all_edges(self) -> tuple[Edge, ...]:
        return self.skeleton.edges

    def vertex_path(self, v: str) -> Path:
        return Path(dg.zero(self.k), (), v, v)

    def edge_path(self, ident: str) -> Path:
        e = self._edge[ident]
        return Path(dg.unit(self.k, e.color), (ident,), e.range, e.source)

    def path_from_edges(self, seq) -> Path:
        """Build a path from a composable edge-id sequence (any color order)."""
        out = None
        for ident in seq:
            step = self.edge_path(ident)
            out = step if out is None else self.compose(out, step)
        if out is None:
            raise DegreeOutOfRange("empty sequence does not name a vertex path", seq)
        return out

    # -- path tables -------------------------------------------------------

    def paths(self, n) -> tuple[Path, ...]:
        n = dg.as_degree(n, self.k)
        hit = self._paths.get(n)
        if hit is not None:
            return hit
        partials = [(v, (), v) for v in self.vertices]  # (range, edges, source)
        for i in range(1, self.k + 1):
            for _ in range(n[i - 1]):
                nxt = []
                for r0, es, s0 in partials:
                    for e in self._by_color[i]:
                        if e.range == s0:
                            nxt.append((r0, es + (e.ident,), e.source))
                partials = nxt
        out = [Path(n, es, r0, s0) for r0, es, s0 in partials]
        out.sort(key=Path.sort_key)
        result = tuple(out)
        self._paths[n] = result
        return result

    def path_index(self, n) -> dict[Path, int]:
        n = dg.as_degree(n, self.k)
        hit = self._index.get(n)
        if hit is None:
            hit = {p: i for i, p in enumerate(self.paths(n))}
            self._index[n] = hit
        return hit

    def by_range(self, n) -> dict[str, tuple[int, ...]]:
        """Vertex v -> indices (into paths(n)) of v.Lambda^n."""
        n = dg.as_degree(n, self.k)
        hit = self._ranges.get(n)
        if hit is None:
            table = {v: [] for v in self.vertices}
            for i, p in enumerate(self.paths(n)):
                table[p.range].append(i)
            hit = {v: tuple(ix) for v, ix in table.items()}
            self._ranges[n] = hit
        return hit

    def by_source(self, n) -> dict[str, tuple[int, ...]]:
        """Vertex v -> indices (into paths(n)) of Lambda^n.v."""
        n = dg.as_degree(n, self.k)
        hit = self._sources.get(n)
        if hit is None:
            table = {v: [] for v in self.vertices}
            for i, p in enumerate(self.paths(n)):
                table[p.source].append(i)
            hit = {v: tuple(ix) for v, ix in table.items()}
            self._sources[n] = hit
        return hit

    def precompute(self, upto) -> None:
        for n in dg.degrees_upto(dg.as_degree(upto, self.k)):
            self.paths(n)
            self.path_index(n)

    # -- composition and factorization ------------------------------------

    def compose(self, la: Path, mu: Path) -> Path:
        if la.source != mu.range:
            raise NotComposable(f"s({la!r}) = {la.source} != r({mu!r}) = {mu.range}", (la, mu))
        key = (la, mu)
        hit = self._compose.get(key)
        if hit is not None:
            return hit
        seq = list(la.edges + mu.edges)
        # gnome sort by color; each backward swap applies one square
        i = 0
        while i < len(seq) - 1:
            a, b = seq[i], seq[i + 1]
            if self._color[a] > self._color[b]:
                seq[i], seq[i + 1] = self._sq_inv[(a, b)]
                if i:
                    i -= 1
            else:
                i += 1
        out = Path(dg.add(la.degree, mu.degree), tuple(seq), la.range, mu.source)
        self._compose[key] = out
        return out

    def _pull_front(self, seq: tuple[str, ...], color: int) -> list[str]:
        """Move the first color-`color` edge to position 0 through squares."""
        seq = list(seq)
        idx = next(j for j, ident in enumerate(seq) if self._color[ident] == color)
        while idx > 0:
            pair = (seq[idx - 1], seq[idx])  # ascending: color(pair[0]) < color
            seq[idx - 1], seq[idx] = self._sq[pair]
            idx -= 1
        return seq

    def split(self, la: Path, m) -> tuple[Path, Path]:
        """The unique factorization la = mu.nu with d(mu) = m."""
        m = dg.as_degree(m, self.k)
        if not dg.leq(m, la.degree):
            raise DegreeOutOfRange(f"{m} is not <= d({la!r}) = {la.degree}", (la, m))
        key = (la, m)
        hit = self._splits.get(key)
        if hit is not None:
            return hit
        if not any(m):
            out = (self.vertex_path(la.range), la)
        elif m == la.degree:
            out = (la, self.vertex_path(la.source))
        else:
            i = next(c for c in range(1, self.k + 1) if m[c - 1] > 0)
            seq = self._pull_front(la.edges, i)
            head = self._edge[seq[0]]
            rest = Path(dg.sub(la.degree, dg.unit(self.k, i)), tuple(seq[1:]), head.source, la.source)
            mu_tail, nu = self.split(rest, dg.sub(m, dg.unit(self.k, i)))
            out = (Path(m, (seq[0],) + mu_tail.edges, la.range, mu_tail.source), nu)
        self._splits[key] = out
        return out

    def segment(self, la: Path, m, n) -> Path:
        """The subpath la(m, n)."""
        m = dg.as_degree(m, self.k)
        n = dg.as_degree(n, self.k)
        if not (dg.leq(m, n) and dg.leq(n, la.degree)):
            raise DegreeOutOfRange(f"need {m} <= {n} <= {la.degree}", (la, m, n))
        _, rest = self.split(la, m)
        mid, _ = self.split(rest, dg.sub(n, m))
        return mid

    def factor_indices(self, m, n) -> tuple[tuple[int, int], ...]:
        """For each path in paths(m+n), indices of its (m, n) factor pair."""
        m = dg.as_degree(m, self.k)
        n = dg.as_degree(n, self.k)
        key = (m, n)
        hit = self._factor.get(key)
        if hit is None:
            pm = self.path_index(m)
            pn = self.path_index(n)
            out = []
            for la in self.paths(dg.add(m, n)):
                mu, nu = self.split(la, m)
                out.append((pm[mu], pn[nu]))
            hit = tuple(out)
            self._factor[key] = hit
        return hit

    # -- predicates and set operations ------------------------------------

    def is_source_free(self) -> tuple[bool, tuple[str, int] | None]:
        """True iff every vertex receives an edge of every color."""
        for i in range(1, self.k + 1):
            ranged = {e.range for e in self._by_color[i]}
            for v in self.vertices:
                if v not in ranged:
                    return False, (v, i)
        return True, None

    def properness(self, degree_list) -> "PropernessReport":
        """Row-finiteness is automatic for finite graphs; report fiber sizes."""
        fibers = {}
        for n in degree_list:
            n = dg.as_degree(n, self.k)
            for v, ix in self.by_range(n).items():
                fibers[(v, n)] = len(ix)
        return PropernessReport(True, fibers)

    def is_s_section(self, U) -> bool:
        """True iff the source map is injective on the path set U."""
        U = set(U)
        return len({p.source for p in U}) == len(U)

    def vee(self, U, V) -> tuple[Path, ...]:
        """Common extensions of U and V to degree join(m, n)."""
        U, V = list(U), list(V)
        if not U or not V:
            return ()
        for group in (U, V):
            if len({p.degree for p in group}) != 1:
                raise DegreeOutOfRange("vee requires uniform degrees within each set", group)
        m, n = U[0].degree, V[0].degree
        j = dg.join(m, n)
        extU = {
            self.compose(u, w)
            for u in U
            for w in self.paths(dg.sub(j, m))
            if w.range == u.source
        }
        extV = {
            self.compose(v, w)
            for v in V
            for w in self.paths(dg.sub(j, n))
            if w.range == v.source
        }
        return tuple(sorted(extU & extV, key=Path.sort_key))


@dataclass(frozen=True)
class PropernessReport:
    proper: bool
    fibers: dict


_VALIDATED = object()


def validate_skeleton(skel: KGraphSkeleton, _cls=None, **extra) -> KGraph:
    """Check a skeleton and return the graph, or raise with a counterexample.

    Raises MalformedSkeleton for reference/arity problems, SquareNotBijective
    when some color pair's square table is not a bijection between composable
    pairs, EndpointMismatch when a square entry has inconsistent range or
    source, and HexagonViolation when (k >= 3) the two ways of reversing a
    tri-colored triple disagree.  The exception's .witness names the datum.

    _cls lets the product constructions return their KGraph subclasses while
    still going through every check here.
    """
    k = skel.k
    if k < 1:
        raise MalformedSkeleton(f"rank must be >= 1, got {k}", k)
    if not skel.vertices:
        raise MalformedSkeleton("empty vertex set", skel.vertices)
    if len(set(skel.vertices)) != len(skel.vertices):
        dup = sorted(v for v in set(skel.vertices) if list(skel.vertices).count(v) > 1)
        raise MalformedSkeleton(f"duplicate vertex ids {dup}", dup)
    vset = set(skel.vertices)
    seen = set()
    for e in skel.edges:
        if e.ident in seen:
            raise MalformedSkeleton(f"duplicate edge id {e.ident!r}", e.ident)
        seen.add(e.ident)
        if not 1 <= e.color <= k:
            raise MalformedSkeleton(f"edge {e.ident!r} has color {e.color} outside 1..{k}", e)
        if e.range not in vset or e.source not in vset:
            raise MalformedSkeleton(f"edge {e.ident!r} has a dangling endpoint", e)
    edge = {e.ident: e for e in skel.edges}

    # square tables, one color pair at a time
    entries_by_pair: dict[tuple[int, int], dict] = {}
    for key, val in skel.squares.items():
        if len(key) != 2 or len(val) != 2:
            raise MalformedSkeleton(f"square entry {key} -> {val} has wrong arity", (key, val))
        for ident in (*key, *val):
            if ident not in edge:
                raise MalformedSkeleton(f"square references unknown edge {ident!r}", (key, val))
        e, f = edge[key[0]], edge[key[1]]
        f2, e2 = edge[val[0]], edge[val[1]]
        if not e.color < f.color:
            raise MalformedSkeleton(
                f"square key {key} is not in ascending color order", (key, val)
            )
        if (f2.color, e2.color) != (f.color, e.color):
            raise MalformedSkeleton(f"square {key} -> {val} changes colors", (key, val))
        if e.source != f.range:
            raise MalformedSkeleton(f"square key {key} is not composable", (key, val))
        if f2.source != e2.range:
            raise MalformedSkeleton(f"square value {val} is not composable", (key, val))
        if e.range != f2.range or f.source != e2.source:
            raise EndpointMismatch(
                f"square {key} -> {val} moves the endpoints", (key, val)
            )
        entries_by_pair.setdefault((e.color, f.color), {})[key] = val

    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            asc = {
                (e.ident, f.ident)
                for e in skel.edges
                if e.color == i
                for f in skel.edges
                if f.color == j and e.source == f.range
            }
            desc = {
                (f.ident, e.ident)
                for f in skel.edges
                if f.color == j
                for e in skel.edges
                if e.color == i and f.source == e.range
            }
            table = entries_by_pair.get((i, j), {})
            missing = asc - set(table)
            if missing:
                w = sorted(missing)[0]
                raise SquareNotBijective(
                    f"colors ({i},{j}): composable pair {w} has no square", w
                )
            images = list(table.values())
            if len(set(images)) != len(images):
                dup = sorted(v for v in set(images) if images.count(v) > 1)[0]
                keys = sorted(kk for kk, v in table.items() if v == dup)
                raise SquareNotBijective(
                    f"colors ({i},{j}): image {dup} repeated for keys {keys}", (dup, keys)
                )
            uncovered = desc - set(images)
            if uncovered:
                w = sorted(uncovered)[0]
                raise SquareNotBijective(
                    f"colors ({i},{j}): factorization {w} is not a square image", w
                )

    if k >= 3:
        _check_hexagon(skel, edge)
    cls = _cls or KGraph
    return cls(skel, _token=_VALIDATED, **extra)


def _check_hexagon(skel: KGraphSkeleton, edge: dict[str, Edge]) -> None:
    """Compare the two swap routes on every composable tri-colored triple."""
    sq = skel.squares

    def swap(a: str, b: str) -> tuple[str, str]:
        return sq[(a, b)]

    by_color: dict[int, list[Edge]] = {}
    for e in skel.edges:
        by_color.setdefault(e.color, []).append(e)
    colors = sorted(by_color)
    for ai in range(len(colors)):
        for bi in range(ai + 1, len(colors)):
            for ci in range(bi + 1, len(colors)):
                i, j, l = colors[ai], colors[bi], colors[ci]
                for x in by_color[i]:
                    for y in by_color[j]:
                        if x.source != y.range:
                            continue
                        for z in by_color[l]:
                            if y.source != z.range:
                                continue
                            # route A: positions 23, 12, 23
                            z1, y1 = swap(y.ident, z.ident)
                            z2, x1 = swap(x.ident, z1)
                            y2, x2 = swap(x1, y1)
                            ra = (z2, y2, x2)
                            # route B: positions 12, 23, 12
                            yb, xb = swap(x.ident, y.ident)
                            zb, xb2 = swap(xb, z.ident)
                            zb2, yb2 = swap(yb, zb)
                            rb = (zb2, yb2, xb2)
                            if ra != rb:
                                raise HexagonViolation(
                                    f"triple ({x.ident},{y.ident},{z.ident}) "
                                    f"reverses to {ra} or {rb} depending on route",
                                    ((x.ident, y.ident, z.ident), ra, rb),
                                )


# -- fixtures ---------------------------------------------------------------


def fixture_f1() -> KGraph:
    """One vertex, one loop per color (k = 2), the only possible square."""
    skel = make_skeleton(
        2,
        ["*"],
        [("e", 1, "*", "*"), ("f", 2, "*", "*")],
        [(("e", "f"), ("f", "e"))],
    )
    return validate_skeleton(skel)


def fixture_f2() -> KGraph:
    """The 1-graph two-cycle: u <-a- v, v <-b- u."""
    skel = make_skeleton(1, ["u", "v"], [("a", 1, "u", "v"), ("b", 1, "v", "u")])
    return validate_skeleton(skel)


def single_vertex(k: int, loops) -> KGraph:
    """One vertex with loops[i-1] loops of color i and flip squares."""
    loops = tuple(int(x) for x in loops)
    if len(loops) != k or any(x < 1 for x in loops):
        raise UnknownFixture(f"need {k} positive loop counts, got {loops}", loops)
    edges = []
    for i in range(1, k + 1):
        for j in range(loops[i - 1]):
            edges.append((f"c{i}x{j}", i, "*", "*"))
    squares = []
    for i in range(1, k + 1):
        for j in range(i + 1, k + 1):
            for a in range(loops[i - 1]):
                for b in range(loops[j - 1]):
                    e, f = f"c{i}x{a}", f"c{j}x{b}"
                    squares.append(((e, f), (f, e)))
    return validate_skeleton(make_skeleton(k, ["*"], edges, squares))


def _vid(m) -> str:
    return ",".join(str(x) for x in m)


def omega(k: int, cap) -> KGraph:
    """The degree-truncated lattice graph: vertices m <= cap, one edge m -> m+e_i."""
    cap = dg.as_degree(cap, k)
    verts = list(dg.degrees_upto(cap))
    edges = []
    for m in verts:
        for i in range(1, k + 1):
            mi = dg.add(m, dg.unit(k, i))
            if dg.leq(mi, cap):
                # range m, source m+e_i: paths point toward larger lattice points
                edges.append((f"c{i}:{_vid(m)}", i, _vid(m), _vid(mi)))
    squares = []
    for m in verts:
        for i in range(1, k + 1):
            for j in range(i + 1, k + 1):
                mij = dg.add(m, dg.add(dg.unit(k, i), dg.unit(k, j)))
                if not dg.leq(mij, cap):
                    continue
                mi = dg.add(m, dg.unit(k, i))
                mj = dg.add(m, dg.unit(k, j))
                squares.append(
                    (
                        (f"c{i}:{_vid(m)}", f"c{j}:{_vid(mi)}"),
                        (f"c{j}:{_vid(m)}", f"c{i}:{_vid(mj)}"),
                    )
                )
    return validate_skeleton(make_skeleton(k, [_vid(m) for m in verts], edges, squares))


def builtin_fixtures(name: str, **params) -> KGraph:
    """Deterministic named fixtures; 'random' defers to the generator module."""
    if name == "f1":
        return fixture_f1()
    if name == "f2":
        return fixture_f2()
    if name == "single_vertex":
        return single_vertex(params.get("k", 2), params.get("edges", (1, 1)))
    if name == "omega":
        return omega(params["k"], params["cap"])
    if name == "random":
        from .verify import random_kgraph

        return random_kgraph(
            params.get("seed", 0),
            k=params.get("k", 2),
            max_vertices=params.get("max_vertices", 3),
            max_shifts=params.get("max_shifts", 2),
        )
    raise UnknownFixture(f"no fixture named {name!r}", name)
