"""Circle-valued 2-cocycles on path categories.

A cocycle assigns a unit-modulus scalar c(lambda, mu) to every composable
pair, subject to

    (C1)  c(la, mu) c(la.mu, nu) = c(la, mu.nu) c(mu, nu)
    (C2)  c(la, s(la)) = c(r(la), la) = 1.

Values are Phase objects, exact whenever the construction permits, so that
the identity checks in the rest of the package can demand equality rather
than closeness.  check_cocycle enumerates (C1) over all composable triples up
to a degree cap by walking each path's three-way factorizations, which visits
every triple exactly once.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import degrees as dg
from .constructions import CartesianProductGraph, CrossedProductGraph, SkewProductGraph
from .errors import (
    CapTooSmallForRequestedDegree,
    GraphMismatch,
    NotACocycle,
    NotAFunctor,
    NotBetaInvariant,
    NotComposable,
)
from .kgraph import KGraph, Path
from .phases import ONE, Phase, parse_angle, product

EXACT = "exact-angle"
FLOAT = "float"

_MEMO_TOTAL_CAP = 16


def as_phase(x) -> Phase:
    """Coerce a user-supplied value to a Phase, exactly when possible."""
    if isinstance(x, Phase):
        return x
    if isinstance(x, str):
        return parse_angle(x)
    if isinstance(x, complex):
        return Phase.from_complex(x)
    # numbers are radian angles; going through Fraction keeps arithmetic exact
    return Phase.exact_radians(Fraction(x))


class Cocycle:
    """Evaluator plus memo table; construct via the functions below."""

    def __init__(self, graph: KGraph, evaluator, mode: str = EXACT, name: str = "cocycle"):
        self.graph = graph
        self.evaluator = evaluator
        self.mode = mode
        self.name = name
        self._memo: dict[tuple[Path, Path], Phase] = {}

    def __call__(self, la: Path, mu: Path) -> Phase:
        if la.source != mu.range:
            raise NotComposable(f"cocycle argument pair is not composable", (la, mu))
        if la.is_vertex or mu.is_vertex:
            return ONE
        key = (la, mu)
        hit = self._memo.get(key)
        if hit is None:
            hit = self.evaluator(la, mu)
            if dg.total(la.degree) + dg.total(mu.degree) <= _MEMO_TOTAL_CAP:
                self._memo[key] = hit
        return hit

    def conj(self, la: Path, mu: Path) -> Phase:
        return self(la, mu).conj()

    def __repr__(self) -> str:
        return f"Cocycle({self.name}, {self.mode})"


def trivial_cocycle(g: KGraph) -> Cocycle:
    return Cocycle(g, lambda la, mu: ONE, EXACT, "trivial")


# -- degree bicharacters -----------------------------------------------------


def bicharacter_cocycle(g: KGraph, theta, mode=None, name="bicharacter") -> Cocycle:
    """c(la, mu) = prod_ij theta[i][j]^(d(la)_i d(mu)_j), theta entries being
    phases (numbers are radian angles).  Bilinearity of the exponent makes
    (C1) hold for any matrix, and degree-0 legs kill the product, giving (C2).
    """
    mat = [[as_phase(x) for x in row] for row in theta]
    if len(mat) != g.k or any(len(row) != g.k for row in mat):
        raise GraphMismatch(f"need a {g.k}x{g.k} matrix, got {len(mat)} rows", theta)
    exact = all(p.is_exact for row in mat for p in row)

    def ev(la: Path, mu: Path) -> Phase:
        return product(
            mat[i][j] ** (la.degree[i] * mu.degree[j])
            for i in range(g.k)
            for j in range(g.k)
            if la.degree[i] and mu.degree[j]
        )

    return Cocycle(g, ev, mode or (EXACT if exact else FLOAT), name)


def c_theta(g: KGraph, theta) -> Cocycle:
    """The standard twist exp(i * theta * d(la)_2 * d(mu)_1) on a rank >= 2 graph."""
    if g.k < 2:
        raise GraphMismatch("this twist needs at least two colors", g.k)
    mat = [[Phase.one() for _ in range(g.k)] for _ in range(g.k)]
    mat[1][0] = as_phase(theta)
    return bicharacter_cocycle(g, mat, name="c_theta")


# -- crossed-product families ------------------------------------------------


def _require_crossed(g) -> CrossedProductGraph:
    if not isinstance(g, CrossedProductGraph):
        raise GraphMismatch("this family is defined on crossed products", g)
    return g


def functor_from_edge_table(g: KGraph, table: dict) -> dict:
    """Validate that edge values extend to a functor (squares agree) and
    return the table with values coerced to Phase."""
    out = {}
    for e in g.all_edges:
        if e.ident not in table:
            raise NotAFunctor(f"no value for edge {e.ident!r}", e.ident)
        out[e.ident] = as_phase(table[e.ident])
    for (e, f), (f2, e2) in g.skeleton.squares.items():
        if out[e] * out[f] != out[f2] * out[e2]:
            raise NotAFunctor(f"values disagree on the square {(e, f)} = {(f2, e2)}", (e, f))
    return out


def _functor_value(table: dict, la: Path) -> Phase:
    return product(table[e] for e in la.edges)


def c_f(gamma: CrossedProductGraph, f_table: dict) -> Cocycle:
    """c((mu,m),(nu,n)) = f(nu)^|m| for a beta-invariant functor f on the base."""
    gamma = _require_crossed(gamma)
    base = gamma.base
    table = functor_from_edge_table(base, f_table)
    for j in range(1, gamma.l + 1):
        for e in base.all_edges:
            if table[gamma.action.edge(j, e.ident)] != table[e.ident]:
                raise NotBetaInvariant(
                    f"f moves under generator {j} at edge {e.ident!r}", (j, e.ident)
                )
    exact = all(p.is_exact for p in table.values())

    def ev(la: Path, mu: Path) -> Phase:
        _, m = gamma.project(la)
        nu, _ = gamma.project(mu)
        return _functor_value(table, nu) ** dg.total(m)

    return Cocycle(gamma, ev, EXACT if exact else FLOAT, "c_f")


def c_omega(gamma: CrossedProductGraph, generators) -> Cocycle:
    """c((mu,m),(nu,n)) = omega(m)^|d(nu)| for omega given by l phases."""
    gamma = _require_crossed(gamma)
    gens = [as_phase(x) for x in generators]
    if len(gens) != gamma.l:
        raise GraphMismatch(f"need {gamma.l} generators, got {len(gens)}", generators)
    exact = all(p.is_exact for p in gens)

    def ev(la: Path, mu: Path) -> Phase:
        _, m = gamma.project(la)
        nu, _ = gamma.project(mu)
        omega_m = product(p**mi for p, mi in zip(gens, m))
        return omega_m ** dg.total(nu.degree)

    return Cocycle(gamma, ev, EXACT if exact else FLOAT, "c_omega")


def c_sigma(gamma: CrossedProductGraph, theta) -> Cocycle:
    """Lattice-coordinate twist: entry theta[i][j] contributes the angle
    theta[i][j] * m_j * n_i for lattice parts m (first argument) and n
    (second).  Realized as a degree bicharacter supported on the new-color
    block, so the cocycle identity is inherited from bilinearity.
    """
    gamma = _require_crossed(gamma)
    l, k = gamma.l, gamma.base.k
    rows = [[as_phase(x) for x in row] for row in theta]
    if len(rows) != l or any(len(r) != l for r in rows):
        raise GraphMismatch(f"need an {l}x{l} matrix", theta)
    full = [[Phase.one() for _ in range(gamma.k)] for _ in range(gamma.k)]
    for i in range(l):
        for j in range(l):
            full[k + j][k + i] = rows[i][j]
    return bicharacter_cocycle(gamma, full, name="c_sigma")


# -- lifts and products ------------------------------------------------------


def skew_lift(c: Cocycle, skew: SkewProductGraph) -> Cocycle:
    """The same values read through the skew projection."""
    if not isinstance(skew, SkewProductGraph):
        raise GraphMismatch("need a skew product graph", skew)
    if skew.base is not c.graph:
        raise GraphMismatch("skew product was built from a different base", (c.graph, skew.base))

    def ev(la: Path, mu: Path) -> Phase:
        p, _ = skew.project(la)
        q, _ = skew.project(mu)
        return c(p, q)

    return Cocycle(skew, ev, c.mode, f"skew_lift({c.name})")


def product_cocycle(c1: Cocycle, c2: Cocycle, prod: CartesianProductGraph) -> Cocycle:
    """Factorwise product on a Cartesian product graph."""
    if not isinstance(prod, CartesianProductGraph):
        raise GraphMismatch("need a Cartesian product graph", prod)
    if prod.left is not c1.graph or prod.right is not c2.graph:
        raise GraphMismatch("product graph was built from different factors", prod)

    def ev(la: Path, mu: Path) -> Phase:
        l1, l2 = prod.project(la)
        m1, m2 = prod.project(mu)
        return c1(l1, m1) * c2(l2, m2)

    mode = EXACT if c1.mode == EXACT and c2.mode == EXACT else FLOAT
    return Cocycle(prod, ev, mode, f"product({c1.name},{c2.name})")


# -- table-backed cocycles ---------------------------------------------------


def from_table(g: KGraph, entries: dict, cap, mode=EXACT, check=True) -> Cocycle:
    """entries: (la.edges, mu.edges) -> phase, on composable non-vertex pairs.

    Pairs with a vertex leg are served by (C2).  Lookups beyond the stored cap
    raise CapTooSmallForRequestedDegree.
    """
    cap = dg.as_degree(cap, g.k)
    table = {}
    for (le, me), val in entries.items():
        table[(tuple(le), tuple(me))] = as_phase(val)

    def ev(la: Path, mu: Path) -> Phase:
        if not dg.leq(dg.add(la.degree, mu.degree), cap):
            raise CapTooSmallForRequestedDegree(
                f"pair degree {dg.add(la.degree, mu.degree)} beyond table cap {cap}",
                (la, mu),
            )
        try:
            return table[(la.edges, mu.edges)]
        except KeyError:
            raise CapTooSmallForRequestedDegree(
                f"no table entry for {(la, mu)}", (la, mu)
            ) from None

    c = Cocycle(g, ev, mode, "table")
    if check:
        rep = check_cocycle(c, cap)
        if not rep.ok:
            raise NotACocycle(
                f"table fails {rep.first_failure[0]} at {rep.first_failure[1]}",
                rep.first_failure,
            )
    return c


def tabulate(c: Cocycle, cap) -> dict:
    """Dump c on all composable non-vertex pairs with total degree <= cap."""
    g = c.graph
    cap = dg.as_degree(cap, g.k)
    out = {}
    for total in dg.degrees_upto(cap):
        for m, n in dg.splits(total, 2):
            if not any(m) or not any(n):
                continue
            for la in g.paths(total):
                mu, nu = g.split(la, m)
                out[(mu.edges, nu.edges)] = c(mu, nu)
    return out


# -- coboundaries ------------------------------------------------------------


class Coboundary:
    """A path function b with b = 1 on vertices; delta() is its 2-coboundary."""

    def __init__(self, graph: KGraph, values, name: str = "b"):
        self.graph = graph
        self._fn = values if callable(values) else None
        self._table = None if callable(values) else dict(values)
        self.name = name

    def __call__(self, la: Path) -> Phase:
        if la.is_vertex:
            return ONE
        if self._fn is not None:
            return self._fn(la)
        return self._table[la]

    def delta(self, mode=EXACT) -> Cocycle:
        def ev(la: Path, mu: Path) -> Phase:
            return self(la) * self(mu) * self(self.graph.compose(la, mu)).conj()

        return Cocycle(self.graph, ev, mode, f"delta({self.name})")


# -- exhaustive checking -----------------------------------------------------


@dataclass
class CocycleReport:
    ok: bool
    pairs_checked: int = 0
    triples_checked: int = 0
    first_failure: tuple | None = None  # (kind, witness paths, values)


def check_cocycle(c: Cocycle, cap, tol: float = 1e-9) -> CocycleReport:
    """Exhaustively verify (C1) on composable triples with total degree <= cap
    and (C2) on all paths <= cap.  Exact mode uses zero tolerance."""
    g = c.graph
    cap = dg.as_degree(cap, g.k)
    eps = 0.0 if c.mode == EXACT else tol
    rep = CocycleReport(True)

    for total in dg.degrees_upto(cap):
        for la in g.paths(total):
            left = c(la, g.vertex_path(la.source))
            right = c(g.vertex_path(la.range), la)
            rep.pairs_checked += 2
            if not (left.close(ONE, eps) and right.close(ONE, eps)):
                rep.ok = False
                rep.first_failure = ("C2", la, (left, right))
                return rep

    for total in dg.degrees_upto(cap):
        for m, n, p in dg.splits(total, 3):
            for la in g.paths(total):
                l1, rest = g.split(la, m)
                l2, l3 = g.split(rest, n)
                lhs = c(l1, l2) * c(g.compose(l1, l2), l3)
                rhs = c(l1, g.compose(l2, l3)) * c(l2, l3)
                rep.triples_checked += 1
                if not lhs.close(rhs, eps):
                    rep.ok = False
                    rep.first_failure = ("C1", (l1, l2, l3), (lhs, rhs))
                    return rep
                if c.mode == FLOAT:
                    val = abs(complex(c(l1, l2)))
                    if abs(val - 1.0) > tol:
                        rep.ok = False
                        rep.first_failure = ("modulus", (l1, l2), val)
                        return rep
    return rep


# -- cohomology comparison ---------------------------------------------------


@dataclass
class CohomologyCounterexample:
    reason: str
    witness: tuple


def are_cohomologous(c1: Cocycle, c2: Cocycle, cap):
    """Try to build b with c1 = (delta b) * c2, pinning b = 1 on color-1 edges.

    Unknown edge values are solved color by color from the square relations,
    longer paths are filled in by first-edge propagation, and the candidate is
    re-verified on every composable pair with total degree <= cap.  A
    counterexample only certifies that this propagation failed, not that no
    coboundary exists.
    """
    if c1.graph is not c2.graph:
        raise GraphMismatch("cocycles live on different graphs", (c1.graph, c2.graph))
    g = c1.graph
    cap = dg.as_degree(cap, g.k)
    eps = 0.0 if (c1.mode == EXACT and c2.mode == EXACT) else 1e-9

    def q(la, mu):
        return c1(la, mu) * c2(la, mu).conj()

    b_edge: dict[str, Phase] = {e.ident: ONE for e in g.edges(1)}
    for j in range(2, g.k + 1):
        # relation graph on color-j edges: for each square (e,f) = (f2,e2)
        # with e, e2 of lower (already solved) color:
        #   b(f) * conj(b(f2)) = b(e2) * conj(b(e)) * q(e,f) * conj(q(f2,e2))
        adj: dict[str, list] = {e.ident: [] for e in g.edges(j)}
        for (e, f), (f2, e2) in g.skeleton.squares.items():
            ce, cf = g.edge(e).color, g.edge(f).color
            if cf != j or ce >= j:
                continue
            pe, pf = g.edge_path(e), g.edge_path(f)
            pf2, pe2 = g.edge_path(f2), g.edge_path(e2)
            ratio = b_edge[e2] * b_edge[e].conj() * q(pe, pf) * q(pf2, pe2).conj()
            adj[f].append((f2, ratio))  # b(f) = ratio * b(f2)
            adj[f2].append((f, ratio.conj()))
        for start in sorted(adj):
            if start in b_edge:
                continue
            b_edge[start] = ONE
            stack = [start]
            while stack:
                x = stack.pop()
                for y, ratio in adj[x]:
                    want = b_edge[x] * ratio.conj()  # b(y) from b(x) = ratio*b(y)
                    if y in b_edge:
                        if not b_edge[y].close(want, eps):
                            return CohomologyCounterexample(
                                "square relations over-determine an edge value",
                                (y, b_edge[y], want),
                            )
                    else:
                        b_edge[y] = want
                        stack.append(y)

    values: dict[Path, Phase] = {}

    def b(la: Path) -> Phase:
        if la.is_vertex:
            return ONE
        hit = values.get(la)
        if hit is None:
            if dg.total(la.degree) == 1:
                hit = b_edge[la.edges[0]]
            else:
                first = g.edge(la.edges[0])
                head = g.edge_path(first.ident)
                _, tail = g.split(la, dg.unit(g.k, first.color))
                hit = b(head) * b(tail) * q(head, tail).conj()
            values[la] = hit
        return hit

    for total in dg.degrees_upto(cap):
        for m, n in dg.splits(total, 2):
            for la in g.paths(total):
                mu, nu = g.split(la, m)
                db = b(mu) * b(nu) * b(la).conj()
                if not db.close(q(mu, nu), eps):
                    return CohomologyCounterexample(
                        "propagated b fails on a pair", (mu, nu, db, q(mu, nu))
                    )
    cob = Coboundary(g, b, name="solved")
    return cob
