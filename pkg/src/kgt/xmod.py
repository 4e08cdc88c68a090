"""The finite-path module system X: one Hilbert-module fiber X_n per degree.

X_n is the space of complex functions on Lambda^n.  The inner product sums
conj(f) g over each source fiber, the vertex algebra acts through r on the
left and s on the right, and the cocycle twists the multiplication

    (f g)(la) = c(la(0,m), la(m,m+n)) f(la(0,m)) g(la(m,m+n)).

Everything here is exact finite-dimensional linear algebra over numpy
arrays; adjointable operators on a fiber are precisely the matrices that are
block-diagonal over the source vertex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import degrees as dg
from .cocycle import Cocycle
from .errors import DegreeMismatch, DegreeNotDominated
from .kgraph import KGraph, Path


def _as_coeffs(values, size: int) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128)
    if arr.shape != (size,):
        raise DegreeMismatch(f"coefficient vector has shape {arr.shape}, expected ({size},)", arr.shape)
    return arr


class VertexFn:
    """A complex function on the vertex set, the degree-zero coefficient algebra."""

    def __init__(self, graph: KGraph, values):
        self.graph = graph
        self.values = _as_coeffs(values, len(graph.vertices))

    @classmethod
    def indicator(cls, graph: KGraph, v: str) -> "VertexFn":
        out = np.zeros(len(graph.vertices), dtype=np.complex128)
        out[graph.vertex_index[v]] = 1.0
        return cls(graph, out)

    @classmethod
    def ones(cls, graph: KGraph) -> "VertexFn":
        return cls(graph, np.ones(len(graph.vertices)))

    @classmethod
    def zeros(cls, graph: KGraph) -> "VertexFn":
        return cls(graph, np.zeros(len(graph.vertices)))

    def __call__(self, v: str) -> complex:
        return complex(self.values[self.graph.vertex_index[v]])

    def __add__(self, other: "VertexFn") -> "VertexFn":
        return VertexFn(self.graph, self.values + other.values)

    def __sub__(self, other: "VertexFn") -> "VertexFn":
        return VertexFn(self.graph, self.values - other.values)

    def __mul__(self, scalar) -> "VertexFn":
        return VertexFn(self.graph, self.values * scalar)

    __rmul__ = __mul__

    def conj(self) -> "VertexFn":
        return VertexFn(self.graph, np.conj(self.values))

    def close(self, other: "VertexFn", tol: float = 1e-9) -> bool:
        return bool(np.allclose(self.values, other.values, atol=tol, rtol=0.0))

    def is_zero(self, tol: float = 0.0) -> bool:
        return bool(np.all(np.abs(self.values) <= tol))

    def __repr__(self) -> str:
        pairs = ", ".join(f"{v}: {x:.3g}" for v, x in zip(self.graph.vertices, self.values))
        return f"VertexFn({pairs})"


class XElem:
    """An element of X_n: coefficients over the canonical order of Lambda^n."""

    def __init__(self, graph: KGraph, degree, coeffs):
        self.graph = graph
        self.degree = dg.as_degree(degree, graph.k)
        self.coeffs = _as_coeffs(coeffs, len(graph.paths(self.degree)))

    @classmethod
    def delta(cls, graph: KGraph, la: Path) -> "XElem":
        out = np.zeros(len(graph.paths(la.degree)), dtype=np.complex128)
        out[graph.path_index(la.degree)[la]] = 1.0
        return cls(graph, la.degree, out)

    @classmethod
    def zeros(cls, graph: KGraph, degree) -> "XElem":
        degree = dg.as_degree(degree, graph.k)
        return cls(graph, degree, np.zeros(len(graph.paths(degree))))

    def __call__(self, la: Path) -> complex:
        return complex(self.coeffs[self.graph.path_index(self.degree)[la]])

    def __add__(self, other: "XElem") -> "XElem":
        self._match(other)
        return XElem(self.graph, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other: "XElem") -> "XElem":
        self._match(other)
        return XElem(self.graph, self.degree, self.coeffs - other.coeffs)

    def __mul__(self, scalar) -> "XElem":
        return XElem(self.graph, self.degree, self.coeffs * scalar)

    __rmul__ = __mul__

    def conj(self) -> "XElem":
        return XElem(self.graph, self.degree, np.conj(self.coeffs))

    def _match(self, other: "XElem") -> None:
        if self.degree != other.degree or self.graph is not other.graph:
            raise DegreeMismatch(
                f"elements live in different fibers: {self.degree} vs {other.degree}",
                (self.degree, other.degree),
            )

    def norm(self) -> float:
        """Module norm: max over vertices of the fiber l2 norm."""
        best = 0.0
        for ix in self.graph.by_source(self.degree).values():
            if ix:
                best = max(best, float(np.sum(np.abs(self.coeffs[list(ix)]) ** 2)))
        return best**0.5

    def close(self, other: "XElem", tol: float = 1e-9) -> bool:
        self._match(other)
        return bool(np.allclose(self.coeffs, other.coeffs, atol=tol, rtol=0.0))

    def __repr__(self) -> str:
        terms = [
            f"{x:.3g}*d[{'.'.join(p.edges) or p.range}]"
            for p, x in zip(self.graph.paths(self.degree), self.coeffs)
            if abs(x) > 1e-12
        ]
        return "XElem(" + (" + ".join(terms) if terms else "0") + f", deg {self.degree})"


class XOp:
    """An adjointable operator on X_n: a source-block-diagonal matrix."""

    def __init__(self, graph: KGraph, degree, matrix, require_block: bool = True):
        self.graph = graph
        self.degree = dg.as_degree(degree, graph.k)
        size = len(graph.paths(self.degree))
        self.matrix = np.asarray(matrix, dtype=np.complex128)
        if self.matrix.shape != (size, size):
            raise DegreeMismatch(
                f"matrix shape {self.matrix.shape} does not match |paths| = {size}",
                self.matrix.shape,
            )
        if require_block and not self._is_block(1e-12):
            raise ValueError("matrix couples different source vertices; not adjointable here")

    def _is_block(self, tol: float) -> bool:
        sources = np.array([p.source for p in self.graph.paths(self.degree)])
        mask = sources[:, None] != sources[None, :]
        return bool(np.all(np.abs(self.matrix[mask]) <= tol)) if mask.any() else True

    @classmethod
    def identity(cls, graph: KGraph, degree) -> "XOp":
        degree = dg.as_degree(degree, graph.k)
        return cls(graph, degree, np.eye(len(graph.paths(degree))))

    @classmethod
    def zeros(cls, graph: KGraph, degree) -> "XOp":
        degree = dg.as_degree(degree, graph.k)
        n = len(graph.paths(degree))
        return cls(graph, degree, np.zeros((n, n)))

    def __call__(self, f: XElem) -> XElem:
        if f.degree != self.degree:
            raise DegreeMismatch(f"operator degree {self.degree}, element degree {f.degree}", None)
        return XElem(self.graph, self.degree, self.matrix @ f.coeffs)

    def __add__(self, other: "XOp") -> "XOp":
        return XOp(self.graph, self.degree, self.matrix + other.matrix, require_block=False)

    def __sub__(self, other: "XOp") -> "XOp":
        return XOp(self.graph, self.degree, self.matrix - other.matrix, require_block=False)

    def __mul__(self, scalar) -> "XOp":
        return XOp(self.graph, self.degree, self.matrix * scalar, require_block=False)

    __rmul__ = __mul__

    def __matmul__(self, other: "XOp") -> "XOp":
        if self.degree != other.degree:
            raise DegreeMismatch("composing operators on different fibers", None)
        return XOp(self.graph, self.degree, self.matrix @ other.matrix, require_block=False)

    def adjoint(self) -> "XOp":
        return XOp(self.graph, self.degree, self.matrix.conj().T, require_block=False)

    def norm(self) -> float:
        """Operator norm; block structure makes this the max over source blocks."""
        return float(np.linalg.norm(self.matrix, 2)) if self.matrix.size else 0.0

    def close(self, other: "XOp", tol: float = 1e-9) -> bool:
        return bool(np.allclose(self.matrix, other.matrix, atol=tol, rtol=0.0))

    def __repr__(self) -> str:
        return f"XOp(deg {self.degree}, {self.matrix.shape[0]}x{self.matrix.shape[0]})"


# -- module operations -------------------------------------------------------


def x_inner(f: XElem, g: XElem) -> VertexFn:
    """<f, g>(v) = sum over s(la) = v of conj(f(la)) g(la)."""
    f._match(g)
    graph = f.graph
    out = np.zeros(len(graph.vertices), dtype=np.complex128)
    prod = np.conj(f.coeffs) * g.coeffs
    for v, ix in graph.by_source(f.degree).items():
        if ix:
            out[graph.vertex_index[v]] = np.sum(prod[list(ix)])
    return VertexFn(graph, out)


def x_act(a: VertexFn, f: XElem, side: str = "left") -> XElem:
    """Left action through the range map, right action through the source map."""
    graph = f.graph
    paths = graph.paths(f.degree)
    vidx = graph.vertex_index
    if side == "left":
        weights = np.array([a.values[vidx[p.range]] for p in paths])
    elif side == "right":
        weights = np.array([a.values[vidx[p.source]] for p in paths])
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    return XElem(graph, f.degree, weights * f.coeffs)


def _cocycle_on_factors(c: Cocycle, m, n) -> np.ndarray:
    """Vector over Lambda^(m+n): the twist c(la(0,m), la(m,m+n))."""
    g = c.graph
    total = dg.add(dg.as_degree(m, g.k), dg.as_degree(n, g.k))
    pm, pn = g.paths(m), g.paths(n)
    out = np.empty(len(g.paths(total)), dtype=np.complex128)
    for i, (ip, isfx) in enumerate(g.factor_indices(m, n)):
        out[i] = complex(c(pm[ip], pn[isfx]))
    return out


def x_tmul(c: Cocycle, f: XElem, g: XElem) -> XElem:
    """Twisted product landing in X_(m+n)."""
    graph = f.graph
    m, n = f.degree, g.degree
    total = dg.add(m, n)
    factors = graph.factor_indices(m, n)
    pre = np.array([i for i, _ in factors], dtype=int)
    suf = np.array([j for _, j in factors], dtype=int)
    twist = _cocycle_on_factors(c, m, n)
    return XElem(graph, total, twist * f.coeffs[pre] * g.coeffs[suf])


def x_theta(f: XElem, g: XElem) -> XOp:
    """The rank-one operator h -> f <g, h>."""
    f._match(g)
    graph = f.graph
    paths = graph.paths(f.degree)
    sources = np.array([p.source for p in paths])
    mat = np.outer(f.coeffs, np.conj(g.coeffs))
    mat[sources[:, None] != sources[None, :]] = 0.0
    return XOp(graph, f.degree, mat)


def phi_x(a: VertexFn, n, graph: KGraph | None = None) -> XOp:
    """Left multiplication by a on X_n: the diagonal a(r(la))."""
    graph = graph or a.graph
    vidx = graph.vertex_index
    diag = np.array([a.values[vidx[p.range]] for p in graph.paths(n)])
    return XOp(graph, n, np.diag(diag))


def x_iota(c: Cocycle, S: XOp, n) -> XOp:
    """Extend S in L(X_m) to L(X_n) via iota(S)(x y) = (S x) y.

    Computed by basis transport: factor each degree-n path at m, apply S to
    the prefix, re-multiply, and track the two cocycle phases.  With m = 0
    this reproduces left multiplication by the diagonal of S.
    """
    g = S.graph
    m = S.degree
    n = dg.as_degree(n, g.k)
    if not dg.leq(m, n):
        raise DegreeNotDominated(f"target degree {n} does not dominate {m}", (m, n))
    diff = dg.sub(n, m)
    pm, pd = g.paths(m), g.paths(diff)
    idx_m = {p: i for i, p in enumerate(pm)}
    twist = _cocycle_on_factors(c, m, diff)
    factors = g.factor_indices(m, diff)
    target_index = g.path_index(n)
    size = len(g.paths(n))
    out = np.zeros((size, size), dtype=np.complex128)
    col_of = {}
    for col, (ip, isfx) in enumerate(factors):
        col_of[(ip, isfx)] = col
    for col, (ip, isfx) in enumerate(factors):
        colvec = S.matrix[:, ip]
        if not np.any(colvec):
            continue
        nu = pd[isfx]
        for ip2 in np.nonzero(colvec)[0]:
            mu2 = pm[ip2]
            if mu2.source != nu.range:
                continue
            row = col_of[(int(ip2), isfx)]
            out[row, col] = colvec[ip2] * twist[row] * np.conj(twist[col])
    return XOp(g, n, out)


def phi_x_decompose(c: Cocycle, a: VertexFn, n) -> list[XElem]:
    """Elements g_i with phi_x(a, n) = sum_i Theta_{g_i, conj(g_i)}.

    Uses the finest partition: one singleton per path whose range carries
    mass.  Each singleton support is an s-section, and the complex square
    root makes the rank-one sum reproduce the diagonal exactly.
    """
    graph = a.graph
    out = []
    vidx = graph.vertex_index
    for la in graph.paths(n):
        w = a.values[vidx[la.range]]
        if w != 0:
            out.append(np.sqrt(complex(w)) * XElem.delta(graph, la))
    return out


def x_compact_align(c: Cocycle, S: XOp, T: XOp) -> XOp:
    """iota_m^(m v n)(S) . iota_n^(m v n)(T), the aligned product."""
    join = dg.join(S.degree, T.degree)
    return x_iota(c, S, join) @ x_iota(c, T, join)


# -- batch verification ------------------------------------------------------


@dataclass
class ModuleReport:
    ok: bool
    cases_checked: int = 0
    first_failure: tuple | None = None


def x_tensor_iso_check(c: Cocycle, m, n, tol: float = 1e-9) -> ModuleReport:
    """Check the two-step inner-product identity on the full delta basis and
    that the twisted products of basis vectors span X_(m+n).

    The identity: <f1 g1, f2 g2> = <g1, <f1, f2> g2> for all basis choices
    f from X_m, g from X_n.  Phases of unit modulus drop out; a corrupted
    multiplier with |value| != 1 fails immediately.
    """
    g = c.graph
    m = dg.as_degree(m, g.k)
    n = dg.as_degree(n, g.k)
    total = dg.add(m, n)
    pm, pn, pt = g.paths(m), g.paths(n), g.paths(total)
    rep = ModuleReport(True)

    factors = g.factor_indices(m, n)
    pre = np.array([i for i, _ in factors], dtype=int)
    suf = np.array([j for _, j in factors], dtype=int)
    twist = np.array([complex(c(pm[i], pn[j])) for i, j in factors])

    # products[i, j, :] = coefficients of delta_i * delta_j in X_total
    a, b, P = len(pm), len(pn), len(pt)
    products = np.zeros((a, b, P), dtype=np.complex128)
    for col in range(P):
        products[pre[col], suf[col], col] = twist[col]

    vsrc_t = {v: list(ix) for v, ix in g.by_source(total).items()}
    vsrc_n = {v: list(ix) for v, ix in g.by_source(n).items()}
    inner_m = np.zeros((len(g.vertices), a, a), dtype=np.complex128)
    for v, ix in g.by_source(m).items():
        vi = g.vertex_index[v]
        for i in ix:
            inner_m[vi, i, i] = 1.0  # <delta_i, delta_j> = [i=j] at s(mu_i)
    range_n = np.array([g.vertex_index[p.range] for p in pn])

    for v in g.vertices:
        vi = g.vertex_index[v]
        cols = vsrc_t.get(v, [])
        block = products[:, :, cols].reshape(a * b, -1)
        lhs = np.conj(block) @ block.T  # (ab, ab)
        rhs = np.zeros((a, b, a, b), dtype=np.complex128)
        for nu in vsrc_n.get(v, []):
            rhs[:, nu, :, nu] += inner_m[range_n[nu]]
        rhs = rhs.reshape(a * b, a * b)
        rep.cases_checked += lhs.size
        if not np.allclose(lhs, rhs, atol=tol, rtol=0.0):
            bad = np.unravel_index(np.argmax(np.abs(lhs - rhs)), lhs.shape)
            i1, j1 = divmod(bad[0], b)
            i2, j2 = divmod(bad[1], b)
            rep.ok = False
            rep.first_failure = (
                "tps-inner-product",
                (pm[i1], pn[j1], pm[i2], pn[j2], v),
                (lhs[bad], rhs[bad]),
            )
            return rep

    span_dim = int(np.linalg.matrix_rank(products.reshape(a * b, P)))
    if span_dim != P:
        rep.ok = False
        rep.first_failure = ("span", (m, n), (span_dim, P))
    return rep
