"""Truncated Fock models for the finite-path system X and the cylinder system Y.

The space is a direct sum of degree blocks n <= N.  For X the block n carries
coordinates over Lambda^n; for Y it carries depth-(D-N+n) cylinder coordinates,
so that creation by a depth-minimal element of degree d sends the block-n stage
exactly onto the block-(n+d) stage.  Identities that survive truncation do so
on interior(d), the span of blocks of degree <= N-d; everything asserted here
is asserted at that compression, and defects are reported rather than dropped.

Adjoints are plain conjugate transposes: each block's pairing is the counting
l2 product of coefficient vectors, which is the module inner product summed
with weight one over the base.
"""

from __future__ import annotations

import numpy as np

from . import degrees as dg
from .cocycle import Cocycle
from .errors import (
    DegreeExceedsTruncation,
    DegreeMismatch,
    DegreeNotDominated,
    DepthOverflow,
)
from .kgraph import KGraph
from .xmod import (
    ModuleReport,
    VertexFn,
    XElem,
    XOp,
    phi_x_decompose,
    x_act,
    x_compact_align,
    x_inner,
    x_theta,
    x_tmul,
)
from .ymod import (
    CylElem,
    _facts,
    alpha,
    alpha_decompose,
    alpha_k,
    phi_y,
    phi_y_decompose,
    y_inner,
    y_iota,
    y_tmul,
)


class FockSpace:
    """Direct sum of the degree-n stages for n <= N, in graded lex order."""

    def __init__(self, graph: KGraph, N, system: str = "X", depth=None):
        if system not in ("X", "Y"):
            raise ValueError(f"system must be 'X' or 'Y', got {system!r}")
        self.graph = graph
        self.system = system
        self.N = dg.as_degree(N, graph.k)
        if system == "Y":
            if depth is None:
                raise ValueError("the cylinder model needs a working depth")
            self.D = dg.as_degree(depth, graph.k)
            if not dg.leq(self.N, self.D):
                raise DegreeNotDominated(f"depth {self.D} must dominate {self.N}", None)
        else:
            self.D = None
        self.blocks = dg.degrees_upto(self.N)
        self._pos = {n: i for i, n in enumerate(self.blocks)}
        self._offsets = []
        self._sizes = []
        at = 0
        for n in self.blocks:
            size = len(graph.paths(self.block_depth(n)))
            self._offsets.append(at)
            self._sizes.append(size)
            at += size
        self.dim = at
        self._deg = np.zeros((at, graph.k), dtype=int)
        for n in self.blocks:
            self._deg[self.block_slice(n)] = n

    def block_depth(self, n):
        n = dg.as_degree(n, self.graph.k)
        if self.system == "X":
            return n
        return dg.add(dg.sub(self.D, self.N), n)

    def block_slice(self, n) -> slice:
        i = self._pos[dg.as_degree(n, self.graph.k)]
        return slice(self._offsets[i], self._offsets[i] + self._sizes[i])

    def basis(self):
        """(degree, path) per coordinate, in storage order."""
        out = []
        for n in self.blocks:
            out.extend((n, p) for p in self.graph.paths(self.block_depth(n)))
        return tuple(out)

    def interior_mask(self, d) -> np.ndarray:
        d = dg.as_degree(d, self.graph.k)
        if not dg.leq(d, self.N):
            raise DegreeExceedsTruncation(f"{d} exceeds the truncation {self.N}", d)
        top = dg.sub(self.N, d)
        return np.all(self._deg <= np.asarray(top), axis=1)

    def embed(self, n, coeffs) -> np.ndarray:
        out = np.zeros(self.dim, dtype=np.complex128)
        out[self.block_slice(n)] = coeffs
        return out

    def __repr__(self) -> str:
        tag = f", D={self.D}" if self.system == "Y" else ""
        return f"FockSpace({self.system}, N={self.N}{tag}, dim={self.dim})"


class FockOp:
    """A matrix over the Fock basis mapping each degree-q block into q + shift."""

    def __init__(self, space: FockSpace, shift, matrix, require_block: bool = True):
        self.space = space
        self.shift = tuple(int(x) for x in shift)
        if len(self.shift) != space.graph.k:
            raise DegreeMismatch(f"shift rank {len(self.shift)} != {space.graph.k}", None)
        self.matrix = np.asarray(matrix, dtype=np.complex128)
        if self.matrix.shape != (space.dim, space.dim):
            raise DegreeMismatch(f"matrix shape {self.matrix.shape}, expected {space.dim}", None)
        if require_block:
            want = space._deg[None, :, :] + np.asarray(self.shift)
            ok = np.all(space._deg[:, None, :] == want, axis=2)
            if np.any(np.abs(self.matrix[~ok]) > 1e-12):
                raise ValueError(f"matrix entries leave the shift-{self.shift} blocks")

    @classmethod
    def zeros(cls, space: FockSpace, shift=None) -> "FockOp":
        shift = (0,) * space.graph.k if shift is None else shift
        return cls(space, shift, np.zeros((space.dim, space.dim)), require_block=False)

    @classmethod
    def identity(cls, space: FockSpace) -> "FockOp":
        return cls(space, (0,) * space.graph.k, np.eye(space.dim), require_block=False)

    def _same(self, other: "FockOp") -> None:
        if self.space is not other.space:
            raise DegreeMismatch("operators on different spaces", None)

    def __add__(self, other: "FockOp") -> "FockOp":
        self._same(other)
        if self.shift != other.shift:
            raise DegreeMismatch(f"shifts differ: {self.shift} vs {other.shift}", None)
        return FockOp(self.space, self.shift, self.matrix + other.matrix, require_block=False)

    def __sub__(self, other: "FockOp") -> "FockOp":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "FockOp":
        return FockOp(self.space, self.shift, self.matrix * scalar, require_block=False)

    __rmul__ = __mul__

    def __matmul__(self, other: "FockOp") -> "FockOp":
        self._same(other)
        shift = tuple(a + b for a, b in zip(self.shift, other.shift))
        return FockOp(self.space, shift, self.matrix @ other.matrix, require_block=False)

    def adjoint(self) -> "FockOp":
        return FockOp(
            self.space, tuple(-x for x in self.shift), self.matrix.conj().T, require_block=False
        )

    def __call__(self, vec) -> np.ndarray:
        return self.matrix @ np.asarray(vec, dtype=np.complex128)

    def on_interior(self, d) -> np.ndarray:
        """Columns restricted to interior vectors: the action tested by identities."""
        return self.matrix[:, self.space.interior_mask(d)]

    def compress(self, d) -> np.ndarray:
        mask = self.space.interior_mask(d)
        return self.matrix[np.ix_(mask, mask)]

    def close(self, other: "FockOp", tol: float = 1e-9) -> bool:
        self._same(other)
        return bool(np.allclose(self.matrix, other.matrix, atol=tol, rtol=0.0))

    def close_on_interior(self, other: "FockOp", d, tol: float = 1e-9) -> bool:
        self._same(other)
        return bool(np.allclose(self.on_interior(d), other.on_interior(d), atol=tol, rtol=0.0))

    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix, 2)) if self.matrix.size else 0.0

    def __repr__(self) -> str:
        return f"FockOp(shift {self.shift}, dim {self.space.dim})"


def gauge_unitary(space: FockSpace, z) -> FockOp:
    """Diagonal unitary acting by prod z_i^(n_i) on the degree-n block."""
    z = tuple(complex(x) for x in z)
    if len(z) != space.graph.k:
        raise DegreeMismatch(f"need {space.graph.k} circle coordinates", z)
    diag = np.ones(space.dim, dtype=np.complex128)
    for i, zi in enumerate(z):
        diag *= zi ** space._deg[:, i]
    return FockOp(space, (0,) * space.graph.k, np.diag(diag), require_block=False)


def creation_x(space: FockSpace, c: Cocycle, f: XElem) -> FockOp:
    """Left twisted multiplication by f, compressed at the truncation boundary."""
    if space.system != "X":
        raise ValueError("creation_x needs the finite-path model")
    g = space.graph
    d = f.degree
    if not dg.leq(d, space.N):
        raise DegreeExceedsTruncation(f"degree {d} exceeds {space.N}", d)
    M = np.zeros((space.dim, space.dim), dtype=np.complex128)
    pd = g.paths(d)
    for q in space.blocks:
        t = dg.add(q, d)
        if not dg.leq(t, space.N):
            continue
        pre, suf = _facts(g, d, q)
        pq = g.paths(q)
        rows = space.block_slice(t).start
        cols = space.block_slice(q).start
        for i in range(len(pre)):
            w = f.coeffs[pre[i]]
            if w != 0:
                M[rows + i, cols + suf[i]] = complex(c(pd[pre[i]], pq[suf[i]])) * w
    return FockOp(space, d, M, require_block=False)


def creation_y(space: FockSpace, c: Cocycle, h: CylElem) -> FockOp:
    """Left twisted multiplication by h on the cylinder blocks."""
    if space.system != "Y":
        raise ValueError("creation_y needs the cylinder model")
    g = space.graph
    d = h.module_degree
    if not dg.leq(d, space.N):
        raise DegreeExceedsTruncation(f"degree {d} exceeds {space.N}", d)
    if not dg.leq(h.depth, space.block_depth(d)):
        raise DepthOverflow(
            f"depth {h.depth} cannot act within working depth {space.D}", (h.depth, space.D)
        )
    M = np.zeros((space.dim, space.dim), dtype=np.complex128)
    pd = g.paths(d)
    for q in space.blocks:
        t = dg.add(q, d)
        if not dg.leq(t, space.N):
            continue
        Dq = space.block_depth(q)
        Dt = space.block_depth(t)
        pre_d, suf_d = _facts(g, d, Dq)
        pre_h, _ = _facts(g, h.depth, dg.sub(Dt, h.depth))
        tail_pre, _ = _facts(g, q, dg.sub(Dq, q))
        pq = g.paths(q)
        rows = space.block_slice(t).start
        cols = space.block_slice(q).start
        for i in range(len(pre_d)):
            w = h.coeffs[pre_h[i]]
            if w != 0:
                tw = complex(c(pd[pre_d[i]], pq[tail_pre[suf_d[i]]]))
                M[rows + i, cols + suf_d[i]] = tw * w
    return FockOp(space, d, M, require_block=False)


def _creation(space: FockSpace, c: Cocycle, x) -> FockOp:
    if space.system == "X":
        return creation_x(space, c, x)
    return creation_y(space, c, x)


def _delta_creations(space: FockSpace, c: Cocycle, n) -> list[FockOp]:
    g = space.graph
    if space.system == "X":
        return [creation_x(space, c, XElem.delta(g, la)) for la in g.paths(n)]
    return [creation_y(space, c, alpha(n, n, XElem.delta(g, la))) for la in g.paths(n)]


def fock_compacts_x(space: FockSpace, c: Cocycle, S: XOp) -> FockOp:
    """The degree-shift-zero image of a compact on X_m: sum of C(f) C(g)*."""
    ops = _delta_creations(space, c, S.degree)
    out = FockOp.zeros(space)
    for (i, j), w in np.ndenumerate(S.matrix):
        if w != 0:
            out = out + w * (ops[i] @ ops[j].adjoint())
    return out


def fock_compacts_y(space: FockSpace, c: Cocycle, S) -> FockOp:
    """The image of an adjointable operator on Y_n: extend to every block above n."""
    if space.system != "Y":
        raise ValueError("fock_compacts_y needs the cylinder model")
    n = S.module_degree
    M = np.zeros((space.dim, space.dim), dtype=np.complex128)
    for q in space.blocks:
        if not dg.leq(n, q):
            continue
        block = y_iota(c, S, q).lift(space.block_depth(q)).matrix
        sl = space.block_slice(q)
        M[sl, sl] = block
    return FockOp(space, (0,) * space.graph.k, M, require_block=False)


# -- relation suites ---------------------------------------------------------


def _block_elems(space: FockSpace, n):
    """Canonical point-mass module elements of degree n for relation checks."""
    g = space.graph
    if space.system == "X":
        return [XElem.delta(g, la) for la in g.paths(n)]
    depth = space.block_depth(n)
    return [CylElem.delta(g, la, n) for la in g.paths(depth)]


def _mul(space: FockSpace, c: Cocycle, x, y):
    if space.system == "X":
        return x_tmul(c, x, y)
    return y_tmul(c, x, y)


def _right(space: FockSpace, c: Cocycle, x, a: VertexFn):
    if space.system == "X":
        return x_act(a, x, "right")
    return y_tmul(c, x, CylElem.from_vertex_fn(a))


def _inner0(space: FockSpace, x, y):
    """The inner product as a degree-0 module element of the right kind."""
    if space.system == "X":
        ip = x_inner(x, y)
        return XElem(space.graph, dg.zero(space.graph.k), ip.values)
    return y_inner(x, y)


def rep_axioms_check(space: FockSpace, c: Cocycle, tol: float = 1e-9, pair_cap: int = 64) -> ModuleReport:
    """Representation axioms on interior vectors: linearity, the right module
    action, adjoint inner products, and multiplicativity across degrees."""
    g = space.graph
    rep = ModuleReport(True)
    elems = {n: _block_elems(space, n) for n in space.blocks}
    cre = {n: [_creation(space, c, x) for x in elems[n]] for n in space.blocks}
    zero = dg.zero(g.k)

    for n in space.blocks:
        if len(elems[n]) >= 2:
            combo = elems[n][0] + 2.0j * elems[n][1]
            want = cre[n][0] + 2.0j * cre[n][1]
            rep.cases_checked += 1
            if not _creation(space, c, combo).close(want, tol):
                rep.ok = False
                rep.first_failure = ("linearity", n, None)
                return rep

    for n in space.blocks:
        for i, x in enumerate(elems[n][:pair_cap]):
            for v in range(len(g.vertices)):
                a = VertexFn(g, np.eye(len(g.vertices))[v])
                xa = _right(space, c, x, a)
                a0 = XElem(g, zero, a.values) if space.system == "X" else CylElem.from_vertex_fn(a)
                rep.cases_checked += 1
                if not _creation(space, c, xa).close(cre[n][i] @ _creation(space, c, a0), tol):
                    rep.ok = False
                    rep.first_failure = ("right-action", (n, i, g.vertices[v]), None)
                    return rep

    for n in space.blocks:
        pairs = 0
        for i in range(len(elems[n])):
            for j in range(len(elems[n])):
                if pairs >= pair_cap:
                    break
                pairs += 1
                lhs = cre[n][i].adjoint() @ cre[n][j]
                rhs = _creation(space, c, _inner0(space, elems[n][i], elems[n][j]))
                rep.cases_checked += 1
                if not lhs.close_on_interior(rhs, n, tol):
                    rep.ok = False
                    rep.first_failure = ("inner-product", (n, i, j), None)
                    return rep

    for m in space.blocks:
        for n in space.blocks:
            if not dg.leq(dg.add(m, n), space.N):
                continue
            pairs = 0
            for i, x in enumerate(elems[m]):
                for j, y in enumerate(elems[n]):
                    if pairs >= pair_cap:
                        break
                    pairs += 1
                    rep.cases_checked += 1
                    got = cre[m][i] @ cre[n][j]
                    want = _creation(space, c, _mul(space, c, x, y))
                    if not got.close(want, tol):
                        rep.ok = False
                        rep.first_failure = ("multiplicativity", (m, n, i, j), None)
                        return rep
    return rep


def nica_check(space: FockSpace, c: Cocycle, S: XOp, T: XOp, tol: float = 1e-9) -> ModuleReport:
    """psi-hat(S) psi-hat(T) against psi-hat of the aligned compact product."""
    if space.system != "X":
        raise ValueError("nica_check runs on the finite-path model")
    m, n = S.degree, T.degree
    for d in (m, n):
        if not dg.leq(d, space.N):
            raise DegreeExceedsTruncation(f"degree {d} exceeds {space.N}", d)
    lhs = fock_compacts_x(space, c, S) @ fock_compacts_x(space, c, T)
    rhs = fock_compacts_x(space, c, x_compact_align(c, S, T))
    rep = ModuleReport(True, cases_checked=1)
    if not lhs.close_on_interior(rhs, dg.join(m, n), tol):
        rep.ok = False
        rep.first_failure = ("nica", (m, n), None)
    return rep


def cp_identity_check(space: FockSpace, c: Cocycle, a: VertexFn, n, tol: float = 1e-9) -> ModuleReport:
    """The covariance defect of the finite-path compacts equals the defect of
    the cylinder compacts, on interior(n)."""
    if space.system != "Y":
        raise ValueError("cp_identity_check runs on the cylinder model")
    n = dg.as_degree(n, space.graph.k)
    psi0 = creation_y(space, c, CylElem.from_vertex_fn(a))
    lhs = FockOp.zeros(space)
    for gi in phi_x_decompose(c, a, n):
        ci = creation_y(space, c, alpha(n, n, gi))
        cj = creation_y(space, c, alpha(n, n, gi.conj()))
        lhs = lhs + ci @ cj.adjoint()
    lhs = lhs - psi0
    rhs = fock_compacts_y(space, c, phi_y(CylElem.from_vertex_fn(a), n)) - psi0
    rep = ModuleReport(True, cases_checked=1)
    if not lhs.close_on_interior(rhs, n, tol):
        rep.ok = False
        rep.first_failure = ("cp-identity", n, None)
    return rep


def ck_relations_check(space: FockSpace, c: Cocycle, n, tol: float = 1e-9) -> ModuleReport:
    """The generator relations of the twisted algebra in the truncated model.

    (i) composition with the cocycle phase, (ii) the isometry relation,
    (iii) the exhaustion sum at degree n, asserted on the blocks whose degree
    dominates n; the uncompressed defect is the projection onto the
    complementary low-degree corner, and is reported, not ignored.
    """
    if space.system != "X":
        raise ValueError("ck_relations_check runs on the finite-path model")
    g = space.graph
    n = dg.as_degree(n, g.k)
    if not dg.leq(n, space.N):
        raise DegreeExceedsTruncation(f"degree {n} exceeds {space.N}", n)
    rep = ModuleReport(True)
    svtx = {
        v: creation_x(space, c, XElem(g, dg.zero(g.k), np.eye(len(g.vertices))[i]))
        for i, v in enumerate(g.vertices)
    }
    sgen = {}
    for m in dg.degrees_upto(n):
        for la in g.paths(m):
            sgen[la] = creation_x(space, c, XElem.delta(g, la))

    for i, v in enumerate(g.vertices):
        for w in g.vertices:
            rep.cases_checked += 1
            want = svtx[v] if v == w else FockOp.zeros(space)
            if not (svtx[v] @ svtx[w]).close(want, tol):
                rep.ok = False
                rep.first_failure = ("vertex", (v, w), None)
                return rep

    for m in dg.degrees_upto(n):
        if not any(m):
            continue
        for la in g.paths(m):
            for p, _ in dg.splits(m, 2):
                mu, nu = g.split(la, p)
                rep.cases_checked += 1
                got = sgen[mu] @ sgen[nu]
                want = complex(c(mu, nu)) * sgen[la]
                if not np.allclose(got.on_interior(m), want.on_interior(m), atol=tol, rtol=0.0):
                    rep.ok = False
                    rep.first_failure = ("compose", (mu, nu), None)
                    return rep
            rep.cases_checked += 1
            if not (sgen[la].adjoint() @ sgen[la]).close_on_interior(svtx[la.source], m, tol):
                rep.ok = False
                rep.first_failure = ("isometry", la, None)
                return rep

    low = ~np.all(space._deg >= np.asarray(n), axis=1)  # blocks not dominating n
    up = np.ix_(~low, ~low)
    for v in g.vertices:
        total = FockOp.zeros(space)
        for i in g.by_range(n)[v]:
            la = g.paths(n)[i]
            total = total + sgen[la] @ sgen[la].adjoint()
        rep.cases_checked += 1
        if not np.allclose(total.matrix[up], svtx[v].matrix[up], atol=tol, rtol=0.0):
            rep.ok = False
            rep.first_failure = ("ck-sum", v, None)
            return rep
        defect = svtx[v].matrix - total.matrix
        want = svtx[v].matrix * np.outer(low, low)
        rep.cases_checked += 1
        if not np.allclose(defect, want, atol=tol, rtol=0.0):
            rep.ok = False
            rep.first_failure = ("defect-shape", v, None)
            return rep
        got_rank = int(np.linalg.matrix_rank(defect)) if defect.size else 0
        want_rank = int(np.sum(np.abs(np.diag(svtx[v].matrix)) * low > 0.5))
        if got_rank != want_rank:
            rep.ok = False
            rep.first_failure = ("defect-rank", v, (got_rank, want_rank))
            return rep
    return rep


def psi_check(space: FockSpace, c: Cocycle, cap=None, tol: float = 1e-9, pair_cap: int = 32) -> ModuleReport:
    """The canonical maps X_n -> L(F_Y) form a representation whose compacts
    factor through the cylinder compacts, and are injective blockwise."""
    if space.system != "Y":
        raise ValueError("psi_check runs on the cylinder model")
    g = space.graph
    cap = space.N if cap is None else dg.as_degree(cap, g.k)
    if not dg.leq(cap, space.N):
        raise DegreeExceedsTruncation(f"cap {cap} exceeds {space.N}", cap)
    rep = ModuleReport(True)
    degrees = dg.degrees_upto(cap)
    psi = {m: _delta_creations(space, c, m) for m in degrees}

    for m in degrees:
        for n in degrees:
            if not dg.leq(dg.add(m, n), cap):
                continue
            pairs = 0
            for i, la in enumerate(g.paths(m)):
                for j, mu in enumerate(g.paths(n)):
                    if pairs >= pair_cap:
                        break
                    pairs += 1
                    rep.cases_checked += 1
                    prod = x_tmul(c, XElem.delta(g, la), XElem.delta(g, mu))
                    want = creation_y(space, c, alpha(dg.add(m, n), dg.add(m, n), prod))
                    if not (psi[m][i] @ psi[n][j]).close(want, tol):
                        rep.ok = False
                        rep.first_failure = ("psi-multiplicative", (la, mu), None)
                        return rep

    for m in degrees:
        pairs = 0
        for i, la in enumerate(g.paths(m)):
            for j, mu in enumerate(g.paths(m)):
                if pairs >= pair_cap:
                    break
                pairs += 1
                rep.cases_checked += 1
                S = x_theta(XElem.delta(g, la), XElem.delta(g, mu))
                lhs = psi[m][i] @ psi[m][j].adjoint()
                rhs = fock_compacts_y(space, c, alpha_k(S))
                if not lhs.close_on_interior(rhs, m, tol):
                    rep.ok = False
                    rep.first_failure = ("psi-compacts", (la, mu), None)
                    return rep

    for m in degrees:
        stack = np.stack([op.matrix.ravel() for op in psi[m]])
        rep.cases_checked += 1
        if int(np.linalg.matrix_rank(stack)) != len(psi[m]):
            rep.ok = False
            rep.first_failure = ("psi-injective", m, None)
            return rep

    done = 0
    for m in degrees:
        for n in degrees:
            if done >= pair_cap:
                break
            if not (any(m) and any(n)):
                continue
            done += 1
            la1, la2 = g.paths(m)[0], g.paths(m)[-1]
            mu1, mu2 = g.paths(n)[0], g.paths(n)[-1]
            S = x_theta(XElem.delta(g, la1), XElem.delta(g, la2))
            T = x_theta(XElem.delta(g, mu1), XElem.delta(g, mu2))
            i1 = g.path_index(m)[la1]
            i2 = g.path_index(m)[la2]
            j1 = g.path_index(n)[mu1]
            j2 = g.path_index(n)[mu2]
            lhs = (psi[m][i1] @ psi[m][i2].adjoint()) @ (psi[n][j1] @ psi[n][j2].adjoint())
            aligned = x_compact_align(c, S, T)
            rhs = FockOp.zeros(space)
            ops = _delta_creations(space, c, aligned.degree)
            for (r, s), w in np.ndenumerate(aligned.matrix):
                if w != 0:
                    rhs = rhs + w * (ops[r] @ ops[s].adjoint())
            rep.cases_checked += 1
            if not lhs.close_on_interior(rhs, dg.join(m, n), tol):
                rep.ok = False
                rep.first_failure = ("psi-nica", (m, n), None)
                return rep
    return rep


def zeta_surjectivity_check(space: FockSpace, c: Cocycle, n, tol: float = 1e-9) -> ModuleReport:
    """Rebuild every degree-n basis cylinder from point-mass section data.

    For each depth-(D-N+n) path la, split the point mass at la into prefix
    sections, a tail function, and tail sections; assemble the creation
    products minus the covariance defect; and compare with direct creation by
    the cylinder, both as operators on interior(n) and on a seed vector.
    """
    if space.system != "Y":
        raise ValueError("zeta_surjectivity_check runs on the cylinder model")
    g = space.graph
    n = dg.as_degree(n, g.k)
    if not dg.leq(n, space.N):
        raise DegreeExceedsTruncation(f"degree {n} exceeds {space.N}", n)
    rep = ModuleReport(True)
    depth = space.block_depth(n)
    p = dg.sub(depth, n)
    for la in g.paths(depth):
        dec = alpha_decompose(c, XElem.delta(g, la), n, tol)
        tail = alpha(dg.zero(g.k), p, dec.f_tilde)

        inner_sum = FockOp.zeros(space)
        cf = creation_y(space, c, alpha(p, p, dec.f_tilde))
        for eta in dec.eta:
            inner_sum = inner_sum + cf @ creation_y(space, c, alpha(p, p, eta)).adjoint()

        defect = FockOp.zeros(space)
        for gi in phi_y_decompose(c, tail, p, tol):
            ci = creation_y(space, c, alpha(p, p, gi))
            cj = creation_y(space, c, alpha(p, p, gi.conj()))
            defect = defect + ci @ cj.adjoint()
        defect = defect - creation_y(space, c, tail)

        assembled = FockOp.zeros(space, n)
        for xi in dec.xi:
            cxi = creation_y(space, c, alpha(n, n, xi))
            assembled = assembled + cxi @ (inner_sum - defect)

        target = creation_y(space, c, CylElem.delta(g, la, n))
        rep.cases_checked += 1
        if not assembled.close_on_interior(target, n, tol):
            rep.ok = False
            rep.first_failure = ("operator", la, None)
            return rep

        tail_path = g.split(la, n)[1]
        seed = space.embed(dg.zero(g.k), np.eye(len(g.paths(p)))[g.path_index(p)[tail_path]])
        got = assembled(seed)
        want = space.embed(n, np.eye(len(g.paths(depth)))[g.path_index(depth)[la]])
        rep.cases_checked += 1
        if not np.allclose(got, want, atol=tol, rtol=0.0):
            rep.ok = False
            rep.first_failure = ("vector", la, None)
            return rep
    return rep
