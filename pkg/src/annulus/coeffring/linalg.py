"""Sparse exact linear algebra over finite fields, graded by internal degree.

Vectors are ``dict[int, element]`` with zero entries omitted.  A matrix acts on
column vectors and is stored as a list of sparse rows.  Every echelon form
produced here is the reduced row echelon form of the relevant row space, so
returned bases depend only on the subspace, never on elimination order.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .field import FiniteFieldCtx
from .witt import WittRingCtx


class ShapeError(ValueError):
    pass


class ComplexError(ArithmeticError):
    """d o d != 0 somewhere in a cochain complex."""

    def __init__(self, s: int, degree: int):
        super().__init__(f"d^{s + 1} o d^{s} != 0 in internal degree {degree}")
        self.s = s
        self.degree = degree


@dataclass
class SparseMatrix:
    nrows: int
    ncols: int
    rows: list = field(default_factory=list)

    def __post_init__(self):
        if not self.rows:
            self.rows = [dict() for _ in range(self.nrows)]
        if len(self.rows) != self.nrows:
            raise ShapeError(f"expected {self.nrows} rows, got {len(self.rows)}")
        for r in self.rows:
            for c in r:
                if not 0 <= c < self.ncols:
                    raise ShapeError(f"column index {c} out of range for {self.ncols} columns")

    @classmethod
    def from_dense(cls, dense, ncols: int | None = None) -> "SparseMatrix":
        dense = [list(r) for r in dense]
        n = ncols if ncols is not None else (len(dense[0]) if dense else 0)
        rows = [{j: v for j, v in enumerate(r) if v} for r in dense]
        return cls(len(dense), n, rows)

    @classmethod
    def from_triplets(cls, nrows: int, ncols: int, triplets: Iterable) -> "SparseMatrix":
        m = cls(nrows, ncols)
        for i, j, v in triplets:
            if v:
                m.rows[i][j] = v
        return m

    def triplets(self) -> list:
        return [[i, j, v] for i, r in enumerate(self.rows) for j, v in sorted(r.items())]

    def to_dense(self, zero=0) -> list:
        return [[r.get(j, zero) for j in range(self.ncols)] for r in self.rows]

    def transpose(self) -> "SparseMatrix":
        out = SparseMatrix(self.ncols, self.nrows)
        for i, r in enumerate(self.rows):
            for j, v in r.items():
                out.rows[j][i] = v
        return out

    def apply(self, ctx, vec: dict) -> dict:
        out = {}
        for i, r in enumerate(self.rows):
            acc = 0
            for j, v in r.items():
                x = vec.get(j)
                if x:
                    acc = ctx.add(acc, ctx.mul(v, x))
            if acc:
                out[i] = acc
        return out

    def compose(self, ctx, other: "SparseMatrix") -> "SparseMatrix":
        """self @ other."""
        if self.ncols != other.nrows:
            raise ShapeError(f"cannot compose {self.nrows}x{self.ncols} with {other.nrows}x{other.ncols}")
        out = SparseMatrix(self.nrows, other.ncols)
        for i, r in enumerate(self.rows):
            acc = {}
            for k, a in r.items():
                for j, b in other.rows[k].items():
                    acc[j] = ctx.add(acc.get(j, 0), ctx.mul(a, b))
            out.rows[i] = {j: v for j, v in acc.items() if v}
        return out

    def is_zero(self) -> bool:
        return not any(self.rows)


@dataclass
class GradedMatrix:
    """Degree-preserving map between degreewise finite graded vector spaces."""

    ctx: FiniteFieldCtx
    source_dims: dict
    target_dims: dict
    blocks: dict

    def __post_init__(self):
        for n, m in self.blocks.items():
            if m.ncols != self.source_dims.get(n, 0) or m.nrows != self.target_dims.get(n, 0):
                raise ShapeError(
                    f"degree {n}: block is {m.nrows}x{m.ncols}, declared "
                    f"{self.target_dims.get(n, 0)}x{self.source_dims.get(n, 0)}"
                )

    def block(self, n: int) -> SparseMatrix:
        if n in self.blocks:
            return self.blocks[n]
        return SparseMatrix(self.target_dims.get(n, 0), self.source_dims.get(n, 0))

    def degrees(self) -> list:
        return sorted(set(self.source_dims) | set(self.target_dims))


# --- elimination kernel ---------------------------------------------------


def _axpy(ctx, y: dict, a, x: dict) -> None:
    """y += a*x in place (sparse)."""
    if ctx.d == 1:
        p = ctx.p
        for j, v in x.items():
            w = (y.get(j, 0) + a * v) % p
            if w:
                y[j] = w
            else:
                y.pop(j, None)
        return
    for j, v in x.items():
        w = ctx.add(y.get(j, 0), ctx.mul(a, v))
        if w:
            y[j] = w
        else:
            y.pop(j, None)


def _scaled(ctx, x: dict, a) -> dict:
    if ctx.d == 1:
        p = ctx.p
        return {j: (a * v) % p for j, v in x.items()}
    return {j: ctx.mul(a, v) for j, v in x.items()}


class Echelon:
    """Incrementally maintained reduced echelon basis of a subspace."""

    def __init__(self, ctx):
        self.ctx = ctx
        self.pivots: dict = {}  # pivot column -> row with leading 1 there

    def __len__(self) -> int:
        return len(self.pivots)

    def reduce(self, vec: dict) -> dict:
        """Normal form of ``vec`` modulo the subspace (pivot coordinates cleared)."""
        v = dict(vec)
        ctx = self.ctx
        for c in sorted(set(v) & set(self.pivots)):
            a = v.get(c)
            if a:
                _axpy(ctx, v, ctx.neg(a), self.pivots[c])
        # clearing one pivot may reintroduce none: pivot rows are fully reduced
        return v

    def add(self, vec: dict) -> dict | None:
        """Insert ``vec``; return its reduced form if it was independent, else None."""
        v = self.reduce(vec)
        if not v:
            return None
        ctx = self.ctx
        c = min(v)
        v = _scaled(ctx, v, ctx.inv(v[c]))
        for other in self.pivots.values():
            a = other.get(c)
            if a:
                _axpy(ctx, other, ctx.neg(a), v)
        self.pivots[c] = v
        return v

    def contains(self, vec: dict) -> bool:
        return not self.reduce(vec)

    def basis(self) -> list:
        return [dict(self.pivots[c]) for c in sorted(self.pivots)]

    def coordinates(self, vec: dict) -> list:
        """Coordinates of ``vec`` in :meth:`basis` order; raises if not in span."""
        cols = sorted(self.pivots)
        coords = [vec.get(c, 0) for c in cols]
        if self.reduce(vec):
            raise ValueError("vector does not lie in the subspace")
        return coords


def rref(ctx, rows: Iterable[dict]) -> Echelon:
    e = Echelon(ctx)
    for r in rows:
        e.add(r)
    return e


@dataclass
class KernelCokernel:
    rank: int
    kernel: list
    cokernel: list


def kernel_basis(ctx, m: SparseMatrix) -> list:
    e = rref(ctx, m.rows)
    pivot_cols = sorted(e.pivots)
    free = [j for j in range(m.ncols) if j not in e.pivots]
    vecs = []
    for f in free:
        v = {f: 1}
        for c in pivot_cols:
            a = e.pivots[c].get(f)
            if a:
                v[c] = ctx.neg(a)
        vecs.append(v)
    return rref(ctx, vecs).basis()


def image_echelon(ctx, m: SparseMatrix) -> Echelon:
    return rref(ctx, m.transpose().rows)


def rank_kernel_cokernel_block(ctx, m: SparseMatrix) -> KernelCokernel:
    img = image_echelon(ctx, m)
    kernel = kernel_basis(ctx, m)
    cokernel = [{i: 1} for i in range(m.nrows) if i not in img.pivots]
    if len(img) + len(kernel) != m.ncols:  # pragma: no cover - rank-nullity
        raise ArithmeticError("rank-nullity violated")
    return KernelCokernel(len(img), kernel, cokernel)


def rank_kernel_cokernel(m: GradedMatrix) -> dict:
    """Per-degree rank, echelonized kernel basis and cokernel basis.

    Over a truncated Witt ring the answer comes from :func:`smith_witt`; the
    kernel and cokernel entries are then generators rather than bases.
    """
    if isinstance(m.ctx, WittRingCtx):
        return {n: smith_witt(m.ctx, m.block(n)) for n in m.degrees()}
    return {n: rank_kernel_cokernel_block(m.ctx, m.block(n)) for n in m.degrees()}


@dataclass
class SmithResult(KernelCokernel):
    """Smith form over Z/p^N-type rings.

    ``valuations`` are the p-adic valuations of the diagonal entries (N for
    zero); ``cokernel`` holds (generator, order exponent) pairs.
    """

    valuations: list = field(default_factory=list)


def smith_witt(ctx: WittRingCtx, m: SparseMatrix) -> SmithResult:
    """Diagonalize over W_N by row and column operations with minimal-valuation pivots.

    Pivot choice: least valuation, ties broken by (row, column) order.
    """
    nr, nc = m.nrows, m.ncols
    zero = ctx.zero
    A = [[m.rows[i].get(j, zero) for j in range(nc)] for i in range(nr)]
    T = [[ctx.one if i == j else zero for j in range(nc)] for i in range(nc)]
    S_inv = [[ctx.one if i == j else zero for j in range(nr)] for i in range(nr)]
    vals = []
    for k in range(min(nr, nc)):
        best = None
        for i in range(k, nr):
            for j in range(k, nc):
                v = ctx.valuation(A[i][j])
                if v < ctx.N and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, bi, bj = best
        A[k], A[bi] = A[bi], A[k]
        for row in S_inv:
            row[k], row[bi] = row[bi], row[k]
        for row in A:
            row[k], row[bj] = row[bj], row[k]
        for row in T:
            row[k], row[bj] = row[bj], row[k]
        piv = A[k][k]
        unit_inv = ctx.inv(ctx.divide_by_p_power(piv, v))
        for i in range(k + 1, nr):
            if ctx.is_zero(A[i][k]):
                continue
            c = ctx.mul(ctx.divide_by_p_power(A[i][k], v), unit_inv)
            A[i] = [ctx.sub(a, ctx.mul(c, b)) for a, b in zip(A[i], A[k])]
            for row in S_inv:
                row[k] = ctx.add(row[k], ctx.mul(c, row[i]))
        for j in range(k + 1, nc):
            if ctx.is_zero(A[k][j]):
                continue
            c = ctx.mul(ctx.divide_by_p_power(A[k][j], v), unit_inv)
            for row in A:
                row[j] = ctx.sub(row[j], ctx.mul(c, row[k]))
            for row in T:
                row[j] = ctx.sub(row[j], ctx.mul(c, row[k]))
        vals.append(v)
    r = len(vals)
    kernel = []
    for i in range(nc):
        scale = ctx.p ** (ctx.N - vals[i]) if i < r else 1
        if i < r and vals[i] == 0:
            continue
        vec = {row: ctx.scale(T[row][i], scale) for row in range(nc)}
        vec = {k: x for k, x in vec.items() if not ctx.is_zero(x)}
        if vec:
            kernel.append(vec)
    cokernel = []
    for i in range(nr):
        order = vals[i] if i < r else ctx.N
        if order == 0:
            continue
        vec = {row: S_inv[row][i] for row in range(nr) if not ctx.is_zero(S_inv[row][i])}
        cokernel.append((vec, order))
    return SmithResult(r, kernel, cokernel, vals + [ctx.N] * (min(nr, nc) - r))


def rank(ctx, m: SparseMatrix) -> int:
    return len(rref(ctx, m.rows))


# --- cochain complexes ----------------------------------------------------


@dataclass
class HomologyGroup:
    dim: int
    representatives: list


class SpanCoordinates:
    """Coordinates with respect to chosen generators, modulo an optional subspace.

    Each generator g_i is inserted as g_i + e_(ambient + i); reducing a vector of
    span(sub, generators) then leaves minus its coordinates in the tag columns.
    A generator that depends on the others modulo ``sub`` would get its pivot in
    a tag column, which is rejected.
    """

    def __init__(self, ctx, generators: list, ambient: int, sub: Iterable[dict] = ()):
        self.ctx, self.ambient, self.size = ctx, ambient, len(generators)
        self.ech = Echelon(ctx)
        for b in sub:
            self.ech.add(b)
        for i, g in enumerate(generators):
            if any(c >= ambient for c in g):
                raise ShapeError("generator has a coordinate beyond the ambient dimension")
            v = dict(g)
            v[ambient + i] = ctx.one
            added = self.ech.add(v)
            if min(added) >= ambient:
                raise ValueError(f"generator {i} depends on the others")

    def coordinates(self, vec: dict) -> list:
        rest = self.ech.reduce(vec)
        if any(c < self.ambient for c in rest):
            raise ValueError("vector does not lie in the span")
        return [self.ctx.neg(rest.get(self.ambient + i, 0)) for i in range(self.size)]


def quotient_representatives(ctx, sub: Echelon, vectors: Iterable[dict]) -> list:
    """Canonical basis of span(vectors) / span(sub), as reduced normal forms."""
    forms = []
    for v in vectors:
        nf = sub.reduce(v)
        if nf:
            forms.append(nf)
    return rref(ctx, forms).basis()


@dataclass
class CochainComplex:
    """C^0 -> C^1 -> ... with degree-preserving differentials.

    ``dims[s][n]`` is dim C^s in internal degree n; ``diffs[s]`` is d^s.
    """

    ctx: FiniteFieldCtx
    dims: dict
    diffs: dict

    def differential(self, s: int) -> GradedMatrix:
        if s in self.diffs:
            return self.diffs[s]
        return GradedMatrix(self.ctx, self.dims.get(s, {}), self.dims.get(s + 1, {}), {})

    def check(self) -> None:
        for s in sorted(self.diffs):
            if s + 1 not in self.diffs:
                continue
            d0, d1 = self.diffs[s], self.diffs[s + 1]
            for n in d0.degrees():
                a, b = d0.block(n), d1.block(n)
                if a.ncols and b.nrows and not b.compose(self.ctx, a).is_zero():
                    raise ComplexError(s, n)

    def homology(self, s: int, degrees: Iterable[int] | None = None) -> dict:
        out = {}
        degs = degrees if degrees is not None else sorted(self.dims.get(s, {}))
        for n in degs:
            out[n] = self.homology_at(s, n)
        return out

    def homology_at(self, s: int, n: int) -> HomologyGroup:
        dim = self.dims.get(s, {}).get(n, 0)
        if dim == 0:
            return HomologyGroup(0, [])
        outgoing = self.differential(s).block(n)
        cycles = kernel_basis(self.ctx, outgoing)
        if s > 0:
            boundaries = image_echelon(self.ctx, self.differential(s - 1).block(n))
        else:
            boundaries = Echelon(self.ctx)
        reps = quotient_representatives(self.ctx, boundaries, cycles)
        return HomologyGroup(len(reps), reps)


def complex_homology(terms: list, s: int, dims: dict | None = None, check: bool = True) -> dict:
    """Homology H^s of the complex whose differentials d^0, d^1, ... are ``terms``.

    ``dims`` may be given to declare terms beyond the last differential; by
    default the dimensions are read off the differentials.
    """
    if not terms:
        raise ValueError("need at least one differential")
    ctx = terms[0].ctx
    if dims is None:
        dims = {}
        for k, t in enumerate(terms):
            dims.setdefault(k, dict(t.source_dims))
            dims[k + 1] = dict(t.target_dims)
    cx = CochainComplex(ctx, dims, dict(enumerate(terms)))
    if check:
        cx.check()
    return cx.homology(s)
