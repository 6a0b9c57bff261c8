"""Dieudonne modules of the Honda formal group and their exterior powers.

A module is free over W_N(F_{p^d}) with a sigma-semilinear F and a
sigma^-1-semilinear V.  Matrices hold the images of basis vectors as
columns, so F(sum a_i e_i) = F_mat . sigma(a) and composites are
FV = F_mat . sigma(V_mat), VF = V_mat . sigma^-1(F_mat).

Exterior powers use F_L = wedge^q F and V_L = p^(1-q) wedge^q V; the
division by p^(q-1) costs q - 1 digits, so the input must carry precision at
least j + q - 1 and the result is reduced to precision max(j, 1).
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from math import comb

from .coalgebra import GradedCoalgebra, curve_coalgebra
from .coeffring import WittRingCtx, build_witt, rref
from .stabilizer import EndoElement, left_mult_matrix, matrix_determinant


class DieudonneError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DieudonneModule:
    ctx: WittRingCtx
    rank: int
    F: tuple  # rank x rank, rows of Witt elements
    V: tuple
    torsion: int
    wedge_degree: int = 1

    @property
    def precision(self) -> int:
        return self.ctx.N

    def apply_F(self, m: list) -> list:
        return _apply(self.ctx, self.F, [self.ctx.sigma(a) for a in m])

    def apply_V(self, m: list) -> list:
        return _apply(self.ctx, self.V, [self.ctx.sigma(a, -1) for a in m])

    def FV(self) -> list:
        return _matmul(self.ctx, self.F, _twist(self.ctx, self.V, 1))

    def VF(self) -> list:
        return _matmul(self.ctx, self.V, _twist(self.ctx, self.F, -1))

    def relations_hold(self) -> bool:
        ctx = self.ctx
        p_id = [[ctx.from_int(ctx.p) if i == j else ctx.zero for j in range(self.rank)] for i in range(self.rank)]
        return self.FV() == p_id and self.VF() == p_id

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "F": [[list(a) for a in row] for row in self.F],
            "V": [[list(a) for a in row] for row in self.V],
            "twist": [1, -1],
            "precision": self.precision,
            "torsion": self.torsion,
        }


def _apply(ctx, mat, vec) -> list:
    out = []
    for row in mat:
        acc = ctx.zero
        for a, x in zip(row, vec):
            acc = ctx.add(acc, ctx.mul(a, x))
        out.append(acc)
    return out


def _matmul(ctx, A, B) -> list:
    n, m, r = len(A), len(B), len(B[0]) if B else 0
    out = [[ctx.zero] * r for _ in range(n)]
    for i in range(n):
        for k in range(m):
            a = A[i][k]
            if ctx.is_zero(a):
                continue
            for j in range(r):
                out[i][j] = ctx.add(out[i][j], ctx.mul(a, B[k][j]))
    return out


def _twist(ctx, A, times: int) -> list:
    return [[ctx.sigma(a, times) for a in row] for row in A]


def _freeze(rows) -> tuple:
    return tuple(tuple(r) for r in rows)


def honda_module(p: int, d: int, j: int, N: int | None = None) -> DieudonneModule:
    """Basis e_i = class of S^i; F = left multiplication by S, V by S^(d-1)."""
    if j < 0:
        raise DieudonneError("torsion exponent j must be >= 0")
    if N is None:
        N = max(j, 1) + d - 1
    if N < j:
        raise DieudonneError(f"precision N={N} is below the torsion exponent j={j}")
    ctx = build_witt(p, d, N)
    zero, one, pe = ctx.zero, ctx.one, ctx.from_int(p)
    F = [[zero] * d for _ in range(d)]
    V = [[zero] * d for _ in range(d)]
    for i in range(d):
        if i < d - 1:
            F[i + 1][i] = one
        else:
            F[0][i] = pe
        if i == 0:
            V[d - 1][0] = one
        else:
            V[i - 1][i] = pe
    M = DieudonneModule(ctx, d, _freeze(F), _freeze(V), j)
    if not M.relations_hold():  # pragma: no cover - structural
        raise DieudonneError("FV = VF = p failed on the Honda module")
    return M


def wedge_basis(r: int, q: int) -> list:
    return list(combinations(range(r), q))


def compound(ctx: WittRingCtx, A, q: int) -> list:
    """q-th compound matrix: entry (J, I) is the minor on rows J and columns I."""
    basis = wedge_basis(len(A), q)
    out = []
    for J in basis:
        row = []
        for I in basis:
            minor = [[A[a][b] for b in I] for a in J]
            row.append(matrix_determinant(ctx, minor))
        out.append(row)
    return out


def exterior_power(M: DieudonneModule, q: int) -> DieudonneModule:
    if not 1 <= q <= M.rank:
        raise DieudonneError(f"q must lie in 1..{M.rank}, got {q}")
    if q == 1:
        return M
    ctx = M.ctx
    need = M.torsion + q - 1
    if ctx.N < need:
        raise DieudonneError(f"precision {ctx.N} is below j + q - 1 = {need}")
    FL = compound(ctx, M.F, q)
    VL_raw = compound(ctx, M.V, q)
    shift = q - 1
    for row in VL_raw:
        for a in row:
            if ctx.valuation(a) < shift:
                raise DieudonneError(f"wedge^{q} V is not divisible by p^{shift}")
    target = build_witt(ctx.p, ctx.d, max(M.torsion, 1))
    # a / p^shift is defined mod p^(N - shift) >= p^j, so reduce straight to the target
    VL = [[target.coerce(ctx.divide_by_p_power(a, shift), ctx) for a in row] for row in VL_raw]
    FL = [[target.coerce(a, ctx) for a in row] for row in FL]
    out = DieudonneModule(target, comb(M.rank, q), _freeze(FL), _freeze(VL), M.torsion, M.wedge_degree * q)
    if not out.relations_hold():
        raise DieudonneError("F V = V F = p fails on the exterior power")
    return out


def wedge_vectors(ctx: WittRingCtx, vecs: list) -> list:
    """Coordinates of v_1 ^ ... ^ v_q on the wedge basis (q x q minors)."""
    q, r = len(vecs), len(vecs[0])
    return [matrix_determinant(ctx, [[vecs[c][i] for c in range(q)] for i in I]) for I in wedge_basis(r, q)]


def defining_relation_holds(M: DieudonneModule, q: int) -> bool:
    """F(V m_1 ^ ... ^ V m_(q-1) ^ m_q) = p^(q-1) m_1 ^ ... ^ F m_q on basis vectors, with F = wedge^q F."""
    if not 1 <= q <= M.rank:
        raise DieudonneError(f"q must lie in 1..{M.rank}, got {q}")
    ctx = M.ctx
    FL = compound(ctx, M.F, q)
    scale = ctx.from_int(ctx.p ** (q - 1))
    basis = [[ctx.one if i == j else ctx.zero for i in range(M.rank)] for j in range(M.rank)]
    for head in combinations(range(M.rank), q - 1):
        for last in range(M.rank):
            lhs_vecs = [M.apply_V(basis[i]) for i in head] + [basis[last]]
            lhs = _apply(ctx, FL, [ctx.sigma(a) for a in wedge_vectors(ctx, lhs_vecs)])
            rhs = [ctx.mul(scale, a) for a in wedge_vectors(ctx, [basis[i] for i in head] + [M.apply_F(basis[last])])]
            if lhs != rhs:
                return False
    return True


def lie_dimension(M: DieudonneModule) -> int:
    """dim_k coker(F mod p)."""
    ctx = M.ctx
    k = ctx.residue
    rows = [{j: ctx.reduce_mod_p(a) for j, a in enumerate(row) if ctx.reduce_mod_p(a)} for row in M.F]
    return M.rank - len(rref(k, rows))


def order_and_height(M: DieudonneModule) -> tuple:
    """(height, e) with |M / p^j| = p^e; height is the rank."""
    return M.rank, M.torsion * M.rank


def unit_action_on_top_power(g: EndoElement, j: int):
    """Scalar by which g acts on wedge^d of the right module {1, S, ..., S^(d-1)}, mod p^max(j,1)."""
    ctx = g.ctx
    top = compound(ctx, left_mult_matrix(g), ctx.d)
    target = build_witt(ctx.p, ctx.d, max(j, 1))
    return target.coerce(top[0][0], ctx)


def torsion_curve(M: DieudonneModule) -> GradedCoalgebra:
    """Coordinate coalgebra of the p^j-torsion of a one-dimensional connected module.

    The group has Lie dimension one and height h = rank, so its p^j-torsion
    coordinate ring is k[x]/x^(p^(j h)); the generator sits in internal degree
    ``wedge_degree``.
    """
    if lie_dimension(M) != 1:
        raise DieudonneError("torsion curve needs Lie dimension 1")
    if M.torsion < 1:
        raise DieudonneError("torsion curve needs j >= 1")
    size = M.ctx.p ** (M.torsion * M.rank)
    return curve_coalgebra(M.ctx.residue, size, M.wedge_degree)


def module_from_json(obj: dict, p: int, d: int) -> DieudonneModule:
    ctx = build_witt(p, d, int(obj["precision"]))
    F = _freeze([[tuple(a) for a in row] for row in obj["F"]])
    V = _freeze([[tuple(a) for a in row] for row in obj["V"]])
    return DieudonneModule(ctx, int(obj["rank"]), F, V, int(obj["torsion"]))


__all__ = [
    "DieudonneError",
    "DieudonneModule",
    "compound",
    "defining_relation_holds",
    "exterior_power",
    "honda_module",
    "lie_dimension",
    "module_from_json",
    "order_and_height",
    "torsion_curve",
    "unit_action_on_top_power",
    "wedge_basis",
    "wedge_vectors",
]
