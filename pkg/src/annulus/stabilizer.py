"""The endomorphism ring W<S>/(S^d = p, S a = sigma(a) S) and its determinant.

Elements are written sum_i a_i S^i with the Witt coefficients on the left.
Left multiplication by g is linear for the *right* W-module structure, so its
matrix is taken in the right basis {1, S, ..., S^(d-1)}: g S^j = sum_i S^i c_ij.
Moving a coefficient across S^m uses a S^m = S^m sigma^(-m)(a).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import permutations, product

from .coeffring import WittRingCtx, build_witt, galois_norm


class StabilizerError(ValueError):
    pass


@dataclass(frozen=True)
class EndoElement:
    ctx: WittRingCtx
    coeffs: tuple  # d Witt elements, coefficient of S^i first in slot i

    def __post_init__(self):
        if len(self.coeffs) != self.ctx.d:
            raise StabilizerError(f"expected {self.ctx.d} coefficients, got {len(self.coeffs)}")

    def __mul__(self, other: "EndoElement") -> "EndoElement":
        return multiply(self, other)

    def __add__(self, other: "EndoElement") -> "EndoElement":
        _same(self, other)
        return EndoElement(self.ctx, tuple(self.ctx.add(a, b) for a, b in zip(self.coeffs, other.coeffs)))

    def to_json(self) -> dict:
        c = self.ctx
        return {"coeffs": [list(a) for a in self.coeffs], "p": c.p, "d": c.d, "N": c.N}


def _same(g: EndoElement, h: EndoElement) -> None:
    if g.ctx is not h.ctx:
        raise StabilizerError("elements live over different Witt contexts")


def endo(ctx: WittRingCtx, coeffs) -> EndoElement:
    """Build sum_i a_i S^i; missing trailing coefficients are zero."""
    coeffs = [tuple(a) if isinstance(a, (tuple, list)) else ctx.from_int(a) for a in coeffs]
    if len(coeffs) > ctx.d:
        raise StabilizerError("too many coefficients; reduce S^d to p first")
    coeffs += [ctx.zero] * (ctx.d - len(coeffs))
    return EndoElement(ctx, tuple(coeffs))


def identity(ctx: WittRingCtx) -> EndoElement:
    return endo(ctx, [1])


def frobenius_element(ctx: WittRingCtx) -> EndoElement:
    """S itself (for d = 1 this is p)."""
    if ctx.d == 1:
        return endo(ctx, [ctx.p])
    return endo(ctx, [0, 1])


def scalar(ctx: WittRingCtx, a) -> EndoElement:
    return endo(ctx, [a])


def multiply(g: EndoElement, h: EndoElement) -> EndoElement:
    """(a S^i)(b S^j) = a sigma^i(b) S^(i+j), with S^(d+r) = p S^r."""
    _same(g, h)
    ctx = g.ctx
    d = ctx.d
    out = [ctx.zero] * d
    for i, a in enumerate(g.coeffs):
        if ctx.is_zero(a):
            continue
        for j, b in enumerate(h.coeffs):
            if ctx.is_zero(b):
                continue
            term = ctx.mul(a, ctx.sigma(b, i))
            m = i + j
            if m >= d:
                term = ctx.scale(term, ctx.p)
                m -= d
            out[m] = ctx.add(out[m], term)
    return EndoElement(ctx, tuple(out))


def is_unit(g: EndoElement) -> bool:
    return g.ctx.is_unit(g.coeffs[0])


def left_mult_matrix(g: EndoElement) -> list:
    """d x d matrix [c_ij] with g S^j = sum_i S^i c_ij (coefficients on the right)."""
    ctx = g.ctx
    d = ctx.d
    mat = [[ctx.zero] * d for _ in range(d)]
    for j in range(d):
        for k, a in enumerate(g.coeffs):
            if ctx.is_zero(a):
                continue
            m = k + j
            c = ctx.sigma(a, -m)
            if m >= d:
                c = ctx.scale(c, ctx.p)
                m -= d
            mat[m][j] = ctx.add(mat[m][j], c)
    return mat


def matrix_determinant(ctx: WittRingCtx, mat: list):
    """Determinant over W_N by elimination with least-valuation pivots.

    Row operations row_i -= w row_k with pivot p^v u leave the determinant
    unchanged for any lift w of a_ik / p^v, so the result is exact mod p^N.
    """
    A = [list(r) for r in mat]
    n = len(A)
    sign = 1
    det = ctx.one
    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                v = ctx.valuation(A[i][j])
                if v < ctx.N and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            return ctx.zero
        v, bi, bj = best
        if bi != k:
            A[k], A[bi] = A[bi], A[k]
            sign = -sign
        if bj != k:
            for row in A:
                row[k], row[bj] = row[bj], row[k]
            sign = -sign
        piv = A[k][k]
        u_inv = ctx.inv(ctx.divide_by_p_power(piv, v))
        for i in range(k + 1, n):
            if ctx.is_zero(A[i][k]):
                continue
            w = ctx.mul(ctx.divide_by_p_power(A[i][k], v), u_inv)
            A[i] = [ctx.sub(x, ctx.mul(w, y)) for x, y in zip(A[i], A[k])]
        det = ctx.mul(det, piv)
    return det if sign == 1 else ctx.neg(det)


def determinant(g: EndoElement):
    return matrix_determinant(g.ctx, left_mult_matrix(g))


def _perm_sign(perm) -> int:
    sign, seen = 1, set()
    for start in range(len(perm)):
        if start in seen:
            continue
        length, cur = 0, start
        while cur not in seen:
            seen.add(cur)
            cur = perm[cur]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def beta_star_action(g: EndoElement):
    """Scalar by which g acts on the top alternating component of S^0 b (x) ... (x) S^(d-1) b.

    Each factor S^j b is sent to (g S^j) b, computed with :func:`multiply` and
    rewritten with coefficients on the right; the d-fold tensor of those
    vectors is expanded monomial by monomial and the alternating projection
    keeps the permutations with their signs.
    """
    if not is_unit(g):
        raise StabilizerError("beta_* action is defined for units only")
    ctx = g.ctx
    d = ctx.d
    images = []
    for j in range(d):
        left = multiply(g, endo(ctx, [0] * j + [1])).coeffs
        images.append([ctx.sigma(left[i], -i) for i in range(d)])
    total = ctx.zero
    for idx in product(range(d), repeat=d):
        if len(set(idx)) < d:
            continue  # killed by the alternating projection
        term = ctx.one
        for j, i in enumerate(idx):
            term = ctx.mul(term, images[j][i])
        if _perm_sign(idx) < 0:
            term = ctx.neg(term)
        total = ctx.add(total, term)
    return total


def leibniz_determinant(ctx: WittRingCtx, mat: list):
    """Textbook permutation expansion; used as an independent oracle."""
    n = len(mat)
    total = ctx.zero
    for perm in permutations(range(n)):
        term = ctx.one
        for col, row in enumerate(perm):
            term = ctx.mul(term, mat[row][col])
        total = ctx.add(total, term if _perm_sign(perm) > 0 else ctx.neg(term))
    return total


def random_element(ctx: WittRingCtx, rng: random.Random) -> EndoElement:
    return EndoElement(ctx, tuple(ctx.random_element(rng) for _ in range(ctx.d)))


def random_unit(ctx: WittRingCtx, rng: random.Random) -> EndoElement:
    while True:
        g = random_element(ctx, rng)
        if is_unit(g):
            return g


def determinant_scalar(g: EndoElement) -> int:
    """det(g) as an integer mod p^N (it is sigma-fixed, hence constant)."""
    return g.ctx.scalar_value(determinant(g))


def norm_of_scalar(ctx: WittRingCtx, a) -> int:
    return galois_norm(ctx, a)


def element_from_json(obj: dict) -> EndoElement:
    ctx = build_witt(int(obj["p"]), int(obj["d"]), int(obj["N"]))
    return EndoElement(ctx, tuple(tuple(int(x) % ctx.pN for x in a) for a in obj["coeffs"]))


__all__ = [
    "EndoElement",
    "StabilizerError",
    "beta_star_action",
    "determinant",
    "determinant_scalar",
    "element_from_json",
    "endo",
    "frobenius_element",
    "identity",
    "is_unit",
    "left_mult_matrix",
    "leibniz_determinant",
    "matrix_determinant",
    "multiply",
    "norm_of_scalar",
    "random_element",
    "random_unit",
    "scalar",
]
