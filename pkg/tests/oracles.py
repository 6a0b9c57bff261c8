"""Independent reference computations used by the tests.

Nothing here imports the library's algorithms: dense textbook elimination,
sympy over GF(p), brute-force enumeration, and rational series arithmetic.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import comb

from sympy import GF
from sympy.polys.matrices import DomainMatrix


# --- linear algebra -------------------------------------------------------------


def dense_rank_mod_p(rows: list, p: int) -> int:
    """Textbook Gaussian elimination on a dense integer matrix mod p."""
    m = [[x % p for x in r] for r in rows]
    rank, ncols = 0, len(m[0]) if m else 0
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [(x - f * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
    return rank


def sympy_rank_mod_p(rows: list, p: int) -> int:
    if not rows or not rows[0]:
        return 0
    return DomainMatrix([[GF(p)(x) for x in r] for r in rows], (len(rows), len(rows[0])), GF(p)).rank()


# --- finite fields --------------------------------------------------------------


def poly_mod(a: list, b: list, p: int) -> list:
    a = [x % p for x in a]
    inv = pow(b[-1], p - 2, p)
    while len(a) >= len(b) and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        f = a[-1] * inv % p
        shift = len(a) - len(b)
        for i, y in enumerate(b):
            a[shift + i] = (a[shift + i] - f * y) % p
        a.pop()
    while a and a[-1] == 0:
        a.pop()
    return a


def monic_irreducibles(p: int, d: int) -> list:
    """Monic irreducibles of degree d by trial division, lexicographic on (c_0, ..., c_{d-1})."""
    if d == 1:
        return [(0, 1)]
    out = []
    for low in itertools.product(range(p), repeat=d):
        f = list(low) + [1]
        irreducible = True
        for e in range(1, d // 2 + 1):
            for glow in itertools.product(range(p), repeat=e):
                if not poly_mod(f, list(glow) + [1], p):
                    irreducible = False
                    break
            if not irreducible:
                break
        if irreducible:
            out.append(tuple(f))
    return out


def lex_key(f: tuple) -> tuple:
    """Order by coefficients from the top (below the leading 1) down."""
    return tuple(reversed(f[:-1]))


# --- coalgebra oracles ----------------------------------------------------------


def ideal_power_dims(e: int, T: int) -> dict:
    """dims of m^e in k[x]/x^T, m = (x), from products of monomial generators."""
    degrees = set()
    gens = [[0] * i + [1] for i in range(1, T)]
    span = [[1]]
    for _ in range(e):
        nxt = []
        for a in span:
            for g in gens:
                prod = [0] * (len(a) + len(g) - 1)
                for i, x in enumerate(a):
                    for j, y in enumerate(g):
                        prod[i + j] += x * y
                if len(prod) <= T or not any(prod[T:]):
                    nxt.append(prod[:T])
        span = nxt or [[0]]
    # the ideal is spanned by generator multiples x^k * f, truncated at x^T
    for f in span:
        for k in range(T):
            for i, x in enumerate(f):
                if x and i + k < T:
                    degrees.add(i + k)
    return {n: int(n in degrees) for n in range(T)}


def tor_polynomial(window: int, p: int) -> dict:
    """Tor^{k[x]}_s(k, k) in internal degree n from 0 -> k[x](-1) -x-> k[x] -> k.

    Tensoring with k turns x into the zero map, so the homology is the resolution itself.
    """
    out = {}
    for s in range(window + 1):
        for n in range(window):
            c1 = 1 if (s == 1 and n == 1) else 0
            c0 = 1 if (s == 0 and n == 0) else 0
            # map k (x) k[x](-1) -> k (x) k[x] is multiplication by x then mod x: zero
            out[(s, n)] = c0 + c1 - 0
    return out


def koszul_truncated_h0(p: int, T: int, window: int) -> int:
    """ker(x . : F_p[x]/x^T -> F_p[x]/x^T) in degrees below window, dense."""
    total = 0
    for n in range(window):
        src = 1 if n < T else 0
        tgt = 1 if n + 1 < T else 0
        if not src:
            continue
        mat = [[1 % p]] if tgt else [[0]]
        total += src - dense_rank_mod_p(mat, p)
    return total


# --- formal group oracle --------------------------------------------------------


def honda_log(p: int, d: int, cap: int) -> list:
    q = p**d
    coeffs = [Fraction(0)] * (cap + 1)
    i, e = 0, 1
    while e <= cap:
        coeffs[e] = Fraction(1, p**i)
        i, e = i + 1, e * q
    return coeffs


def series_inverse_compose(f: list, cap: int) -> list:
    """Compositional inverse of f = x + ... by solving term by term."""
    g = [Fraction(0)] * (cap + 1)
    g[1] = Fraction(1)
    for n in range(2, cap + 1):
        comp = _compose(f, g, cap)
        g[n] = -comp[n]
    return g


def _mul(a: list, b: list, cap: int) -> list:
    out = [Fraction(0)] * (cap + 1)
    for i, x in enumerate(a):
        if x:
            for j in range(0, cap + 1 - i):
                if b[j]:
                    out[i + j] += x * b[j]
    return out


def _compose(f: list, g: list, cap: int) -> list:
    out = [Fraction(0)] * (cap + 1)
    power = [Fraction(1)] + [Fraction(0)] * cap
    for k in range(1, cap + 1):
        power = _mul(power, g, cap)
        if f[k]:
            out = [x + f[k] * y for x, y in zip(out, power)]
    return out


def honda_fgl_rational(p: int, d: int, cap: int) -> dict:
    """(i, j) -> Fraction coefficient of exp(log x + log y), through total degree cap."""
    lg = honda_log(p, d, cap)
    ex = series_inverse_compose(lg, cap)
    # bivariate series as dict (i, j) -> Fraction
    arg = {}
    for e, c in enumerate(lg):
        if c:
            arg[(e, 0)] = arg.get((e, 0), 0) + c
            arg[(0, e)] = arg.get((0, e), 0) + c
    result = {}
    power = {(0, 0): Fraction(1)}
    for k in range(1, cap + 1):
        nxt = {}
        for (a, b), x in power.items():
            for (c, e), y in arg.items():
                if a + b + c + e <= cap:
                    nxt[(a + c, b + e)] = nxt.get((a + c, b + e), 0) + x * y
        power = nxt
        if ex[k]:
            for key, v in power.items():
                result[key] = result.get(key, 0) + ex[k] * v
    return {key: v for key, v in result.items() if v}


def reduce_fraction(x: Fraction, m: int) -> int:
    if x.denominator % m == 0 or any(x.denominator % q == 0 for q in _prime_factors(m)):
        raise ValueError(f"{x} is not integral at the primes of {m}")
    return x.numerator * pow(x.denominator, -1, m) % m


def _prime_factors(m: int) -> list:
    out, q = [], 2
    while q * q <= m:
        if m % q == 0:
            out.append(q)
            while m % q == 0:
                m //= q
        q += 1
    if m > 1:
        out.append(m)
    return out


# --- Dieudonne and stabilizer oracles ----------------------------------------------


def ravenel_wilson_lie_dimension(d: int, q: int) -> int:
    return comb(d - 1, q - 1)


def leibniz(mat: list, mul, add, neg, one, zero):
    """Permutation expansion with caller-supplied ring operations."""
    n = len(mat)
    total = zero
    for perm in itertools.permutations(range(n)):
        inversions = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = one
        for i in range(n):
            term = mul(term, mat[perm[i]][i])
        total = add(total, neg(term) if inversions % 2 else term)
    return total


# --- inverse limits ---------------------------------------------------------------


def brute_force_limits(levels: list, maps: list, tail: str, p: int) -> tuple:
    """(dim lim, dim lim^1) of a tiny tower over F_p by enumeration, per degree.

    levels[a] is a list of degrees, maps[a] a dense matrix level a+1 -> level a.
    The tail is materialized by one extra level.
    """
    levels = list(levels)
    maps = [list(map(list, f)) for f in maps]
    top = levels[-1]
    if tail == "constant":
        levels.append(top)
        maps.append([[int(i == j) for j in range(len(top))] for i in range(len(top))])
    else:
        levels.append([])
        maps.append([[] for _ in top])
    degrees = sorted({g for lv in levels for g in lv})
    lim, lim1 = {}, {}
    for n in degrees:
        idx = [[i for i, g in enumerate(lv) if g == n] for lv in levels]
        dom_sizes = [len(ix) for ix in idx]
        cod_sizes = dom_sizes[:-1]
        images, kernel = set(), 0
        for vec in itertools.product(*(itertools.product(range(p), repeat=s) for s in dom_sizes)):
            img = []
            for a in range(len(cod_sizes)):
                row = []
                for r, i in enumerate(idx[a]):
                    acc = vec[a][r]
                    for c, j in enumerate(idx[a + 1]):
                        acc -= maps[a][i][j] * vec[a + 1][c]
                    row.append(acc % p)
                img.append(tuple(row))
            img = tuple(img)
            images.add(img)
            if not any(any(r) for r in img):
                kernel += 1
        total_cod = p ** sum(cod_sizes)
        lim[n] = _log(kernel, p)
        lim1[n] = _log(total_cod // len(images), p)
    return lim, lim1


def _log(x: int, p: int) -> int:
    e = 0
    while x > 1:
        x //= p
        e += 1
    return e
