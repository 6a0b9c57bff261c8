"""Dense univariate polynomials with integer coefficients modulo ``m``.

Polynomials are lists of ints, lowest degree first, with no trailing zeros
(the zero polynomial is ``[]``).
"""

from __future__ import annotations


def trim(f: list[int]) -> list[int]:
    while f and f[-1] == 0:
        f.pop()
    return f


def normalize(f, m: int) -> list[int]:
    return trim([c % m for c in f])


def degree(f: list[int]) -> int:
    return len(f) - 1


def add(f, g, m: int) -> list[int]:
    n = max(len(f), len(g))
    out = [0] * n
    for i, c in enumerate(f):
        out[i] = c
    for i, c in enumerate(g):
        out[i] = (out[i] + c) % m
    return normalize(out, m)


def sub(f, g, m: int) -> list[int]:
    return add(f, [-c for c in g], m)


def mul(f, g, m: int) -> list[int]:
    if not f or not g:
        return []
    out = [0] * (len(f) + len(g) - 1)
    for i, a in enumerate(f):
        if a == 0:
            continue
        for j, b in enumerate(g):
            out[i + j] += a * b
    return normalize(out, m)


def scale(f, c: int, m: int) -> list[int]:
    return normalize([c * a for a in f], m)


def divmod_monic(f, g, m: int) -> tuple[list[int], list[int]]:
    """Divide ``f`` by the monic polynomial ``g`` over Z/m."""
    if not g or g[-1] % m != 1:
        raise ValueError("divisor must be monic")
    r = normalize(list(f), m)
    dg = len(g) - 1
    if len(r) - 1 < dg:
        return [], r
    quo = [0] * (len(r) - dg)
    for k in range(len(r) - 1, dg - 1, -1):
        c = r[k] % m
        if c == 0:
            continue
        quo[k - dg] = c
        for i, b in enumerate(g):
            r[k - dg + i] = (r[k - dg + i] - c * b) % m
    return normalize(quo, m), normalize(r[:dg], m)


def mod(f, g, m: int) -> list[int]:
    return divmod_monic(f, g, m)[1]


def mulmod(f, g, modulus, m: int) -> list[int]:
    return mod(mul(f, g, m), modulus, m)


def powmod(f, e: int, modulus, m: int) -> list[int]:
    result = [1 % m] if m > 1 else []
    base = mod(f, modulus, m)
    while e:
        if e & 1:
            result = mulmod(result, base, modulus, m)
        base = mulmod(base, base, modulus, m)
        e >>= 1
    return result


def make_monic(f, p: int) -> list[int]:
    """Scale a nonzero polynomial over the prime field F_p to be monic."""
    inv = pow(f[-1], -1, p)
    return scale(f, inv, p)


def gcd_fp(f, g, p: int) -> list[int]:
    """Monic gcd over the prime field F_p (``[]`` if both are zero)."""
    a, b = normalize(f, p), normalize(g, p)
    while b:
        b = make_monic(b, p)
        a, b = b, mod(a, b, p)
    return make_monic(a, p) if a else []


def derivative(f, m: int) -> list[int]:
    return normalize([i * c for i, c in enumerate(f)][1:], m)


def prime_factors(n: int) -> list[int]:
    out = []
    k = 2
    while k * k <= n:
        if n % k == 0:
            out.append(k)
            while n % k == 0:
                n //= k
        k += 1
    if n > 1:
        out.append(n)
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return prime_factors(n) == [n]


def is_irreducible(f, p: int) -> bool:
    """Rabin's test for a monic polynomial over F_p.

    ``f`` of degree d is irreducible iff it divides x^(p^d) - x and is coprime
    to x^(p^(d/r)) - x for every prime r dividing d.
    """
    d = degree(f)
    if d < 1:
        return False
    if d == 1:
        return True
    x = [0, 1]
    if sub(powmod(x, p**d, f, p), x, p):
        return False
    for r in prime_factors(d):
        h = sub(powmod(x, p ** (d // r), f, p), x, p)
        if gcd_fp(f, h, p) != [1]:
            return False
    return True
