"""Finite fields F_{p^d} presented as F_p[t]/(f).

Elements are plain ints in ``range(p**d)``; the base-p digits of an element are
its coefficients on 1, t, ..., t^(d-1).  For d = 1 this is ordinary arithmetic
mod p, which the linear algebra kernel relies on for speed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import polys

# Above this size multiplication falls back to polynomial arithmetic.
_TABLE_LIMIT = 1 << 16


class FieldError(ValueError):
    pass


def smallest_irreducible(p: int, d: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree d over F_p.

    Candidates are ordered by (c_{d-1}, ..., c_0), most significant first.
    """
    for k in range(p**d):
        low = [(k // p**i) % p for i in range(d)]
        f = low + [1]
        if polys.is_irreducible(f, p):
            return tuple(f)
    raise FieldError(f"no irreducible polynomial of degree {d} over F_{p}")  # pragma: no cover


@dataclass(frozen=True, eq=False)
class FiniteFieldCtx:
    p: int
    d: int
    modulus: tuple[int, ...]
    q: int = field(init=False)
    _exp: list = field(init=False, repr=False)
    _log: dict = field(init=False, repr=False)
    _frob_images: tuple = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "q", self.p**self.d)
        exp, log = self._build_tables()
        object.__setattr__(self, "_exp", exp)
        object.__setattr__(self, "_log", log)
        # image of t^i under x -> x^p, for the linear Frobenius table
        t = self.gen()
        tp = self.pow(t, self.p)
        images = []
        cur = self.one
        for _ in range(self.d):
            images.append(self.to_coeffs(cur))
            cur = self.mul(cur, tp)
        object.__setattr__(self, "_frob_images", tuple(images))

    # --- encoding -------------------------------------------------------
    def to_coeffs(self, a: int) -> tuple[int, ...]:
        p = self.p
        return tuple((a // p**i) % p for i in range(self.d))

    def from_coeffs(self, coeffs) -> int:
        p = self.p
        coeffs = list(coeffs)
        if len(coeffs) > self.d:
            coeffs = polys.mod(coeffs, list(self.modulus), p)
        return sum((c % p) * p**i for i, c in enumerate(coeffs))

    def from_int(self, n: int) -> int:
        return n % self.p

    @property
    def zero(self) -> int:
        return 0

    @property
    def one(self) -> int:
        return 1

    def gen(self) -> int:
        return self.from_coeffs([0, 1])

    def elements(self):
        return range(self.q)

    @property
    def is_prime_field(self) -> bool:
        return self.d == 1

    # --- arithmetic -----------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.d == 1:
            return (a + b) % self.p
        p = self.p
        out, scale = 0, 1
        for _ in range(self.d):
            out += ((a % p + b % p) % p) * scale
            a //= p
            b //= p
            scale *= p
        return out

    def neg(self, a: int) -> int:
        if self.d == 1:
            return (-a) % self.p
        return self.from_coeffs([-c for c in self.to_coeffs(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.d == 1:
            return (a * b) % self.p
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return self._exp[(self._log[a] + self._log[b]) % (self.q - 1)]
        prod = polys.mulmod(list(self.to_coeffs(a)), list(self.to_coeffs(b)), list(self.modulus), self.p)
        return self.from_coeffs(prod)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in a finite field")
        if self.d == 1:
            return pow(a, -1, self.p)
        if self._log is not None:
            return self._exp[(-self._log[a]) % (self.q - 1)]
        return self.pow(a, self.q - 2)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, a: int) -> bool:
        return a == 0

    def frobenius(self, a: int, times: int = 1) -> int:
        """Apply x -> x^p ``times`` times, using the linear Frobenius table."""
        for _ in range(times % self.d if self.d > 1 else 0):
            acc = [0] * self.d
            for c, img in zip(self.to_coeffs(a), self._frob_images):
                if c:
                    for i, v in enumerate(img):
                        acc[i] += c * v
            a = self.from_coeffs(acc)
        return a

    def random_element(self, rng: random.Random) -> int:
        return rng.randrange(self.q)

    def __repr__(self) -> str:
        return f"FiniteFieldCtx(p={self.p}, d={self.d}, modulus={self.modulus})"

    # --- internals ------------------------------------------------------
    def _poly_mul(self, a: int, b: int) -> int:
        prod = polys.mulmod(list(self.to_coeffs(a)), list(self.to_coeffs(b)), list(self.modulus), self.p)
        return self.from_coeffs(prod)

    def _build_tables(self):
        if self.d == 1 or self.q > _TABLE_LIMIT:
            return None, None
        order = self.q - 1
        factors = polys.prime_factors(order)
        for g in range(2, self.q):
            if all(self._poly_pow(g, order // r) != 1 for r in factors):
                break
        exp = [0] * order
        log = {}
        cur = 1
        for k in range(order):
            exp[k] = cur
            log[cur] = k
            cur = self._poly_mul(cur, g)
        return exp, log

    def _poly_pow(self, a: int, e: int) -> int:
        result, base = 1, a
        while e:
            if e & 1:
                result = self._poly_mul(result, base)
            base = self._poly_mul(base, base)
            e >>= 1
        return result


def build_field(p: int, d: int) -> FiniteFieldCtx:
    """Construct F_{p^d} with the lexicographically smallest monic modulus."""
    if not isinstance(p, int) or not polys.is_prime(p):
        raise FieldError(f"p must be prime, got {p!r}")
    if not isinstance(d, int) or d < 1:
        raise FieldError(f"extension degree must be >= 1, got {d!r}")
    return _cached_field(p, d)


_FIELDS: dict[tuple[int, int], FiniteFieldCtx] = {}


def _cached_field(p: int, d: int) -> FiniteFieldCtx:
    key = (p, d)
    if key not in _FIELDS:
        _FIELDS[key] = FiniteFieldCtx(p, d, smallest_irreducible(p, d))
    return _FIELDS[key]
