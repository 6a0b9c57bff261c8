"""Truncated unramified Witt rings W_N(F_{p^d}) = (Z/p^N)[t]/(f~) with Frobenius.

``f~`` is the lift of the residue-field modulus with coefficients in [0, p);
the Frobenius lift sigma is pinned down by sending t to the unique root of f~
congruent to t^p mod p, found by Newton iteration.

Elements are tuples of d ints in ``range(p**N)``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from . import polys
from .field import FiniteFieldCtx, build_field


class WittError(ArithmeticError):
    pass


@dataclass(frozen=True, eq=False)
class WittRingCtx:
    p: int
    d: int
    N: int
    modulus: tuple[int, ...]
    residue: FiniteFieldCtx = field(repr=False)
    pN: int = field(init=False)
    sigma_gen: tuple = field(init=False)
    _sigma_cols: tuple = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "pN", self.p**self.N)
        root = self._newton_frobenius()
        object.__setattr__(self, "sigma_gen", root)
        cols = []
        cur = self.one
        for _ in range(self.d):
            cols.append(cur)
            cur = self.mul(cur, root)
        object.__setattr__(self, "_sigma_cols", tuple(cols))

    # --- basic elements -------------------------------------------------
    @property
    def zero(self) -> tuple:
        return (0,) * self.d

    @property
    def one(self) -> tuple:
        return (1 % self.pN,) + (0,) * (self.d - 1)

    def gen(self) -> tuple:
        return self.from_poly([0, 1])

    def from_int(self, n: int) -> tuple:
        return (n % self.pN,) + (0,) * (self.d - 1)

    def from_poly(self, coeffs) -> tuple:
        r = polys.mod(list(coeffs), list(self.modulus), self.pN)
        return tuple(r + [0] * (self.d - len(r)))

    def scalar_value(self, a) -> int:
        """The Z/p^N value of an element lying in the constant subring."""
        if any(a[1:]):
            raise WittError(f"{a} is not a constant")
        return a[0]

    # --- ring operations ------------------------------------------------
    def add(self, a, b) -> tuple:
        m = self.pN
        return tuple((x + y) % m for x, y in zip(a, b))

    def sub(self, a, b) -> tuple:
        m = self.pN
        return tuple((x - y) % m for x, y in zip(a, b))

    def neg(self, a) -> tuple:
        m = self.pN
        return tuple((-x) % m for x in a)

    def scale(self, a, n: int) -> tuple:
        m = self.pN
        return tuple((n * x) % m for x in a)

    def mul(self, a, b) -> tuple:
        if self.d == 1:
            return ((a[0] * b[0]) % self.pN,)
        return self.from_poly(polys.mul(list(a), list(b), self.pN))

    def pow(self, a, e: int) -> tuple:
        if e < 0:
            return self.pow(self.inv(a), -e)
        result, base = self.one, a
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def is_zero(self, a) -> bool:
        return not any(a)

    def reduce_mod_p(self, a) -> int:
        """Image in the residue field F_{p^d}."""
        return self.residue.from_coeffs([x % self.p for x in a])

    def lift_residue(self, x: int) -> tuple:
        return tuple(self.residue.to_coeffs(x))

    def is_unit(self, a) -> bool:
        return self.reduce_mod_p(a) != 0

    def valuation(self, a) -> int:
        """p-adic valuation, N for the zero element."""
        v = self.N
        for x in a:
            if x:
                k = 0
                while x % self.p == 0:
                    x //= self.p
                    k += 1
                v = min(v, k)
        return v

    def divide_by_p_power(self, a, k: int) -> tuple:
        """a / p^k for a divisible by p^k; the result is defined mod p^(N-k)."""
        if self.valuation(a) < k:
            raise WittError(f"{a} is not divisible by p^{k}")
        return tuple(x // self.p**k for x in a)

    def inv(self, a) -> tuple:
        if not self.is_unit(a):
            raise ZeroDivisionError(f"{a} is not a unit in W_{self.N}")
        y = self.lift_residue(self.residue.inv(self.reduce_mod_p(a)))
        two = self.from_int(2)
        for _ in range(self.N + 1):
            ay = self.mul(a, y)
            if ay == self.one:
                return y
            y = self.mul(y, self.sub(two, ay))
        raise WittError("Newton inversion failed to converge")  # pragma: no cover

    # --- Frobenius ------------------------------------------------------
    def sigma(self, a, times: int = 1) -> tuple:
        for _ in range(times % self.d):
            acc = [0] * self.d
            for c, col in zip(a, self._sigma_cols):
                if c:
                    for i, v in enumerate(col):
                        acc[i] += c * v
            a = tuple(x % self.pN for x in acc)
        return a

    def sigma_inv(self, a, times: int = 1) -> tuple:
        return self.sigma(a, -times)

    def reduce_to(self, M: int) -> "WittRingCtx":
        """The context at precision M <= N (same modulus, compatible sigma)."""
        if not 1 <= M <= self.N:
            raise WittError(f"cannot reduce precision {self.N} to {M}")
        return build_witt(self.p, self.d, M)

    def coerce(self, a, source: "WittRingCtx") -> tuple:
        """Reduce (or naively lift) an element of another precision into this context."""
        return tuple(x % self.pN for x in a)

    def random_element(self, rng: random.Random) -> tuple:
        return tuple(rng.randrange(self.pN) for _ in range(self.d))

    def __repr__(self) -> str:
        return f"WittRingCtx(p={self.p}, d={self.d}, N={self.N}, modulus={self.modulus})"

    # --- internals ------------------------------------------------------
    def _eval_modulus(self, r):
        acc = self.zero
        for c in reversed(self.modulus):
            acc = self.add(self.mul(acc, r), self.from_int(c))
        return acc

    def _eval_derivative(self, r):
        der = polys.derivative(list(self.modulus), self.pN)
        acc = self.zero
        for c in reversed(der):
            acc = self.add(self.mul(acc, r), self.from_int(c))
        return acc

    def _newton_frobenius(self):
        if self.d == 1:
            return self.one
        r = self.pow(self.gen(), self.p)
        for _ in range(self.N + 1):
            val = self._eval_modulus(r)
            if self.is_zero(val):
                return r
            r = self.sub(r, self.mul(val, self.inv(self._eval_derivative(r))))
        raise WittError("Newton iteration for the Frobenius lift did not converge")


_WITT: dict[tuple[int, int, int], WittRingCtx] = {}


def build_witt(p: int, d: int, N: int) -> WittRingCtx:
    """W_N(F_{p^d}) with modulus lifted from :func:`build_field`."""
    if not isinstance(N, int) or N < 1:
        raise WittError(f"precision N must be >= 1, got {N!r}")
    key = (p, d, N)
    if key not in _WITT:
        k = build_field(p, d)
        _WITT[key] = WittRingCtx(p, d, N, k.modulus, k)
    return _WITT[key]


def galois_norm(ctx: WittRingCtx, a) -> int:
    """Product of the d sigma-conjugates of ``a``, returned as an int mod p^N."""
    acc = ctx.one
    for i in range(ctx.d):
        acc = ctx.mul(acc, ctx.sigma(a, i))
    return ctx.scalar_value(acc)
