"""Truncated power series over Z/p^N, the Honda formal group law and its p-series.

The Honda law of height d has logarithm l(x) = sum_i x^(q^i) / p^i with
q = p^d.  F is found from l(F(x, y)) = l(x) + l(y) rewritten as the fixed
point

    p^K F = p^K (x + y) + sum_{1 <= i <= K} p^(K-i) (x^(q^i) + y^(q^i) - F^(q^i)),

with K the largest i such that q^i <= degree cap.  Arithmetic runs modulo
p^(N + K + 1 + K); the final division by p^K must be exact, and results are
returned modulo p^N.  Errors in F are multiplied by q^i inside F^(q^i), which
is why the iteration does not lose precision.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .coalgebra import GradedCoalgebra, curve_coalgebra
from .coeffring import build_field
from .coeffring.polys import is_prime

_INT64_SAFE = 1 << 62


class SeriesError(ValueError):
    pass


class IntegralityError(ArithmeticError):
    """A coefficient that must be p-integral was not; the computation is aborted."""


class InsufficientPrecision(ValueError):
    pass


def _dtype_for(modulus: int, cap: int):
    return np.int64 if (modulus - 1) ** 2 * (cap + 2) < _INT64_SAFE else object


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    """Power series in ``coeffs.ndim`` variables modulo (total degree > cap, modulus)."""

    coeffs: np.ndarray
    cap: int
    modulus: int

    # --- construction -----------------------------------------------------
    @classmethod
    def zero(cls, nvars: int, cap: int, modulus: int) -> "TruncatedSeries":
        return cls(np.zeros((cap + 1,) * nvars, dtype=_dtype_for(modulus, cap)), cap, modulus)

    @classmethod
    def monomial(cls, exps: tuple, cap: int, modulus: int, coeff: int = 1) -> "TruncatedSeries":
        s = cls.zero(len(exps), cap, modulus)
        if sum(exps) <= cap:
            s.coeffs[tuple(exps)] = coeff % modulus
        return s

    @classmethod
    def variable(cls, i: int, nvars: int, cap: int, modulus: int) -> "TruncatedSeries":
        exps = tuple(int(j == i) for j in range(nvars))
        return cls.monomial(exps, cap, modulus)

    @classmethod
    def from_monomials(cls, nvars: int, cap: int, modulus: int, items) -> "TruncatedSeries":
        s = cls.zero(nvars, cap, modulus)
        for *exps, c in items:
            if sum(exps) <= cap:
                s.coeffs[tuple(exps)] = (s.coeffs[tuple(exps)] + c) % modulus
        return s

    @property
    def nvars(self) -> int:
        return self.coeffs.ndim

    def _new(self, arr) -> "TruncatedSeries":
        arr = arr % self.modulus
        arr[_mask(self.nvars, self.cap)] = 0
        return TruncatedSeries(arr, self.cap, self.modulus)

    def _check(self, other: "TruncatedSeries") -> None:
        if (self.nvars, self.cap, self.modulus) != (other.nvars, other.cap, other.modulus):
            raise SeriesError("series live in different rings")

    # --- ring operations -----------------------------------------------------
    def __add__(self, other):
        self._check(other)
        return self._new(self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return self._new(self.coeffs - other.coeffs)

    def __neg__(self):
        return self._new(-self.coeffs)

    def scale(self, c: int) -> "TruncatedSeries":
        return self._new(self.coeffs * (c % self.modulus))

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        self._check(other)
        a, b, m, cap = self.coeffs, other.coeffs, self.modulus, self.cap
        if self.nvars == 1 and a.dtype != object:
            out = np.convolve(a, b)[: cap + 1] % m
            return TruncatedSeries(out, cap, m)
        out = np.zeros_like(a)
        for idx in zip(*np.nonzero(a)):
            val = a[idx]
            if sum(idx) > cap:
                continue
            src = tuple(slice(0, cap + 1 - i) for i in idx)
            dst = tuple(slice(i, cap + 1) for i in idx)
            out[dst] = (out[dst] + val * b[src]) % m
        return self._new(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "TruncatedSeries":
        if e < 0:
            raise SeriesError("negative powers are not supported")
        result = self.one_like()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def one_like(self) -> "TruncatedSeries":
        return TruncatedSeries.monomial((0,) * self.nvars, self.cap, self.modulus)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.nvars, self.cap, self.modulus) == (other.nvars, other.cap, other.modulus) and bool(
            np.all(self.coeffs == other.coeffs)
        )

    __hash__ = None

    def is_zero(self) -> bool:
        return not np.any(self.coeffs)

    def coefficient(self, *exps) -> int:
        if sum(exps) > self.cap:
            raise SeriesError(f"monomial degree {sum(exps)} exceeds cap {self.cap}")
        return int(self.coeffs[tuple(exps)])

    def monomials(self) -> list:
        """[[e_1, ..., e_n, coeff], ...] in lexicographic exponent order."""
        return [[*map(int, idx), int(self.coeffs[idx])] for idx in sorted(zip(*np.nonzero(self.coeffs)))]

    def order(self) -> int | None:
        """Least total degree with a nonzero coefficient (None for zero)."""
        degs = [sum(map(int, idx)) for idx in zip(*np.nonzero(self.coeffs))]
        return min(degs) if degs else None

    def reduce(self, modulus: int) -> "TruncatedSeries":
        if self.modulus % modulus:
            raise SeriesError(f"cannot reduce modulo {modulus} from {self.modulus}")
        arr = (self.coeffs % modulus).astype(_dtype_for(modulus, self.cap))
        return TruncatedSeries(arr, self.cap, modulus)

    def recap(self, cap: int) -> "TruncatedSeries":
        if cap > self.cap:
            raise SeriesError("cannot raise the degree cap")
        arr = self.coeffs[(slice(0, cap + 1),) * self.nvars].copy()
        return TruncatedSeries(arr, cap, self.modulus)._new(arr)

    def divide_exact(self, k: int, p: int) -> "TruncatedSeries":
        """self / p^k, modulo modulus / p^k; raises if some coefficient is not divisible."""
        pk = p**k
        if self.modulus % pk:
            raise SeriesError("modulus not divisible by p^k")
        if np.any(self.coeffs % pk):
            raise IntegralityError(f"series is not divisible by {p}^{k}")
        m = self.modulus // pk
        arr = (self.coeffs // pk).astype(_dtype_for(m, self.cap))
        return TruncatedSeries(arr % m, self.cap, m)

    def substitute(self, values: list) -> "TruncatedSeries":
        """f(g_1, ..., g_n) for series g_i without constant term (all in one ring)."""
        if len(values) != self.nvars:
            raise SeriesError(f"expected {self.nvars} substitutions")
        for g in values:
            if g.coeffs.flat[0] % g.modulus:
                raise SeriesError("substituted series must have zero constant term")
        target = values[0]
        powers = []
        for g in values:
            pw = [target.one_like()]
            for _ in range(self.cap):
                pw.append(pw[-1] * g)
            powers.append(pw)
        out = TruncatedSeries.zero(target.nvars, target.cap, target.modulus)
        acc = out.coeffs.copy()
        for idx in zip(*np.nonzero(self.coeffs)):
            term = None
            for var, e in enumerate(idx):
                if e:
                    term = powers[var][e] if term is None else term * powers[var][e]
            if term is None:
                term = target.one_like()
            acc = (acc + int(self.coeffs[idx]) * term.coeffs) % target.modulus
        return target._new(acc)

    def to_json(self, precision: int) -> dict:
        return {"monomials": self.monomials(), "precision": precision, "degree_cap": self.cap}


def _mask_cache():
    cache = {}

    def mask(nvars: int, cap: int):
        key = (nvars, cap)
        if key not in cache:
            grids = np.indices((cap + 1,) * nvars)
            cache[key] = grids.sum(axis=0) > cap
        return cache[key]

    return mask


_mask = _mask_cache()


# --- the Honda law ---------------------------------------------------------------


def _log_depth(q: int, cap: int) -> int:
    K = 0
    while q ** (K + 1) <= cap:
        K += 1
    return K


@dataclass(frozen=True, eq=False)
class FormalGroupLaw:
    p: int
    d: int
    cap: int
    precision: int
    series: TruncatedSeries  # modulo p^precision
    padded: TruncatedSeries = field(repr=False)  # modulo p^(precision + K + 1)
    padding: int = 0

    @property
    def q(self) -> int:
        return self.p**self.d

    @property
    def mod_p(self) -> TruncatedSeries:
        return self.series.reduce(self.p)

    def add(self, a: TruncatedSeries, b: TruncatedSeries, reduced: bool = False) -> TruncatedSeries:
        """Formal sum F(a, b); a and b must share the law's cap and modulus."""
        F = self.mod_p if reduced else self.series
        if (a.cap, a.modulus) != (F.cap, F.modulus) or (b.cap, b.modulus) != (F.cap, F.modulus):
            raise SeriesError("arguments must live in the law's coefficient ring and degree cap")
        return F.substitute([a, b])

    def to_json(self) -> dict:
        out = self.series.to_json(self.precision)
        out.update({"p": self.p, "d": self.d})
        return out


def honda_fgl(p: int, d: int, T_deg: int, N: int = 2) -> FormalGroupLaw:
    """Honda law of height d, exact modulo p^N through total degree T_deg."""
    if not isinstance(p, int) or not is_prime(p):
        raise SeriesError(f"p must be prime, got {p!r}")
    if not isinstance(d, int) or d < 1:
        raise SeriesError(f"height must be >= 1, got {d!r}")
    if not isinstance(T_deg, int) or T_deg < 1:
        raise SeriesError(f"degree cap must be >= 1, got {T_deg!r}")
    if not isinstance(N, int) or N < 1:
        raise SeriesError(f"precision must be >= 1, got {N!r}")
    q = p**d
    K = _log_depth(q, T_deg)
    W = N + K + 1
    big = p ** (W + K)
    x = TruncatedSeries.variable(0, 2, T_deg, big)
    y = TruncatedSeries.variable(1, 2, T_deg, big)
    base = (x + y).scale(p**K)
    for i in range(1, K + 1):
        base = base + ((x ** (q**i)) + (y ** (q**i))).scale(p ** (K - i))
    F = (x + y).reduce(p**W)
    for _ in range(T_deg + 1):
        S = base
        Fb = TruncatedSeries(F.coeffs.astype(_dtype_for(big, T_deg)), T_deg, big)
        for i in range(1, K + 1):
            S = S - (Fb ** (q**i)).scale(p ** (K - i))
        nxt = TruncatedSeries(((S.coeffs - S.coeffs % p**K) // p**K) % p**W, T_deg, p**W)
        if nxt == F:
            if np.any(S.coeffs % p**K):
                raise IntegralityError("logarithm identity left a non-integral remainder")
            break
        F = nxt
    else:  # pragma: no cover - convergence is guaranteed after T_deg rounds
        raise IntegralityError("fixed-point iteration did not converge")
    return FormalGroupLaw(p, d, T_deg, N, F.reduce(p**N), F, K + 1)


def logarithm_defect(F: FormalGroupLaw) -> TruncatedSeries:
    """p^K (l(F(x,y)) - l(x) - l(y)) at padded precision; zero for a correct law."""
    p, q, cap = F.p, F.q, F.cap
    K = _log_depth(q, cap)
    m = F.padded.modulus
    G = F.padded
    x = TruncatedSeries.variable(0, 2, cap, m)
    y = TruncatedSeries.variable(1, 2, cap, m)
    out = (G - x - y).scale(p**K)
    for i in range(1, K + 1):
        out = out + (G ** (q**i) - x ** (q**i) - y ** (q**i)).scale(p ** (K - i))
    return out


def check_axioms(F: FormalGroupLaw, reduced: bool = False) -> dict:
    """Unit, commutativity and associativity, each exactly through the cap."""
    G = F.mod_p if reduced else F.series
    cap, m = G.cap, G.modulus
    x = TruncatedSeries.variable(0, 2, cap, m)
    zero = TruncatedSeries.zero(2, cap, m)
    unit = G.substitute([x, zero]) == x
    comm = G.substitute([TruncatedSeries.variable(1, 2, cap, m), x]) == G
    X, Y, Z = (TruncatedSeries.variable(i, 3, cap, m) for i in range(3))
    left = G.substitute([G.substitute([X, Y]), Z])
    right = G.substitute([X, G.substitute([Y, Z])])
    return {"unit": unit, "commutative": comm, "associative": left == right}


@dataclass
class PSeries:
    series: TruncatedSeries
    j: int
    expected_order: int
    truncated: bool  # True when the cap is below p^(jd), so x^(p^(jd)) is not visible


def p_series(F: FormalGroupLaw, j: int, reduced: bool = False) -> PSeries:
    """[p^j]_F(x) by iterated formal addition, through the law's degree cap."""
    if j < 0:
        raise SeriesError("j must be >= 0")
    G = F.mod_p if reduced else F.series
    cap, m = G.cap, G.modulus
    x = TruncatedSeries.variable(0, 1, cap, m)
    cur = x
    for _ in range(j):
        acc = cur
        for _ in range(F.p - 1):
            acc = G.substitute([acc, cur])
        cur = acc
    order = F.q**j
    return PSeries(cur, j, order, order > cap)


def p_series_from_log(p: int, d: int, j: int, cap: int, N: int = 1) -> TruncatedSeries:
    """[p^j](x) modulo p^N through degree cap, solved from l([p^j] x) = p^j l(x).

    Univariate, so it reaches degrees far beyond what the bivariate law can.
    """
    q = p**d
    K = _log_depth(q, cap)
    W = N + K + 1
    big = p ** (W + K)
    x = TruncatedSeries.variable(0, 1, cap, big)
    pj = p**j
    base = x.scale(pj * p**K)
    for i in range(1, K + 1):
        base = base + (x ** (q**i)).scale(pj * p ** (K - i))
    f = TruncatedSeries.zero(1, cap, p**W)
    for _ in range(cap + 1):
        S = base
        fb = TruncatedSeries(f.coeffs.astype(_dtype_for(big, cap)), cap, big)
        for i in range(1, K + 1):
            S = S - (fb ** (q**i)).scale(p ** (K - i))
        nxt = TruncatedSeries(((S.coeffs - S.coeffs % p**K) // p**K) % p**W, cap, p**W)
        if nxt == f:
            if np.any(S.coeffs % p**K):
                raise IntegralityError("p-series logarithm identity left a non-integral remainder")
            break
        f = nxt
    return f.reduce(p**N)


@dataclass
class TorsionAlgebra:
    """k[x] / ([p^j](x)) for the Honda law over F_p."""

    p: int
    d: int
    j: int
    dimension: int
    leading_coefficient: int
    route: str

    def coalgebra(self, generator_degree: int = 1) -> GradedCoalgebra:
        """Dual coalgebra; [p^j] is a unit times x^dim, so this is the truncated curve."""
        return curve_coalgebra(build_field(self.p, 1), self.dimension, generator_degree)


def torsion_algebra(F: FormalGroupLaw, j: int) -> TorsionAlgebra:
    """Dimension of the p^j-torsion coordinate algebra, read off the p-series mod p.

    When the law's cap already reaches p^(jd) the p-series comes from formal
    addition; otherwise it is solved from the logarithm, which needs only one
    variable.  Either way the series must vanish below degree p^(jd) and have a
    unit coefficient there (Weierstrass preparation then gives the dimension).
    """
    if j < 0:
        raise SeriesError("j must be >= 0")
    target = F.q**j
    if j == 0:
        return TorsionAlgebra(F.p, F.d, 0, 1, 1, "trivial")
    if F.cap >= target:
        s = p_series(F, j, reduced=True).series
        route = "formal-addition"
    else:
        s = p_series_from_log(F.p, F.d, j, target, 1)
        route = "logarithm"
    order = s.order()
    if order is None or order > target:
        raise InsufficientPrecision(f"p-series vanishes through degree {s.cap}")
    if order < target:
        raise IntegralityError(f"p-series has a term of degree {order} below {target}: not height {F.d}")
    return TorsionAlgebra(F.p, F.d, j, order, s.coefficient(order), route)


def series_from_json(obj: dict, p: int | None = None) -> TruncatedSeries:
    """Inverse of ``TruncatedSeries.to_json``; p defaults to the record's own "p"."""
    p = obj.get("p") if p is None else p
    if p is None:
        raise SeriesError("prime needed to rebuild the coefficient modulus")
    mons = obj["monomials"]
    nvars = len(mons[0]) - 1 if mons else int(obj.get("nvars", 2))
    return TruncatedSeries.from_monomials(nvars, int(obj["degree_cap"]), p ** int(obj["precision"]), mons)


def log_coefficients(p: int, d: int, cap: int) -> dict:
    """Exponent -> (numerator, p-power denominator) of the Honda logarithm."""
    q = p**d
    out, i = {}, 0
    while q**i <= cap:
        out[q**i] = (1, p**i)
        i += 1
    return out


__all__ = [
    "FormalGroupLaw",
    "InsufficientPrecision",
    "IntegralityError",
    "PSeries",
    "SeriesError",
    "TorsionAlgebra",
    "TruncatedSeries",
    "check_axioms",
    "honda_fgl",
    "log_coefficients",
    "logarithm_defect",
    "p_series",
    "p_series_from_log",
    "series_from_json",
    "torsion_algebra",
]
