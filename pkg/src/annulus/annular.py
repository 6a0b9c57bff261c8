"""The annular tower of a formal curve coalgebra and the coskeletal D^1 tower.

C[n, n'] is the fiber of the pinch map M^[]n -> M^[](n'+1); at the level of
homology this is the kernel of a degreewise surjection.  The pinch out of
M^[]j is v -> (1 (x) pi) psi_R(v), which lands in M^[]j []_C M = M^[](j+1).

The coskeletal page assembles D^1_{s,t} from cobar cochains, coboundaries and
cohomology by the even/odd case rule (s is the uncollapsed degree, so a cell
with s + t even sits in internal degree (s + t) / 2):

    s + t even:  D_{s,t} = D_{s,t-1} + dim C^t_n - dim B^t_n
    s + t odd:   D_{s,t} = D_{s,t-2} + dim H^{t-1}_{(s+t-1)/2}
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .coalgebra import (
    GradedCoalgebra,
    GradedComodule,
    cobar,
    cotangent_dims,
    cotensor_coordinates,
    cotensor_power,
    cotor,
    trivial_comodule,
)
from .coeffring import Echelon, SpanCoordinates, SparseMatrix, image_echelon, kernel_basis, rank


class AnnularError(ArithmeticError):
    """Input does not behave like a formal curve inside the window."""


# --- pinch maps and strata ------------------------------------------------------


def pinch_map(C: GradedCoalgebra, j: int, window: int) -> dict:
    """Degree n -> matrix of M^[]j -> M^[](j+1) (rows index the target basis)."""
    X = cotensor_power(C, j, window)
    Y = cotensor_power(C, j + 1, window)
    k = C.field
    src, tgt = X.by_degree(), Y.by_degree()
    blocks = {}
    if j == 0:
        # C -> C / eta; Y = coideal lists the non-eta basis elements in order
        pos = {b: t for t, b in enumerate(C.reduced_indices)}
        images = {b: ({pos[b]: k.one} if b in pos else {}) for b in range(len(C))}
    else:
        mpos = {b: t for t, b in enumerate(C.reduced_indices)}
        images = {}
        for v in range(len(X)):
            amb = defaultdict(int)
            for x2, c, coeff in X.right.get(v, ()):
                if c in mpos:
                    amb[(x2, mpos[c])] = k.add(amb[(x2, mpos[c])], coeff)
            amb = {key: val for key, val in amb.items() if val}
            images[v] = cotensor_coordinates(Y, X.degrees[v], amb) if amb else {}
    for n in range(window):
        cols = src.get(n, [])
        rows = tgt.get(n, [])
        rpos = {r: t for t, r in enumerate(rows)}
        mat = SparseMatrix(len(rows), len(cols))
        for ci, v in enumerate(cols):
            for r, val in images[v].items():
                mat.rows[rpos[r]][ci] = val
        blocks[n] = mat
    return blocks


def composite_pinch(C: GradedCoalgebra, n: int, m: int, window: int) -> dict:
    """M^[]n -> M^[]m for n <= m, as per-degree matrices."""
    k = C.field
    X = cotensor_power(C, n, window)
    by = X.by_degree()
    out = {g: _identity(len(by.get(g, []))) for g in range(window)}
    for j in range(n, m):
        step = pinch_map(C, j, window)
        out = {g: step[g].compose(k, out[g]) for g in range(window)}
    return out


def _identity(n: int) -> SparseMatrix:
    return SparseMatrix(n, n, [{i: 1} for i in range(n)])


@dataclass
class AnnularReport:
    n: int
    n_prime: int
    window: int
    dims: dict  # internal degree -> dim C[n, n']
    generators: dict  # internal degree -> list of {label: coeff}
    valid_below: int

    def bigraded_dims(self) -> list:
        return [[0, g, d] for g, d in sorted(self.dims.items()) if d]


def annular_stratum(C: GradedCoalgebra, n: int, n_prime: int, window: int | None = None) -> AnnularReport:
    """C[n, n'] = ker(M^[]n -> M^[](n'+1)) degreewise below ``window``."""
    if window is None:
        window = C.truncation
    if window > C.truncation:
        raise AnnularError(f"window {window} exceeds truncation {C.truncation}")
    if not 0 <= n <= n_prime < window:
        raise AnnularError(f"need 0 <= n <= n' < window, got n={n}, n'={n_prime}, window={window}")
    X = cotensor_power(C, n, window)
    Y = cotensor_power(C, n_prime + 1, window)
    mats = composite_pinch(C, n, n_prime + 1, window)
    k = C.field
    by = X.by_degree()
    ydims = Y.dims(window)
    dims, gens = {}, {}
    for g in range(window):
        m = mats[g]
        if rank(k, m) != ydims[g]:
            raise AnnularError(f"pinch map M^[]{n} -> M^[]{n_prime + 1} is not surjective in degree {g}")
        ker = kernel_basis(k, m)
        dims[g] = len(ker)
        if ker:
            cols = by[g]
            gens[g] = [{X.labels[cols[i]]: v for i, v in vec.items()} for vec in ker]
    return AnnularReport(n, n_prime, window, dims, gens, window)


@dataclass
class AttachingMap:
    """Extension data of 0 -> C[n, n'] -> C[n, n''] -> C[n'+1, n''] -> 0.

    ``entries`` lists [top_degree, c_label, sub_degree, coeff]: the component
    of psi_L(v) in C_red (x) C[n, n'] for each chosen lift v of a generator of
    the upper stratum.  Zero entries throughout would mean the comodule
    extension splits.
    """

    n: int
    n_prime: int
    n_second: int
    entries: list
    window: int

    @property
    def nonzero(self) -> bool:
        return bool(self.entries)


def attaching_map(C: GradedCoalgebra, n: int, n_prime: int, n_second: int,
                  window: int | None = None) -> AttachingMap:
    """Connecting data between the strata C[n, n'] and C[n'+1, n''] inside C[n, n'']."""
    if window is None:
        window = C.truncation
    if not 0 <= n <= n_prime < n_second < window:
        raise AnnularError(f"need 0 <= n <= n' < n'' < window, got {n}, {n_prime}, {n_second}")
    X = cotensor_power(C, n, window)
    k = C.field
    pos = {lab: i for i, lab in enumerate(X.labels)}

    def gens(report):
        return [(g, {pos[lab]: v for lab, v in vec.items()}) for g in sorted(report.generators)
                for vec in report.generators[g]]

    sub = gens(annular_stratum(C, n, n_prime, window))
    full = gens(annular_stratum(C, n, n_second, window))
    ambient = len(X)
    sub_span = Echelon(k)
    for _, v in sub:
        sub_span.add(v)
    top = [(g, v) for g, v in full if sub_span.add(v) is not None]
    coords = SpanCoordinates(k, [v for _, v in sub] + [v for _, v in top], ambient)
    entries = []
    for g, v in top:
        by_c = defaultdict(dict)
        for m, a in v.items():
            for c, mm, w in X.left.get(m, ()):
                if c == C.eta:
                    continue
                acc = by_c[c]
                acc[mm] = k.add(acc.get(mm, 0), k.mul(a, w))
        for c in sorted(by_c):
            vec = {i: x for i, x in by_c[c].items() if x}
            if not vec:
                continue
            try:
                cs = coords.coordinates(vec)
            except ValueError:
                raise AnnularError("coaction leaves the stratum C[n, n'']") from None
            for i, x in enumerate(cs[: len(sub)]):
                if x:
                    entries.append([g, C.labels[c], sub[i][0], x])
    return AttachingMap(n, n_prime, n_second, entries, window)


@dataclass
class TangentLine:
    degree: int
    generator: dict
    dims: dict
    cotangent_oracle: dict


def tangent_line(C: GradedCoalgebra, window: int | None = None) -> TangentLine:
    """The bottom stratum C[1, 1]; it must be a single line.

    The result is compared against dim(m / m^2) of the dual algebra, which is
    the interchange-law statement at the level of graded dimensions.
    """
    if window is None:
        window = C.truncation
    if window < 2:
        raise AnnularError("tangent line needs window >= 2")
    rep = annular_stratum(C, 1, 1, window)
    total = sum(rep.dims.values())
    if total != 1:
        raise AnnularError(f"C[1,1] has dimension {total}, expected a line")
    oracle = cotangent_dims(C, window)
    if oracle != rep.dims:
        raise AnnularError(f"C[1,1] dims {rep.dims} disagree with m/m^2 dims {oracle}")
    degree = next(g for g, d in rep.dims.items() if d)
    return TangentLine(degree, rep.generators[degree][0], rep.dims, oracle)


def tensor_dims(a: dict, b: dict, window: int) -> dict:
    out = {g: 0 for g in range(window)}
    for x, dx in a.items():
        for y, dy in b.items():
            if x + y < window:
                out[x + y] += dx * dy
    return out


def tensor_power_dims(line: dict, n: int, window: int) -> dict:
    out = {g: int(g == 0) for g in range(window)}
    for _ in range(n):
        out = tensor_dims(out, line, window)
    return out


# --- coskeletal D^1 tower ------------------------------------------------------------


@dataclass
class TowerPage:
    s_range: list
    t_range: list
    values: dict  # (s, t) -> dim D^1_{s,t}
    stabilization: dict  # s -> least t0 with D_{s,t} = D_{s,t0} for t0 <= t <= t_max
    six_term: dict  # (s, t) with s + t even -> alternating sum of dims
    window: int
    stable_values: dict = field(default_factory=dict)

    @property
    def balanced(self) -> bool:
        return all(v == 0 for v in self.six_term.values())

    def verdict(self, bound: int) -> bool:
        return self.balanced and all(t0 <= bound for t0 in self.stabilization.values())

    def bigraded_dims(self) -> list:
        return [[s, t, d] for (s, t), d in sorted(self.values.items()) if d]


def coskeletal_page(M: GradedComodule, C: GradedCoalgebra, N: GradedComodule,
                    s_range=None, t_range=None, window: int | None = None) -> TowerPage:
    """D^1_{s,t} of the coskeletal tower of Omega(M; C; N).

    Defaults: s and t both run over range(window), which keeps every cell in
    internal degree below the window.
    """
    if window is None:
        window = C.truncation
    s_range = list(range(window)) if s_range is None else list(s_range)
    t_range = list(range(window)) if t_range is None else list(t_range)
    if not t_range or min(t_range) < 0 or not s_range or min(s_range) < 0:
        raise AnnularError("s and t ranges must be nonempty and nonnegative")
    t_max = max(t_range)
    k = C.field
    cb = cobar(M, C, N, t_max + 1, window)
    cx = cb.complex

    memo_b, memo_h = {}, {}

    def cochains(t, n):
        return cb.dim(t, n)

    def coboundaries(t, n):
        if t <= 0:
            return 0
        if (t, n) not in memo_b:
            memo_b[(t, n)] = len(image_echelon(k, cx.differential(t - 1).block(n)))
        return memo_b[(t, n)]

    def cohomology(t, n):
        if t < 0:
            return 0
        if (t, n) not in memo_h:
            memo_h[(t, n)] = cx.homology_at(t, n).dim
        return memo_h[(t, n)]

    memo = {}

    def D(s, t):
        if t < 0:
            return 0
        if (s, t) in memo:
            return memo[(s, t)]
        if (s + t) % 2 == 0:
            n = (s + t) // 2
            if n >= window:
                raise AnnularError(f"cell (s={s}, t={t}) lies in internal degree {n} >= window {window}")
            val = D(s, t - 1) + cochains(t, n) - coboundaries(t, n)
        else:
            n = (s + t - 1) // 2
            if n >= window:
                raise AnnularError(f"cell (s={s}, t={t}) lies in internal degree {n} >= window {window}")
            val = D(s, t - 2) + cohomology(t - 1, n)
        memo[(s, t)] = val
        return val

    values = {(s, t): D(s, t) for s in s_range for t in t_range}
    stab, stable = {}, {}
    ts = sorted(t_range)
    for s in s_range:
        row = [values[(s, t)] for t in ts]
        t0 = ts[0]
        for i in range(len(ts)):
            if all(v == row[i] for v in row[i:]):
                t0 = ts[i]
                break
        stab[s] = t0
        stable[s] = row[-1]
    six = {}
    for s in s_range:
        for t in t_range:
            if (s + t) % 2:
                continue
            n = (s + t) // 2
            six[(s, t)] = D(s + 1, t) - D(s + 1, t - 1) + cochains(t, n) - D(s, t) + D(s, t - 1)
    return TowerPage(s_range, t_range, values, stab, six, window, stable)


# --- Koszul round trip -------------------------------------------------------------------


@dataclass
class GradedAlgebra:
    """Finite bigraded algebra: basis with (s, n) bidegrees, unit index, products."""

    field: object
    bidegrees: list
    unit: int
    mult: dict  # (i, j) -> {k: coeff}

    def product(self, i: int, j: int) -> dict:
        if i == self.unit:
            return {j: self.field.one}
        if j == self.unit:
            return {i: self.field.one}
        return self.mult.get((i, j), {})

    def is_associative(self) -> bool:
        k = self.field
        idx = range(len(self.bidegrees))
        for a in idx:
            for b in idx:
                for c in idx:
                    left, right = defaultdict(int), defaultdict(int)
                    for x, u in self.product(a, b).items():
                        for y, v in self.product(x, c).items():
                            left[y] = k.add(left[y], k.mul(u, v))
                    for x, u in self.product(b, c).items():
                        for y, v in self.product(a, x).items():
                            right[y] = k.add(right[y], k.mul(u, v))
                    if {q: v for q, v in left.items() if v} != {q: v for q, v in right.items() if v}:
                        return False
        return True


def cotor_algebra(C: GradedCoalgebra, window: int | None = None) -> GradedAlgebra:
    """cotor(k, C, k) with the concatenation product of cobar words."""
    if window is None:
        window = C.truncation
    K = trivial_comodule(C)
    res = cotor(K, C, K, window)
    cb = res.cobar
    k = C.field
    basis, reps = [], []
    for (s, n) in sorted(res.dims):
        for vec in res.representatives.get((s, n), []):
            basis.append((s, n))
            reps.append({cb.bases[s][n][i]: v for i, v in vec.items()})
    unit = basis.index((0, 0)) if (0, 0) in basis else -1
    if unit < 0:
        raise AnnularError("cotor(k, C, k) has no unit class")

    # per bidegree: boundaries and a quotient echelon of the chosen representatives
    cache = {}

    def classes(s, n):
        if (s, n) not in cache:
            bnd = image_echelon(k, cb.complex.differential(s - 1).block(n)) if s > 0 else Echelon(k)
            members = [i for i, b in enumerate(basis) if b == (s, n)]
            quo = Echelon(k)
            for i in members:
                pos = cb.index[s][n]
                quo.add(bnd.reduce({pos[key]: v for key, v in reps[i].items()}))
            cache[(s, n)] = (bnd, quo, members)
        return cache[(s, n)]

    mult = {}
    for i, (s1, n1) in enumerate(basis):
        for j, (s2, n2) in enumerate(basis):
            s, n = s1 + s2, n1 + n2
            if n >= window or s > window or i == unit or j == unit:
                continue
            prod = defaultdict(int)
            for w1, a in reps[i].items():
                for w2, b in reps[j].items():
                    word = w1[:-1] + w2[1:]
                    prod[word] = k.add(prod[word], k.mul(a, b))
            prod = {w: v for w, v in prod.items() if v}
            if not prod:
                continue
            pos = cb.index[s][n]
            bnd, quo, members = classes(s, n)
            nf = bnd.reduce({pos[w]: v for w, v in prod.items()})
            if not nf:
                continue
            coords = quo.coordinates(nf)
            # quotient basis order follows pivot order, which is how representatives were echelonized
            mult[(i, j)] = {members[t]: c for t, c in enumerate(coords) if c}
    return GradedAlgebra(k, basis, unit, mult)


def bar_homology(A: GradedAlgebra, window: int) -> dict:
    """(bar length s, internal degree n) -> dim H of the normalized bar complex of A.

    The differential multiplies adjacent letters with sign (-1)^{e_i},
    e_i = sum_{j <= i} (|a_j| + 1), |a| the cohomological degree.
    """
    k = A.field
    reduced = [i for i in range(len(A.bidegrees)) if i != A.unit]
    by_deg = defaultdict(list)
    for i in reduced:
        by_deg[A.bidegrees[i][1]].append(i)
    words = {0: {0: [()]}}
    length = 0
    while True:
        nxt = defaultdict(list)
        for n, ws in words[length].items():
            for g, letters in by_deg.items():
                if n + g < window:
                    for w in ws:
                        for a in letters:
                            nxt[n + g].append(w + (a,))
        if not nxt:
            break
        length += 1
        words[length] = {n: sorted(v) for n, v in nxt.items()}
        if length > window:
            raise AnnularError("augmentation ideal has elements of internal degree 0")
    index = {s: {n: {w: i for i, w in enumerate(ws)} for n, ws in row.items()} for s, row in words.items()}

    def d(s, n):
        src = words.get(s, {}).get(n, [])
        tgt = index.get(s - 1, {}).get(n, {})
        mat = SparseMatrix(len(src), len(tgt))
        for ci, w in enumerate(src):
            mat.rows[ci] = {tgt[nw]: v for nw, v in _bar_apply(A, {w: k.one}).items()}
        return mat.transpose()

    out = {}
    for s in range(length + 1):
        for n in range(window):
            dim = len(words.get(s, {}).get(n, []))
            if not dim:
                continue
            ker = dim - rank(k, d(s, n)) if s > 0 else dim
            img = rank(k, d(s + 1, n)) if s + 1 in words else 0
            h = ker - img
            if h:
                out[(s, n)] = h
    return out


def bar_differential_squares_to_zero(A: GradedAlgebra, window: int) -> bool:
    """d o d = 0 on every bar word of internal degree below ``window``."""
    letters = defaultdict(list)
    for i in range(len(A.bidegrees)):
        if i != A.unit:
            letters[A.bidegrees[i][1]].append(i)
    for n in range(window):
        for s in range(2, n + 2):
            for w in _words(letters, s, n):
                if _bar_apply(A, _bar_apply(A, {w: A.field.one})):
                    return False
    return True


def _words(letters: dict, s: int, n: int):
    if s == 0:
        if n == 0:
            yield ()
        return
    for g, ls in letters.items():
        if g <= n:
            for rest in _words(letters, s - 1, n - g):
                for a in ls:
                    yield (a,) + rest


def _bar_apply(A: GradedAlgebra, chain: dict) -> dict:
    k = A.field
    out = defaultdict(int)
    for w, coeff in chain.items():
        e = 0
        for i in range(len(w) - 1):
            e += A.bidegrees[w[i]][0] + 1
            for c, v in A.product(w[i], w[i + 1]).items():
                if c == A.unit:
                    continue
                nw = w[:i] + (c,) + w[i + 2:]
                val = k.mul(coeff, k.neg(v) if e % 2 else v)
                out[nw] = k.add(out[nw], val)
    return {w: v for w, v in out.items() if v}


@dataclass
class KoszulReport:
    cotor_dims: dict
    exterior: bool
    split_shape: bool
    bar_dims: dict  # (s, n) -> dim
    bar_by_degree: dict
    curve_dims: dict
    window: int

    @property
    def round_trip(self) -> bool:
        return self.bar_by_degree == self.curve_dims

    def bigraded_dims(self) -> list:
        return [[s, n, d] for (s, n), d in sorted(self.bar_dims.items())]


def koszul_roundtrip(C: GradedCoalgebra, window: int | None = None) -> KoszulReport:
    """cotor(k, C, k) -> bar homology -> compare with C degreewise."""
    if window is None:
        window = C.truncation
    A = cotor_algebra(C, window)
    dims = defaultdict(int)
    for b in A.bidegrees:
        dims[b] += 1
    dims = dict(dims)
    gens = [i for i in range(len(A.bidegrees)) if i != A.unit]
    exterior = len(gens) == 1 and not A.product(gens[0], gens[0])
    if not exterior:
        raise AnnularError(f"cotor(k, C, k) is not exterior on one class: bidegrees {sorted(dims)}")
    line = tangent_line(C, window)
    split = dims == {(0, 0): 1, (1, line.degree): 1}
    if not split:
        raise AnnularError("cotor(k, C, k) does not split as k plus the shifted tangent line")
    bar = bar_homology(A, window)
    by_degree = {n: 0 for n in range(window)}
    for (s, n), d in bar.items():
        by_degree[n] += d
    curve = {n: 0 for n in range(window)}
    for g in C.degrees:
        if g < window:
            curve[g] += 1
    return KoszulReport(dims, exterior, split, bar, by_degree, curve, window)


__all__ = [
    "AnnularError",
    "AnnularReport",
    "AttachingMap",
    "GradedAlgebra",
    "KoszulReport",
    "TangentLine",
    "TowerPage",
    "annular_stratum",
    "attaching_map",
    "bar_differential_squares_to_zero",
    "bar_homology",
    "composite_pinch",
    "coskeletal_page",
    "cotor_algebra",
    "koszul_roundtrip",
    "pinch_map",
    "tangent_line",
    "tensor_dims",
    "tensor_power_dims",
]
