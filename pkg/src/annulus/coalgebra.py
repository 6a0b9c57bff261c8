"""Graded coalgebras, comodules, the normalized cobar complex, Cotor and cotensor powers.

Coalgebras are given by structure constants on a finite basis with one
distinguished grouplike element ``eta``.  The reduced part F = ker(counit) is
handled in the adapted basis {b - counit(b) eta : b != eta}; in that basis the
projection C -> F simply drops every term involving ``eta``, which is how the
normalized cobar differential below is assembled.

Internal degree is the collapsed (halved) topological degree, so beta_i of
the formal curve sits in degree i.  Only internal degrees below a declared
``window`` are ever computed; the truncated curve agrees with the untruncated
one there because every differential preserves internal degree.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

from .coeffring import CochainComplex, Echelon, FiniteFieldCtx, GradedMatrix, SparseMatrix, kernel_basis, rref


class CoalgebraError(ValueError):
    pass


class CotorObstruction(ArithmeticError):
    """Nonzero higher Cotor where a formal curve would have none."""


@dataclass(frozen=True, eq=False)
class GradedCoalgebra:
    field: FiniteFieldCtx
    labels: tuple
    degrees: tuple
    delta: dict  # i -> ((j, k, coeff), ...) meaning Delta(b_i) = sum coeff b_j (x) b_k
    counit: dict  # i -> coeff
    eta: int
    truncation: int
    _cache: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        return f"GradedCoalgebra(dim={len(self)}, truncation={self.truncation}, p={self.field.p}, d={self.field.d})"

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def by_degree(self) -> dict:
        out = defaultdict(list)
        for i, g in enumerate(self.degrees):
            out[g].append(i)
        return dict(out)

    @property
    def reduced_indices(self) -> list:
        return [i for i in range(len(self)) if i != self.eta]

    def reduced_delta(self, i: int) -> list:
        """Reduced comultiplication of b_i - counit(b_i) eta, in the adapted basis."""
        return [(j, k, c) for j, k, c in self.delta.get(i, ()) if j != self.eta and k != self.eta]

    def validate(self) -> None:
        k = self.field
        if self.degrees[self.eta] != 0:
            raise CoalgebraError("coaugmentation must sit in degree 0")
        if self.counit.get(self.eta) != k.one:
            raise CoalgebraError("counit(eta) must be 1")
        if _clean(k, self.delta.get(self.eta, ())) != {(self.eta, self.eta): k.one}:
            raise CoalgebraError("eta is not grouplike")
        for i in range(len(self)):
            terms = self.delta.get(i, ())
            for j, kk, _ in terms:
                if self.degrees[j] + self.degrees[kk] != self.degrees[i]:
                    raise CoalgebraError(f"comultiplication of {self.labels[i]} is not degree preserving")
            left, right = defaultdict(int), defaultdict(int)
            for j, kk, c in terms:
                e = self.counit.get(j, 0)
                if e:
                    left[kk] = k.add(left[kk], k.mul(e, c))
                e = self.counit.get(kk, 0)
                if e:
                    right[j] = k.add(right[j], k.mul(e, c))
            ident = {i: k.one}
            if _nonzero(left) != ident or _nonzero(right) != ident:
                raise CoalgebraError(f"counit axiom fails on {self.labels[i]}")
            lhs, rhs = defaultdict(int), defaultdict(int)
            for j, kk, c in terms:
                for a, b, c2 in self.delta.get(j, ()):
                    lhs[(a, b, kk)] = k.add(lhs[(a, b, kk)], k.mul(c, c2))
                for a, b, c2 in self.delta.get(kk, ()):
                    rhs[(j, a, b)] = k.add(rhs[(j, a, b)], k.mul(c, c2))
            if _nonzero(lhs) != _nonzero(rhs):
                raise CoalgebraError(f"coassociativity fails on {self.labels[i]}")


def _nonzero(d: dict) -> dict:
    return {key: v for key, v in d.items() if v}


def _clean(k, terms) -> dict:
    acc = defaultdict(int)
    for j, kk, c in terms:
        acc[(j, kk)] = k.add(acc[(j, kk)], c)
    return _nonzero(acc)


def curve_coalgebra(field: FiniteFieldCtx, T: int, generator_degree: int = 1) -> GradedCoalgebra:
    """Divided-power coalgebra on beta_0..beta_{T-1}, dual to k[x]/x^T.

    ``generator_degree`` rescales the grading (beta_i in degree
    i * generator_degree); the default is the formal affine line.
    """
    if not isinstance(T, int) or T < 1:
        raise CoalgebraError(f"truncation T must be >= 1, got {T!r}")
    if generator_degree < 1:
        raise CoalgebraError("generator degree must be positive")
    one = field.one
    labels = tuple(f"b{i}" for i in range(T))
    degrees = tuple(i * generator_degree for i in range(T))
    delta = {n: tuple((i, n - i, one) for i in range(n + 1)) for n in range(T)}
    C = GradedCoalgebra(field, labels, degrees, delta, {0: one}, 0, T * generator_degree)
    return C


def dual_algebra(C: GradedCoalgebra) -> dict:
    """Multiplication table of the linear dual: (j, k) -> {i: coeff}.

    x_j * x_k evaluated on b_i is the coefficient of b_j (x) b_k in Delta(b_i).
    """
    table = defaultdict(dict)
    k = C.field
    for i, terms in C.delta.items():
        for j, kk, c in terms:
            row = table[(j, kk)]
            row[i] = k.add(row.get(i, 0), c)
    return {key: {i: v for i, v in row.items() if v} for key, row in table.items()}


def cotangent_dims(C: GradedCoalgebra, window: int) -> dict:
    """dim (m / m^2) per degree for the dual algebra, m = annihilator of eta."""
    k = C.field
    table = dual_algebra(C)
    reduced = C.reduced_indices
    out = {}
    for n in range(window):
        basis = [i for i in reduced if C.degrees[i] == n]
        if not basis:
            out[n] = 0
            continue
        pos = {b: t for t, b in enumerate(basis)}
        squares = []
        for a in reduced:
            for b in reduced:
                if C.degrees[a] + C.degrees[b] == n:
                    prod = table.get((a, b), {})
                    # dual basis element x_i for i != eta spans m in the adapted sense
                    vec = {pos[i]: v for i, v in prod.items() if i in pos}
                    if vec:
                        squares.append(vec)
        out[n] = len(basis) - len(rref(k, squares))
    return out


# --- comodules --------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class GradedComodule:
    """Comodule or cobimodule over ``coalgebra``.

    ``right[m]`` lists (m', c, coeff) with psi_R(m) = sum coeff m' (x) c and
    ``left[m]`` lists (c, m', coeff) with psi_L(m) = sum coeff c (x) m'.
    ``embedding`` optionally records each basis vector as a vector in an
    ambient tensor space (used for cotensor products).
    """

    coalgebra: GradedCoalgebra
    labels: tuple
    degrees: tuple
    right: dict | None = None
    left: dict | None = None
    embedding: dict | None = field(default=None, repr=False)
    name: str = ""
    _cache: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return len(self.labels)

    def __repr__(self) -> str:
        sides = "".join(s for s, c in (("L", self.left), ("R", self.right)) if c is not None)
        return f"GradedComodule({self.name or '?'}, dim={len(self)}, sides={sides})"

    def dims(self, window: int) -> dict:
        out = {n: 0 for n in range(window)}
        for g in self.degrees:
            if 0 <= g < window:
                out[g] += 1
        return out

    def by_degree(self) -> dict:
        out = defaultdict(list)
        for i, g in enumerate(self.degrees):
            out[g].append(i)
        return dict(out)

    def validate(self) -> None:
        C = self.coalgebra
        k = C.field
        if self.right is None and self.left is None:
            raise CoalgebraError("comodule has no coaction")
        for m in range(len(self)):
            if self.right is not None:
                terms = self.right.get(m, ())
                for mm, c, _ in terms:
                    if self.degrees[mm] + C.degrees[c] != self.degrees[m]:
                        raise CoalgebraError(f"right coaction on {self.labels[m]} not degree preserving")
                counit = defaultdict(int)
                for mm, c, coeff in terms:
                    e = C.counit.get(c, 0)
                    if e:
                        counit[mm] = k.add(counit[mm], k.mul(e, coeff))
                if _nonzero(counit) != {m: k.one}:
                    raise CoalgebraError(f"right counit axiom fails on {self.labels[m]}")
                lhs, rhs = defaultdict(int), defaultdict(int)
                for mm, c, coeff in terms:
                    for m2, c2, coeff2 in self.right.get(mm, ()):
                        lhs[(m2, c2, c)] = k.add(lhs[(m2, c2, c)], k.mul(coeff, coeff2))
                    for a, b, coeff2 in C.delta.get(c, ()):
                        rhs[(mm, a, b)] = k.add(rhs[(mm, a, b)], k.mul(coeff, coeff2))
                if _nonzero(lhs) != _nonzero(rhs):
                    raise CoalgebraError(f"right coaction not coassociative on {self.labels[m]}")
            if self.left is not None:
                terms = self.left.get(m, ())
                for c, mm, _ in terms:
                    if self.degrees[mm] + C.degrees[c] != self.degrees[m]:
                        raise CoalgebraError(f"left coaction on {self.labels[m]} not degree preserving")
                counit = defaultdict(int)
                for c, mm, coeff in terms:
                    e = C.counit.get(c, 0)
                    if e:
                        counit[mm] = k.add(counit[mm], k.mul(e, coeff))
                if _nonzero(counit) != {m: k.one}:
                    raise CoalgebraError(f"left counit axiom fails on {self.labels[m]}")
                lhs, rhs = defaultdict(int), defaultdict(int)
                for c, mm, coeff in terms:
                    for c2, m2, coeff2 in self.left.get(mm, ()):
                        lhs[(c, c2, m2)] = k.add(lhs[(c, c2, m2)], k.mul(coeff, coeff2))
                    for a, b, coeff2 in C.delta.get(c, ()):
                        rhs[(a, b, mm)] = k.add(rhs[(a, b, mm)], k.mul(coeff, coeff2))
                if _nonzero(lhs) != _nonzero(rhs):
                    raise CoalgebraError(f"left coaction not coassociative on {self.labels[m]}")
            if self.left is not None and self.right is not None:
                lr, rl = defaultdict(int), defaultdict(int)
                for mm, c, coeff in self.right.get(m, ()):
                    for c2, m2, coeff2 in self.left.get(mm, ()):
                        lr[(c2, m2, c)] = k.add(lr[(c2, m2, c)], k.mul(coeff, coeff2))
                for c, mm, coeff in self.left.get(m, ()):
                    for m2, c2, coeff2 in self.right.get(mm, ()):
                        rl[(c, m2, c2)] = k.add(rl[(c, m2, c2)], k.mul(coeff, coeff2))
                if _nonzero(lr) != _nonzero(rl):
                    raise CoalgebraError(f"left and right coactions do not commute on {self.labels[m]}")


def trivial_comodule(C: GradedCoalgebra) -> GradedComodule:
    """The ground field as a cobimodule through the coaugmentation."""
    one = C.field.one
    return GradedComodule(C, ("1",), (0,), {0: ((0, C.eta, one),)}, {0: ((C.eta, 0, one),)}, name="k")


def regular_cobimodule(C: GradedCoalgebra) -> GradedComodule:
    """C coacting on itself on both sides through Delta."""
    right = {i: tuple((j, kk, c) for j, kk, c in C.delta.get(i, ())) for i in range(len(C))}
    left = {i: tuple((j, kk, c) for j, kk, c in C.delta.get(i, ())) for i in range(len(C))}
    return GradedComodule(C, C.labels, C.degrees, right, left, name="C")


def coideal(C: GradedCoalgebra) -> GradedComodule:
    """M = C / span(eta) with the induced left and right coactions."""
    if not 0 <= C.eta < len(C):
        raise CoalgebraError("coalgebra has no coaugmentation")
    keep = C.reduced_indices
    pos = {b: t for t, b in enumerate(keep)}
    right, left = {}, {}
    for t, b in enumerate(keep):
        right[t] = tuple((pos[j], kk, c) for j, kk, c in C.delta.get(b, ()) if j in pos)
        left[t] = tuple((j, pos[kk], c) for j, kk, c in C.delta.get(b, ()) if kk in pos)
    M = GradedComodule(
        C,
        tuple(f"{C.labels[b]}~" for b in keep),
        tuple(C.degrees[b] for b in keep),
        right,
        left,
        name="M",
    )
    M._cache["projection"] = {b: {pos[b]: C.field.one} for b in keep}
    return M


def reduced_diagonals(M: GradedComodule, projection: dict) -> tuple[dict, dict]:
    """(Delta~_L, Delta~_R) of a cobimodule with a cobimodule map pi: C -> M.

    Each is returned as m -> {(m1, m2): coeff}.
    """
    k = M.coalgebra.field
    dl, dr = {}, {}
    for m in range(len(M)):
        acc = defaultdict(int)
        for mm, c, coeff in (M.right or {}).get(m, ()):
            for t, v in projection.get(c, {}).items():
                acc[(mm, t)] = k.add(acc[(mm, t)], k.mul(coeff, v))
        dr[m] = _nonzero(acc)
        acc = defaultdict(int)
        for c, mm, coeff in (M.left or {}).get(m, ()):
            for t, v in projection.get(c, {}).items():
                acc[(t, mm)] = k.add(acc[(t, mm)], k.mul(coeff, v))
        dl[m] = _nonzero(acc)
    return dl, dr


# --- cobar complex ------------------------------------------------------------


@dataclass
class CobarComplex:
    """Omega(M; C; N) restricted to internal degrees below ``window``.

    ``bases[s][n]`` lists the basis tuples (m, f_1, ..., f_s, y) of
    M (x) F^s (x) N in degree n; ``complex`` carries d^0 .. d^{s_max-1}.
    """

    M: GradedComodule
    C: GradedCoalgebra
    N: GradedComodule
    s_max: int
    window: int
    bases: dict
    index: dict
    complex: CochainComplex

    def dim(self, s: int, n: int) -> int:
        return len(self.bases.get(s, {}).get(n, ()))

    def dims(self) -> dict:
        return {(s, n): len(b) for s, row in self.bases.items() for n, b in row.items()}

    def differential(self, s: int) -> GradedMatrix:
        return self.complex.differential(s)


def _group(degrees, window) -> dict:
    out = defaultdict(list)
    for i, g in enumerate(degrees):
        if g < window:
            out[g].append(i)
    return out


def _reduced_tuples(C: GradedCoalgebra, s_max: int, window: int) -> list:
    """For each s, degree -> sorted list of s-tuples of reduced basis indices."""
    F = _group([C.degrees[i] if i != C.eta else window for i in range(len(C))], window)
    levels = [{0: [()]}]
    for _ in range(s_max + 1):
        prev = levels[-1]
        nxt = defaultdict(list)
        for e, tuples in prev.items():
            for g, fs in F.items():
                if e + g < window:
                    for t in tuples:
                        for f in fs:
                            nxt[e + g].append(t + (f,))
        levels.append({g: sorted(v) for g, v in nxt.items()})
    return levels


def cobar(M: GradedComodule, C: GradedCoalgebra, N: GradedComodule, s_max: int, window: int,
          validate: bool = True) -> CobarComplex:
    """Normalized two-sided cobar complex, terms s = 0..s_max."""
    if s_max < 0:
        raise CoalgebraError("s_max must be >= 0")
    if window > C.truncation:
        raise CoalgebraError(f"window {window} exceeds truncation {C.truncation}")
    if M.right is None:
        raise CoalgebraError("left factor needs a right coaction")
    if N.left is None:
        raise CoalgebraError("right factor needs a left coaction")
    if M.coalgebra is not C or N.coalgebra is not C:
        raise CoalgebraError("comodules are over a different coalgebra")
    if validate:
        C.validate()
        M.validate()
        N.validate()
    k = C.field
    eta = C.eta
    Mg, Ng = _group(M.degrees, window), _group(N.degrees, window)
    Fs = _reduced_tuples(C, s_max, window)
    bases, index = {}, {}
    for s in range(s_max + 1):
        bases[s] = {}
        for n in range(window):
            terms = []
            for dm, ms in Mg.items():
                for e, ts in Fs[s].items():
                    dn = n - dm - e
                    if dn < 0 or dn not in Ng:
                        continue
                    for m in ms:
                        for t in ts:
                            for y in Ng[dn]:
                                terms.append((m,) + t + (y,))
            terms.sort()
            if terms:
                bases[s][n] = terms
        index[s] = {n: {t: i for i, t in enumerate(b)} for n, b in bases[s].items()}

    psiR = {m: [(mm, c, v) for mm, c, v in M.right.get(m, ()) if c != eta] for m in range(len(M))}
    psiL = {y: [(c, yy, v) for c, yy, v in N.left.get(y, ()) if c != eta] for y in range(len(N))}
    dbar = {i: C.reduced_delta(i) for i in C.reduced_indices}
    neg = k.neg

    diffs = {}
    for s in range(s_max):
        blocks = {}
        src_dims = {n: len(b) for n, b in bases[s].items()}
        tgt_dims = {n: len(b) for n, b in bases[s + 1].items()}
        for n, src in bases[s].items():
            tgt_index = index[s + 1].get(n, {})
            cols = []
            for x in src:
                col = defaultdict(int)
                m, fs, y = x[0], x[1:-1], x[-1]
                for mm, c, v in psiR[m]:
                    key = tgt_index[(mm, c) + fs + (y,)]
                    col[key] = k.add(col[key], v)
                for i, f in enumerate(fs, start=1):
                    sign_neg = i % 2 == 1
                    for a, b, v in dbar[f]:
                        key = tgt_index[(m,) + fs[: i - 1] + (a, b) + fs[i:] + (y,)]
                        col[key] = k.add(col[key], neg(v) if sign_neg else v)
                sign_neg = (s + 1) % 2 == 1
                for c, yy, v in psiL[y]:
                    key = tgt_index[(m,) + fs + (c, yy)]
                    col[key] = k.add(col[key], neg(v) if sign_neg else v)
                cols.append({r: v for r, v in col.items() if v})
            mat = SparseMatrix(len(cols), tgt_dims.get(n, 0), cols).transpose()
            blocks[n] = mat
        diffs[s] = GradedMatrix(k, src_dims, tgt_dims, blocks)
    dims = {s: {n: len(b) for n, b in bases[s].items()} for s in bases}
    cx = CochainComplex(k, dims, diffs)
    return CobarComplex(M, C, N, s_max, window, bases, index, cx)


@dataclass
class CotorResult:
    """Cotor^{s,n} for s < s_max and n < valid_below, with representatives."""

    dims: dict  # (s, n) -> dim
    representatives: dict  # (s, n) -> list of sparse vectors in the cobar basis
    cobar: CobarComplex
    valid_below: int

    def dim(self, s: int, n: int) -> int:
        return self.dims.get((s, n), 0)

    def bigraded_dims(self) -> list:
        return [[s, n, d] for (s, n), d in sorted(self.dims.items()) if d]

    def total(self) -> int:
        return sum(self.dims.values())


def cotor(M: GradedComodule, C: GradedCoalgebra, N: GradedComodule, window: int,
          s_max: int | None = None, check: bool = True) -> CotorResult:
    """Cohomology of the cobar complex; the s = 0 part is the cotensor product.

    With F concentrated in degrees >= 1 no class with s >= window can occur in
    degrees below window, so ``s_max`` defaults to ``window``.
    """
    if s_max is None:
        s_max = window
    cb = cobar(M, C, N, s_max + 1, window)
    if check:
        cb.complex.check()
    dims, reps = {}, {}
    for s in range(s_max + 1):
        for n in range(window):
            h = cb.complex.homology_at(s, n)
            dims[(s, n)] = h.dim
            if h.dim:
                reps[(s, n)] = h.representatives
    return CotorResult(dims, reps, cb, window)


def cotensor(M: GradedComodule, C: GradedCoalgebra, N: GradedComodule, window: int,
             name: str = "") -> GradedComodule:
    """M []_C N = ker d^0, with the left coaction of M and the right coaction of N."""
    cb = cobar(M, C, N, 1, window)
    k = C.field
    d0 = cb.differential(0)
    echelons, labels, degrees, embedding = {}, [], [], {}
    offsets = {}
    for n in range(window):
        src = cb.bases[0].get(n, [])
        if not src:
            continue
        ker = kernel_basis(k, d0.block(n))
        e = Echelon(k)
        for v in ker:
            e.add(v)
        echelons[n] = e
        offsets[n] = len(labels)
        for t, v in enumerate(e.basis()):
            idx = len(labels)
            labels.append(f"{name or 'X'}[{n}.{t}]")
            degrees.append(n)
            embedding[idx] = {src[col]: val for col, val in v.items()}

    def express(n: int, vec: dict) -> dict:
        """Coordinates (global basis indices) of an ambient vector in degree n."""
        if not vec:
            return {}
        if n not in echelons:
            raise ValueError(f"vector does not lie in the cotensor product (degree {n} is zero)")
        pos = cb.index[0][n]
        sparse = {pos[key]: v for key, v in vec.items() if v}
        coords = echelons[n].coordinates(sparse)
        return {offsets[n] + t: c for t, c in enumerate(coords) if c}

    left = None
    if M.left is not None:
        left = {}
        for idx, vec in embedding.items():
            by_c = defaultdict(lambda: defaultdict(int))
            for (m, y), a in vec.items():
                for c, mm, v in M.left.get(m, ()):
                    acc = by_c[c]
                    acc[(mm, y)] = k.add(acc[(mm, y)], k.mul(a, v))
            terms = []
            for c in sorted(by_c):
                coords = express(degrees[idx] - C.degrees[c], _nonzero(by_c[c]))
                terms.extend((c, j, v) for j, v in sorted(coords.items()))
            left[idx] = tuple(terms)
    right = None
    if N.right is not None:
        right = {}
        for idx, vec in embedding.items():
            by_c = defaultdict(lambda: defaultdict(int))
            for (m, y), a in vec.items():
                for yy, c, v in N.right.get(y, ()):
                    acc = by_c[c]
                    acc[(m, yy)] = k.add(acc[(m, yy)], k.mul(a, v))
            terms = []
            for c in sorted(by_c):
                coords = express(degrees[idx] - C.degrees[c], _nonzero(by_c[c]))
                terms.extend((j, c, v) for j, v in sorted(coords.items()))
            right[idx] = tuple(terms)
    X = GradedComodule(C, tuple(labels), tuple(degrees), right, left, embedding, name=name)
    X._cache["factors"] = (M, N)
    X._cache["express"] = express
    return X


def cotensor_coordinates(X: GradedComodule, n: int, vec: dict) -> dict:
    """Coordinates of a vector of the ambient M (x) N (keys (m, y)) in the basis of X = M []_C N."""
    if "express" not in X._cache:
        raise CoalgebraError("comodule was not built by cotensor()")
    return X._cache["express"](n, vec)


def cotensor_power(C: GradedCoalgebra, j: int, window: int, check: bool = True) -> GradedComodule:
    """M^{[]j} for M = coideal(C), built as (M^{[](j-1)}) []_C M.

    Raises :class:`CotorObstruction` if a higher Cotor group met on the way is
    nonzero below ``window``, which cannot happen for a formal curve.
    """
    if j < 0:
        raise CoalgebraError("cotensor exponent must be >= 0")
    key = ("power", j, window)
    if key in C._cache:
        return C._cache[key]
    if j == 0:
        X = regular_cobimodule(C)
    elif j == 1:
        X = coideal(C)
    else:
        prev = cotensor_power(C, j - 1, window, check)
        M = cotensor_power(C, 1, window, check)
        if check:
            res = cotor(prev, C, M, window)
            bad = [(s, n) for (s, n), dim in res.dims.items() if s >= 1 and dim]
            if bad:
                raise CotorObstruction(f"Cotor^{bad[0][0]} nonzero in degree {bad[0][1]} while forming M^[]{j}")
        X = cotensor(prev, C, M, window, name=f"M^{j}")
    C._cache[key] = X
    return X


# --- serialization ------------------------------------------------------------


def coalgebra_to_json(C: GradedCoalgebra) -> dict:
    return {
        "basis": [{"label": lab, "degree": g} for lab, g in zip(C.labels, C.degrees)],
        "delta": [[i, j, kk, c] for i in sorted(C.delta) for j, kk, c in C.delta[i]],
        "counit": [[i, c] for i, c in sorted(C.counit.items())],
        "eta": C.labels[C.eta],
        "truncation": C.truncation,
        "field": {"p": C.field.p, "d": C.field.d},
    }


def coalgebra_from_json(obj: dict, field: FiniteFieldCtx | None = None) -> GradedCoalgebra:
    from .coeffring import build_field

    if field is None:
        f = obj.get("field", {})
        field = build_field(f["p"], f.get("d", 1))
    labels = tuple(b["label"] for b in obj["basis"])
    degrees = tuple(int(b["degree"]) for b in obj["basis"])
    delta = defaultdict(list)
    for i, j, kk, c in obj["delta"]:
        delta[i].append((j, kk, c))
    delta = {i: tuple(v) for i, v in delta.items()}
    counit = {i: c for i, c in obj["counit"]}
    eta = labels.index(obj["eta"])
    C = GradedCoalgebra(field, labels, degrees, delta, counit, eta, int(obj["truncation"]))
    C.validate()
    return C


def comodule_to_json(M: GradedComodule) -> dict:
    out = {"basis": [{"label": lab, "degree": g} for lab, g in zip(M.labels, M.degrees)]}
    if M.right is not None:
        out["right"] = [[m, mm, c, v] for m in sorted(M.right) for mm, c, v in M.right[m]]
    if M.left is not None:
        out["left"] = [[m, c, mm, v] for m in sorted(M.left) for c, mm, v in M.left[m]]
    return out


def comodule_from_json(obj: dict, C: GradedCoalgebra) -> GradedComodule:
    labels = tuple(b["label"] for b in obj["basis"])
    degrees = tuple(int(b["degree"]) for b in obj["basis"])
    right = left = None
    if "right" in obj:
        right = defaultdict(list)
        for m, mm, c, v in obj["right"]:
            right[m].append((mm, c, v))
        right = {m: tuple(v) for m, v in right.items()}
    if "left" in obj:
        left = defaultdict(list)
        for m, c, mm, v in obj["left"]:
            left[m].append((c, mm, v))
        left = {m: tuple(v) for m, v in left.items()}
    M = GradedComodule(C, labels, degrees, right, left)
    M.validate()
    return M


__all__ = [
    "CoalgebraError",
    "CobarComplex",
    "CotorObstruction",
    "CotorResult",
    "GradedCoalgebra",
    "GradedComodule",
    "coalgebra_from_json",
    "coalgebra_to_json",
    "cobar",
    "comodule_from_json",
    "comodule_to_json",
    "coideal",
    "cotangent_dims",
    "cotensor",
    "cotensor_coordinates",
    "cotensor_power",
    "cotor",
    "curve_coalgebra",
    "dual_algebra",
    "reduced_diagonals",
    "regular_cobimodule",
    "trivial_comodule",
]
