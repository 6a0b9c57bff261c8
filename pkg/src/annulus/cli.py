"""Batch front end: one job per invocation, deterministic JSON or CSV artifacts.

    python3 -m annulus --config job.cfg --out result.json [--format csv] [--seed 7]

The config file holds ``key = value`` lines; ``#`` starts a comment.  Keys are
``job``, the job parameters (p, d, j, q, T, N, window, seed) and optionally
``out`` and ``format``; command-line flags win over the file.

Exit codes: 0 success, 2 validation error, 3 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import random
import sys
import tempfile
from dataclasses import dataclass, field
from math import comb

from . import annular, coalgebra, dieudonne, fgl, prolim, stabilizer
from .coeffring import ComplexError, build_field, build_witt

PARAM_KEYS = ("p", "d", "j", "q", "T", "N", "window", "seed")
CONFIG_KEYS = PARAM_KEYS + ("job", "out", "format")
CAVEATS = ["p >> d assumption not used at algebra level"]
PRIMES = (2, 3, 5, 7, 11, 13)


class ValidationError(ValueError):
    pass


class InvariantError(ArithmeticError):
    pass


@dataclass
class JobConfig:
    job: str
    params: dict = field(default_factory=dict)
    out: str | None = None
    format: str = "json"


# name -> (required, defaults, ranges); a default of None derives from other params
JOBS = {
    "cotor": (("p", "T"), {"d": 1, "j": 0, "window": None}, {"T": (2, 16), "j": (0, 3)}),
    "annular": (("p", "T"), {"d": 1, "j": 1, "q": None, "window": None}, {"T": (2, 12), "j": (0, 11), "q": (0, 11)}),
    "coskeletal": (("p", "T"), {"d": 1, "j": 1, "window": None}, {"T": (2, 12), "j": (0, 3)}),
    "koszul": (("p", "T"), {"d": 1, "window": None}, {"T": (2, 12)}),
    "fgl": (("p", "d", "T"), {"N": 2}, {"T": (1, 40), "N": (1, 6)}),
    "pseries": (("p", "d", "T"), {"j": 1, "N": 1}, {"T": (1, 4000), "j": (0, 3), "N": (1, 4)}),
    "det": (("p", "d", "N"), {"seed": 0}, {"N": (1, 6)}),
    "betastar": (("p", "d", "N"), {"seed": 0}, {"N": (1, 6)}),
    "dieudonne": (("p", "d"), {"j": 1, "q": None, "N": None}, {"j": (0, 4), "N": (1, 10)}),
    "prolim": (("p",), {"T": 6, "j": 3, "seed": 0}, {"T": (2, 8), "j": (1, 6)}),
}
COMMON_RANGES = {"d": (1, 4), "window": (1, 16), "seed": (0, 2**31 - 1), "q": (0, 11)}


# --- config parsing and validation ----------------------------------------------


def parse_config_text(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ValidationError(f"config line {lineno}: unknown key '{key}'")
        if key in out:
            raise ValidationError(f"config line {lineno}: duplicate key '{key}'")
        out[key] = value
    return out


def _as_int(name: str, value) -> int:
    try:
        return int(value)
    except (TypeError, ValueError):
        raise ValidationError(f"parameter '{name}' must be an integer, got {value!r}") from None


def validate_params(job: str, raw: dict) -> dict:
    if job not in JOBS:
        raise ValidationError(f"unknown job '{job}'; choose from {', '.join(sorted(JOBS))}")
    required, defaults, ranges = JOBS[job]
    allowed = set(required) | set(defaults)
    for key in raw:
        if key not in PARAM_KEYS:
            raise ValidationError(f"unknown key '{key}'")
        if key not in allowed:
            raise ValidationError(f"parameter '{key}' is not used by job {job}")
    for key in required:
        if key not in raw:
            raise ValidationError(f"missing required parameter '{key}' for job {job}")
    params = {key: _as_int(key, v) for key, v in raw.items()}
    for key, v in defaults.items():
        params.setdefault(key, v)
    if params["p"] not in PRIMES:
        raise ValidationError(f"parameter 'p' must be a prime in {list(PRIMES)}, got {params['p']}")
    # derived defaults
    if "window" in params and params["window"] is None:
        params["window"] = params["T"]
    if job == "annular" and params["q"] is None:
        params["q"] = params["j"]
    if job == "dieudonne":
        if params["q"] is None:
            params["q"] = params["d"]
        if params["N"] is None:
            params["N"] = max(params["j"], 1) + params["q"] - 1
    for key, v in params.items():
        lo, hi = ranges.get(key, COMMON_RANGES.get(key, (None, None)))
        if lo is not None and not lo <= v <= hi:
            raise ValidationError(f"parameter '{key}' = {v} is outside [{lo}, {hi}]")
    if "window" in params and params["window"] > params["T"]:
        raise ValidationError(f"parameter 'window' = {params['window']} exceeds T = {params['T']}")
    if job == "annular" and not params["j"] <= params["q"] < params["window"]:
        raise ValidationError("parameters need j <= q < window for the stratum C[j, q]")
    if job == "dieudonne":
        if not 1 <= params["q"] <= params["d"]:
            raise ValidationError(f"parameter 'q' = {params['q']} must lie in [1, d]")
        if params["N"] < params["j"] + params["q"] - 1:
            raise ValidationError(f"parameter 'N' = {params['N']} is below j + q - 1")
    return dict(sorted(params.items()))


# --- jobs ----------------------------------------------------------------------


def _curve(params: dict) -> coalgebra.GradedCoalgebra:
    return coalgebra.curve_coalgebra(build_field(params["p"], params["d"]), params["T"])


def _witt_list(a) -> list:
    return [int(x) for x in a]


def _job_cotor(P):
    C = _curve(P)
    w = P["window"]
    left = coalgebra.trivial_comodule(C) if P["j"] == 0 else coalgebra.cotensor_power(C, P["j"], w)
    res = coalgebra.cotor(left, C, coalgebra.trivial_comodule(C), w)
    # curve answer: exterior on a (1, 1) class for j = 0, else one class M^[]j / x in degree j
    if P["j"] == 0:
        expected = [[0, 0, 1], [1, 1, 1]] if w > 1 else [[0, 0, 1]]
    else:
        expected = [[0, P["j"], 1]] if P["j"] < w else []
    verdicts = {"matches_curve_answer": res.bigraded_dims() == expected}
    return res.bigraded_dims(), {"total": res.total()}, verdicts, w


def _job_annular(P):
    C = _curve(P)
    rep = annular.annular_stratum(C, P["j"], P["q"], P["window"])
    line = annular.tangent_line(C, P["window"])
    scalars = {"tangent_degree": line.degree, "total": sum(rep.dims.values())}
    verdicts = {}
    if P["j"] == P["q"]:
        power = annular.tensor_power_dims(line.dims, P["j"], P["window"])
        verdicts["matches_tangent_power"] = rep.dims == power
        verdicts["indicator"] = rep.dims == {g: int(g == P["j"] * line.degree) for g in rep.dims}
    return rep.bigraded_dims(), scalars, verdicts, P["window"]


def _job_coskeletal(P):
    C = _curve(P)
    w = P["window"]
    M = coalgebra.coideal(C)
    N = coalgebra.regular_cobimodule(C) if P["j"] == 0 else coalgebra.cotensor_power(C, P["j"], w)
    page = annular.coskeletal_page(M, C, N, window=w)
    scalars = {"stabilization": [[s, t0] for s, t0 in sorted(page.stabilization.items())]}
    verdicts = {"balanced": page.balanced, "stabilization_at_most_2": page.verdict(2)}
    return page.bigraded_dims(), scalars, verdicts, w


def _job_koszul(P):
    C = _curve(P)
    rep = annular.koszul_roundtrip(C, P["window"])
    verdicts = {"round_trip": rep.round_trip, "exterior": rep.exterior, "split_shape": rep.split_shape}
    return rep.bigraded_dims(), {}, verdicts, P["window"]


def _job_fgl(P):
    F = fgl.honda_fgl(P["p"], P["d"], P["T"], P["N"])
    ax = fgl.check_axioms(F)
    coeffs = F.series.monomials()
    verdicts = {k: bool(v) for k, v in sorted(ax.items())}
    if F.cap >= F.q:
        s = fgl.p_series(F, 1, reduced=True).series
        verdicts["p_series_is_x_to_q"] = s.monomials() == [[F.q, 1]]
    return [], {"coefficients": coeffs, "modulus": F.p**P["N"]}, verdicts, None


def _job_pseries(P):
    s = fgl.p_series_from_log(P["p"], P["d"], P["j"], P["T"], P["N"])
    scalars = {"coefficients": s.monomials(), "order": s.order(), "expected_order": (P["p"] ** P["d"]) ** P["j"]}
    verdicts = {"order_matches_height": s.order() == scalars["expected_order"]}
    return [], scalars, verdicts, None


def _random_unit(P):
    ctx = build_witt(P["p"], P["d"], P["N"])
    return stabilizer.random_unit(ctx, random.Random(P["seed"]))


def _job_det(P):
    g = _random_unit(P)
    ctx = g.ctx
    det = stabilizer.determinant(g)
    scalars = {"element": g.to_json()["coeffs"], "det": _witt_list(det), "det_scalar": stabilizer.determinant_scalar(g)}
    verdicts = {"sigma_fixed": ctx.sigma(det) == det, "unit": ctx.is_unit(det)}
    return [], scalars, verdicts, None


def _job_betastar(P):
    g = _random_unit(P)
    beta = stabilizer.beta_star_action(g)
    det = stabilizer.determinant(g)
    scalars = {"element": g.to_json()["coeffs"], "beta_star": _witt_list(beta)}
    return [], scalars, {"equals_det": beta == det}, None


def _job_dieudonne(P):
    M = dieudonne.honda_module(P["p"], P["d"], P["j"], P["N"])
    L = dieudonne.exterior_power(M, P["q"])
    height, order_exp = dieudonne.order_and_height(L)
    lie = dieudonne.lie_dimension(L)
    scalars = {
        "rank": L.rank,
        "lie_dimension": lie,
        "height": height,
        "order_exponent": order_exp,
        "F": [[_witt_list(a) for a in row] for row in L.F],
        "V": [[_witt_list(a) for a in row] for row in L.V],
    }
    verdicts = {
        "relations": L.relations_hold(),
        "lie_dimension_formula": lie == comb(P["d"] - 1, P["q"] - 1),
        "rank_formula": L.rank == comb(P["d"], P["q"]),
    }
    return [], scalars, verdicts, None


def _job_prolim(P):
    k = build_field(P["p"], 1)
    C = coalgebra.curve_coalgebra(k, P["T"])
    rng = random.Random(P["seed"])
    V = prolim.random_vector_tower(k, rng, P["j"], tail=rng.choice(prolim.TAILS))
    E = prolim.extend_tower(V, C)
    cb = prolim.cobar_derived_limits(E)
    tt = prolim.derived_limits(E, route="two-term")
    lhs, rhs = prolim.extension_commutes(V, C)
    ml = prolim.is_mittag_leffler(E)
    milnor = prolim.milnor_sequence(E)
    dims = [[s, n, d] for (s, n), d in sorted(cb.dims.items()) if d]
    scalars = {
        "tail": V.tail,
        "levels": [list(lv) for lv in V.levels],
        "limit": [[n, d] for n, d in sorted(prolim.tower_limit(E).dims.items())],
        "ml_offsets": [[n, o] for n, o in sorted(ml.offsets.items())],
    }
    verdicts = {
        "routes_agree": {x: v for x, v in cb.dims.items() if v} == {x: v for x, v in tt.items() if v},
        "higher_vanish": all(v == 0 for (s, _), v in cb.dims.items() if s >= 1),
        "milnor_exact": all(milnor.exact.values()),
        "mittag_leffler": all(ml.holds.values()),
        "extension_commutes": lhs == rhs,
    }
    return dims, scalars, verdicts, C.truncation


RUNNERS = {
    "cotor": _job_cotor,
    "annular": _job_annular,
    "coskeletal": _job_coskeletal,
    "koszul": _job_koszul,
    "fgl": _job_fgl,
    "pseries": _job_pseries,
    "det": _job_det,
    "betastar": _job_betastar,
    "dieudonne": _job_dieudonne,
    "prolim": _job_prolim,
}

INVARIANT_ERRORS = (
    fgl.IntegralityError,
    coalgebra.CotorObstruction,
    coalgebra.CoalgebraError,
    annular.AnnularError,
    dieudonne.DieudonneError,
    stabilizer.StabilizerError,
    prolim.TowerError,
    ComplexError,
    AssertionError,
)


def run_job(config: JobConfig) -> dict:
    """Validate and run; return the artifact as plain JSON data."""
    params = validate_params(config.job, config.params)
    try:
        dims, scalars, verdicts, window = RUNNERS[config.job](params)
    except INVARIANT_ERRORS as exc:
        raise InvariantError(f"{type(exc).__name__}: {exc}") from exc
    artifact = {
        "job": config.job,
        "params": params,
        "result": {"bigraded_dims": dims, "scalars": scalars, "verdicts": verdicts},
        "meta": {
            "window_valid_below": window,
            "precision": params.get("N"),
            "paper_caveats": list(CAVEATS),
        },
    }
    # normalise tuples and numpy scalars to plain JSON values
    return json.loads(json.dumps(artifact, default=int))


# --- emission ------------------------------------------------------------------


def render(artifact: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(artifact, indent=2, sort_keys=True) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "n", "dim"])
        w.writerows(artifact["result"]["bigraded_dims"])
        return buf.getvalue()
    raise ValidationError(f"unknown format '{fmt}'")


def write_atomic(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory):
        raise ValidationError(f"output directory does not exist: {directory}")
    try:
        fd, tmp = tempfile.mkstemp(dir=directory, prefix=".annulus-", suffix=".tmp")
    except OSError as exc:
        raise ValidationError(f"cannot write to {directory}: {exc.strerror}") from None
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except OSError as exc:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise ValidationError(f"cannot write {path}: {exc.strerror}") from None


def load_artifact(path: str):
    """JSON artifacts load as the dict ``run_job`` returned; CSV as [[s, n, dim], ...]."""
    with open(path, encoding="utf-8") as fh:
        if path.endswith(".csv"):
            rows = list(csv.reader(fh))
            return [[int(x) for x in r] for r in rows[1:]]
        return json.load(fh)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="annulus", description="Run one workbench job and write an artifact.")
    ap.add_argument("--config", required=True, help="key = value config file")
    ap.add_argument("--out", help="artifact path (overrides 'out' in the config)")
    ap.add_argument("--format", choices=("json", "csv"), help="artifact format (default json)")
    ap.add_argument("--seed", type=int, help="random seed (overrides 'seed' in the config)")
    return ap


def config_from_args(args) -> JobConfig:
    try:
        with open(args.config, encoding="utf-8") as fh:
            raw = parse_config_text(fh.read())
    except OSError as exc:
        raise ValidationError(f"cannot read config {args.config}: {exc.strerror}") from None
    job = raw.pop("job", None)
    if job is None:
        raise ValidationError("missing required key 'job'")
    out = args.out or raw.pop("out", None)
    raw.pop("out", None)
    fmt = args.format or raw.pop("format", None) or "json"
    raw.pop("format", None)
    if fmt not in ("json", "csv"):
        raise ValidationError(f"unknown format '{fmt}'")
    if out is None:
        raise ValidationError("missing output path: pass --out or set 'out'")
    if args.seed is not None and job in JOBS and "seed" in JOBS[job][1]:
        raw["seed"] = args.seed
    return JobConfig(job, raw, out, fmt)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = config_from_args(args)
        artifact = run_job(config)
        write_atomic(config.out, render(artifact, config.format))
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InvariantError as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
