import json
import subprocess
import sys

import pytest

from annulus import cli
from annulus.cli import JobConfig, ValidationError, load_artifact, parse_config_text, render, run_job, validate_params
from annulus.coalgebra import cotor, curve_coalgebra, trivial_comodule
from annulus.coeffring import build_field
from annulus.fgl import IntegralityError

SAMPLE_JOBS = {
    "cotor": {"p": 3, "d": 1, "T": 8, "window": 8},
    "annular": {"p": 3, "T": 8, "j": 2, "q": 2},
    "coskeletal": {"p": 3, "T": 6, "j": 1},
    "koszul": {"p": 2, "T": 6},
    "fgl": {"p": 3, "d": 1, "T": 6},
    "pseries": {"p": 2, "d": 2, "T": 20, "j": 2},
    "det": {"p": 3, "d": 2, "N": 2, "seed": 4},
    "betastar": {"p": 3, "d": 2, "N": 2, "seed": 4},
    "dieudonne": {"p": 3, "d": 3, "j": 1, "q": 2},
    "prolim": {"p": 3, "T": 5, "j": 3, "seed": 2},
}


def _write_config(path, job, params, extra=""):
    lines = [f"job = {job}"] + [f"{k} = {v}" for k, v in params.items()]
    path.write_text("\n".join(lines) + "\n" + extra)
    return str(path)


# --- config parsing ------------------------------------------------------------------------


def test_parse_config_text():
    raw = parse_config_text("# comment\njob = cotor\np = 3  # trailing\n\nT=8\n")
    assert raw == {"job": "cotor", "p": "3", "T": "8"}


@pytest.mark.parametrize("text", ["p 3", "colour = red", "p = 3\np = 5"])
def test_parse_config_errors(text):
    with pytest.raises(ValidationError):
        parse_config_text(text)


def test_validate_params_defaults_and_errors():
    params = validate_params("cotor", {"p": "3", "T": "8"})
    assert params == {"T": 8, "d": 1, "j": 0, "p": 3, "window": 8}
    with pytest.raises(ValidationError, match="'p'"):
        validate_params("cotor", {"T": "8"})
    with pytest.raises(ValidationError, match="unknown job"):
        validate_params("nope", {})
    with pytest.raises(ValidationError, match="outside"):
        validate_params("cotor", {"p": 3, "T": 40})
    with pytest.raises(ValidationError, match="prime"):
        validate_params("cotor", {"p": 4, "T": 8})
    with pytest.raises(ValidationError, match="not used"):
        validate_params("koszul", {"p": 3, "T": 8, "seed": 1})
    with pytest.raises(ValidationError, match="integer"):
        validate_params("cotor", {"p": "three", "T": 8})
    with pytest.raises(ValidationError, match="window"):
        validate_params("cotor", {"p": 3, "T": 6, "window": 8})


# --- jobs ------------------------------------------------------------------------------------


def test_cotor_artifact_matches_library():
    art = run_job(JobConfig("cotor", dict(SAMPLE_JOBS["cotor"])))
    C = curve_coalgebra(build_field(3, 1), 8)
    k = trivial_comodule(C)
    assert art["result"]["bigraded_dims"] == cotor(k, C, k, 8).bigraded_dims()
    assert art["meta"]["window_valid_below"] == 8
    assert art["meta"]["paper_caveats"] == ["p >> d assumption not used at algebra level"]


@pytest.mark.parametrize("job", sorted(SAMPLE_JOBS))
def test_every_job_runs_with_passing_verdicts(job):
    art = run_job(JobConfig(job, dict(SAMPLE_JOBS[job])))
    assert set(art) == {"job", "params", "result", "meta"}
    assert set(art["result"]) == {"bigraded_dims", "scalars", "verdicts"}
    assert set(art["meta"]) == {"window_valid_below", "precision", "paper_caveats"}
    assert all(art["result"]["verdicts"].values()), art["result"]["verdicts"]


def test_dieudonne_job_values():
    art = run_job(JobConfig("dieudonne", {"p": 3, "d": 3, "j": 1, "q": 2}))
    sc = art["result"]["scalars"]
    assert sc["rank"] == 3 and sc["lie_dimension"] == 2 and sc["order_exponent"] == 3


def test_invariant_violation_maps_to_exit_3(tmp_path, monkeypatch):
    def broken(params):
        raise IntegralityError("forced")

    monkeypatch.setitem(cli.RUNNERS, "fgl", broken)
    cfg = _write_config(tmp_path / "c.cfg", "fgl", {"p": 3, "d": 1, "T": 4})
    assert cli.main(["--config", cfg, "--out", str(tmp_path / "o.json")]) == 3
    assert not (tmp_path / "o.json").exists()


# --- files and exit codes ------------------------------------------------------------------------


def test_main_writes_json_and_round_trips(tmp_path):
    cfg = _write_config(tmp_path / "c.cfg", "cotor", SAMPLE_JOBS["cotor"])
    out = tmp_path / "a.json"
    assert cli.main(["--config", cfg, "--out", str(out)]) == 0
    loaded = load_artifact(str(out))
    assert loaded == run_job(JobConfig("cotor", dict(SAMPLE_JOBS["cotor"])))
    assert render(loaded, "json") == out.read_text()


def test_rerun_is_byte_identical(tmp_path):
    cfg = _write_config(tmp_path / "c.cfg", "prolim", {"p": 3, "T": 5})
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["--config", cfg, "--out", str(a), "--seed", "11"]) == 0
    assert cli.main(["--config", cfg, "--out", str(b), "--seed", "11"]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert json.loads(a.read_text())["params"]["seed"] == 11


def test_csv_matches_json_dims(tmp_path):
    for job in ("cotor", "coskeletal", "prolim"):
        cfg = _write_config(tmp_path / f"{job}.cfg", job, SAMPLE_JOBS[job])
        js, cs = tmp_path / f"{job}.json", tmp_path / f"{job}.csv"
        assert cli.main(["--config", cfg, "--out", str(js)]) == 0
        assert cli.main(["--config", cfg, "--out", str(cs), "--format", "csv"]) == 0
        assert cs.read_text().splitlines()[0] == "s,n,dim"
        assert load_artifact(str(cs)) == load_artifact(str(js))["result"]["bigraded_dims"]


def test_config_out_and_format_keys(tmp_path):
    out = tmp_path / "from_config.csv"
    cfg = _write_config(tmp_path / "c.cfg", "koszul", SAMPLE_JOBS["koszul"], f"out = {out}\nformat = csv\n")
    assert cli.main(["--config", cfg]) == 0
    assert out.read_text().startswith("s,n,dim\n")


def test_missing_field_exits_2_and_names_it(tmp_path, capsys):
    cfg = _write_config(tmp_path / "c.cfg", "cotor", {"T": 8})
    assert cli.main(["--config", cfg, "--out", str(tmp_path / "x.json")]) == 2
    err = capsys.readouterr().err.strip()
    assert "'p'" in err and len(err.splitlines()) == 1
    assert not (tmp_path / "x.json").exists()


def test_unknown_key_and_job_exit_2(tmp_path):
    cfg = _write_config(tmp_path / "c.cfg", "cotor", {"p": 3, "T": 8, "colour": 1})
    assert cli.main(["--config", cfg, "--out", str(tmp_path / "x.json")]) == 2
    cfg = _write_config(tmp_path / "d.cfg", "nope", {"p": 3})
    assert cli.main(["--config", cfg, "--out", str(tmp_path / "x.json")]) == 2
    no_job = tmp_path / "e.cfg"
    no_job.write_text("p = 3\n")
    assert cli.main(["--config", str(no_job), "--out", str(tmp_path / "x.json")]) == 2


def test_missing_output_and_config(tmp_path):
    cfg = _write_config(tmp_path / "c.cfg", "cotor", SAMPLE_JOBS["cotor"])
    assert cli.main(["--config", cfg]) == 2
    assert cli.main(["--config", str(tmp_path / "absent.cfg"), "--out", str(tmp_path / "x.json")]) == 2


def test_unwritable_path_exits_2(tmp_path):
    cfg = _write_config(tmp_path / "c.cfg", "cotor", SAMPLE_JOBS["cotor"])
    assert cli.main(["--config", cfg, "--out", str(tmp_path / "no" / "such" / "dir.json")]) == 2
    blocker = tmp_path / "plain_file"
    blocker.write_text("not a directory")
    assert cli.main(["--config", cfg, "--out", str(blocker / "a.json")]) == 2
    assert blocker.read_text() == "not a directory"


def test_module_entry_point(tmp_path):
    cfg = _write_config(tmp_path / "c.cfg", "fgl", SAMPLE_JOBS["fgl"])
    out = tmp_path / "f.json"
    proc = subprocess.run([sys.executable, "-m", "annulus", "--config", cfg, "--out", str(out)],
                          capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    art = json.loads(out.read_text())
    assert art["result"]["bigraded_dims"] == []
    assert [1, 2, 8] in art["result"]["scalars"]["coefficients"]  # -x y^2 mod 9
