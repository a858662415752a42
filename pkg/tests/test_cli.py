import json
import subprocess
import sys

import numpy as np
import pytest

from ziconcord import CSVParseError, InvalidInputError, TieError
from ziconcord.cli import ingest_csv, main, read_config, spec_from_config


def write(tmp_path, text, name="data.csv"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


@pytest.fixture
def zi_csv(tmp_path):
    rng = np.random.default_rng(0)
    x = np.where(rng.random(300) < 0.3, 0.0, rng.gamma(2.0, 1.0, 300).round(3))
    y = np.where(rng.random(300) < 0.6, 0.0, (x + rng.gamma(1.0, 1.0, 300)).round(2))
    lines = ["precip,runoff"] + [f"{a},{b}" for a, b in zip(x, y)]
    return write(tmp_path, "\n".join(lines) + "\n")


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_header_detection(tmp_path):
    a = ingest_csv(write(tmp_path, "a,b\n0,1\n2,0\n3,4\n", "h.csv"))
    b = ingest_csv(write(tmp_path, "0,1\n2,0\n3,4\n", "n.csv"))
    assert a.n == b.n == 3
    assert np.array_equal(a.x, b.x)


def test_ties_broken_deterministically_zeros_untouched(zi_csv):
    a, b = ingest_csv(zi_csv, seed=4), ingest_csv(zi_csv, seed=4)
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)
    assert sum(a.tie_counts) > 0
    pos = a.x[a.x > 0]
    assert np.unique(pos).size == pos.size
    raw = np.loadtxt(zi_csv, delimiter=",", skiprows=1)
    assert np.array_equal(a.x == 0, raw[:, 0] == 0) and np.array_equal(a.y == 0, raw[:, 1] == 0)
    # tie breaking never reorders distinct values
    assert np.all(np.diff(raw[np.argsort(a.x), 0]) >= 0)
    assert np.all(np.diff(raw[np.argsort(a.y), 1]) >= 0)


def test_tie_policy_error(zi_csv, tmp_path):
    with pytest.raises(TieError):
        ingest_csv(zi_csv, tie_policy="error")
    clean = write(tmp_path, "x,y\n0,0\n1.5,0\n2.5,3\n0,4\n", "clean.csv")
    a, b = ingest_csv(clean, "error"), ingest_csv(clean, "random")
    assert np.array_equal(a.x, b.x) and np.array_equal(a.y, b.y)


@pytest.mark.parametrize("text,exc,match", [
    ("x,y\n1,2\n3,abc\n", CSVParseError, "row 3"),
    ("1,2\n3,4,5\n", CSVParseError, "row 2"),
    ("x,y\n1,2\n-1,3\n", InvalidInputError, "negative"),
    ("x,y\n1,nan\n", CSVParseError, "row 2"),
    ("x,y\n", InvalidInputError, "no data"),
])
def test_bad_files(tmp_path, text, exc, match):
    with pytest.raises(exc, match=match):
        ingest_csv(write(tmp_path, text))


def test_estimate_md_report(zi_csv, capsys):
    code, out, _ = run(["estimate", "--input", zi_csv, "--seed", "1"], capsys)
    assert code == 0
    for label in ("| Estimate |", "| Lower bound |", "| Upper bound |", "- p1_hat:", "- n: 300", "- seed: 1"):
        assert label in out
    code2, out2, _ = run(["estimate", "--input", zi_csv, "--seed", "1"], capsys)
    assert out2 == out


def test_estimate_json(zi_csv, capsys):
    code, out, _ = run(["estimate", "--input", zi_csv, "--output", "json"], capsys)
    d = json.loads(out)
    assert code == 0 and d["n"] == 300 and {"gamma_hat", "phi_hat", "rho_hat"} <= set(d)


def test_bounds_and_truth(capsys):
    code, out, _ = run(["bounds", "--p1", "0.2", "--p2", "0.2", "--output", "csv"], capsys)
    assert code == 0 and "-0.984" in out and "0.992" in out
    code, out, _ = run(["truth", "--alpha", "0.5", "--p1", "0.2", "--p2", "0.2"], capsys)
    assert code == 0 and "0.479" in out


def test_exit_codes(tmp_path, capsys):
    assert run(["estimate", "--input", str(tmp_path / "missing.csv")], capsys)[0] == 1
    assert run(["estimate", "--input", write(tmp_path, "1,2\n3,x\n")], capsys)[0] == 1
    for argv in (["bounds"], ["bounds", "--p1", "1.5", "--p2", "0.2"], ["truth", "--alpha", "0.5"],
                 ["estimate", "--input", "f.csv", "--seed", "-3"], ["nope"]):
        with pytest.raises(SystemExit) as e:
            main(argv)
        assert e.value.code == 2
    capsys.readouterr()


def test_simulate_from_config(tmp_path, capsys):
    cfg = write(tmp_path, "# small run\ngrid = 0.2 0.2 0.5; 0.8 0.8 0.2\nn = 40\nrepetitions = 5\nseed = 2\n",
                "run.cfg")
    code, out, _ = run(["simulate", "--config", cfg, "--output", "csv"], capsys)
    assert code == 0 and out.strip().count("\n") == 6
    assert run(["simulate", "--config", cfg, "--output", "csv"], capsys)[1] == out
    bad = write(tmp_path, "colour = blue\n", "bad.cfg")
    assert run(["simulate", "--config", bad], capsys)[0] == 1


def test_config_parsing(tmp_path):
    cfg = read_config(write(tmp_path, "preset = bounds  # comment\nrepetitions=3\n", "c.cfg"))
    spec, preset = spec_from_config(cfg)
    assert preset == "bounds" and spec.repetitions == 3 and all(a == 1.0 for _, _, a in spec.grid)


def test_validate(capsys):
    argv = ["validate", "--p1", "0.3", "--p2", "0.5", "--n", "300", "--partners", "20000", "--output", "csv"]
    code, out, _ = run(argv, capsys)
    assert out.splitlines()[0] == "check,estimate,oracle,se,z,status"
    code, out, _ = run(argv + ["--sigmas", "0"], capsys)
    assert code == 1 and "FAIL" in out


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "ziconcord", "truth", "--alpha", "0.5", "--p1", "0.2",
                        "--p2", "0.2", "--output", "json"], capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["gamma"] == pytest.approx(0.479, abs=5e-4)
