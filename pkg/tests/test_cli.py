import json
import subprocess
import sys

import pytest

from qinvert.cli import main, parse_q_grid
from qinvert.errors import ConfigError


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def run_json(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 0, err
    return json.loads(out)


def test_coeffs_catalan(capsys):
    doc = run_json(["coeffs", "--phi", "catalan", "--mode", "exact", "-N", "10", "--json"], capsys)
    t3 = doc["results"][0]["t"][3]
    assert t3 == {"terms": [[0, "1/1"], [1, "1/1"], [2, "2/1"], [3, "1/1"]]}
    assert doc["config"]["command"] == "coeffs" and "versions" in doc


def test_coeffs_zero_order(capsys):
    doc = run_json(["coeffs", "-N", "0"], capsys)
    assert doc["results"][0]["t"] == [{"terms": [[0, "1/1"]]}]


def test_coeffs_renewal_column(capsys):
    doc = run_json(["coeffs", "--phi", "explicit:1/2,1/2", "-N", "5"], capsys)
    q0 = [dict((e, c) for e, c in t["terms"]).get(0) for t in doc["results"][0]["t"]]
    assert q0 == ["1/1", "1/2", "3/4", "5/8", "11/16", "21/32"]


def test_coeffs_numeric_grid_and_csv(capsys):
    code, out, _ = run(["coeffs", "--q", "1/4:1/2:1/4", "-N", "3", "--csv", "--jobs", "1"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "q,n,g,t,eps" and len(lines) == 1 + 2 * 4


def test_parallel_grid_matches_serial(capsys):
    argv = ["asymptotics", "--q", "0.3:0.5:0.1", "-N", "30"]
    _, a, _ = run(argv + ["--jobs", "1"], capsys)
    _, b, _ = run(argv + ["--jobs", "2"], capsys)
    assert a == b


def test_asymptotics_catalan(capsys):
    code, out, err = run(["asymptotics", "--phi", "catalan", "--q", "0.5", "-N", "60"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["results"][0]["report"]["L"] == pytest.approx(3.4627466, abs=1e-7)
    assert "L=3.46274661945" in err


def test_asymptotics_exponential(capsys):
    doc = run_json(["asymptotics", "--phi", "exponential:1.0", "--q", "0.5", "-N", "200",
                    "--mode", "numeric", "--coeffwise-phi", "explicit:1"], capsys)
    rep = doc["results"][0]["report"]
    assert rep["zeta"] == pytest.approx(0.31326168751822286, rel=1e-15)
    assert rep["deviation_density"]["0.03"] < 0.05
    assert rep["coeffwise_spec"] == "explicit:1/1"


@pytest.mark.parametrize("argv, code, name", [
    (["asymptotics", "--q", "1.0"], 3, "InvalidQ"),
    (["coeffs", "--phi", "banana"], 2, "ConfigError"),
    (["coeffs", "--mode", "exact", "--q", "0.5"], 2, "ConfigError"),
    (["coeffs", "--phi", "exponential:1", "--mode", "exact"], 3, "ExactModeUnavailable"),
    (["qbig", "--q", "0.5"], 3, "InvalidQ"),
    (["qbig", "--q", "2", "-N", "20"], 3, "NonConvergent"),
    (["formal", "--f", "z-z^2"], 2, "ConfigError"),
    (["formal", "--f", "2*z", "--q", "1/2"], 3, "DomainError"),
    (["tuples", "--n", "3"], 2, "ConfigError"),
    (["coeffs", "--jobs", "0"], 2, "ConfigError"),
])
def test_exit_codes(argv, code, name, capsys):
    got, out, err = run(argv, capsys)
    assert got == code and name in err and out == ""


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["coeffs", "-N", "x"])
    assert exc.value.code == 2


def test_qbig(capsys):
    doc = run_json(["qbig", "--phi", "catalan", "--q", "2", "-N", "120"], capsys)
    r = doc["results"][0]
    assert abs(r["C_formula"] - r["C_empirical"]) / r["C_formula"] < 1e-4
    assert r["residual_max_relative"] < 1e-10


def test_formal(capsys):
    doc = run_json(["formal", "--f", "z-z^2", "--q", "1/2", "--kappa", "1", "-N", "8"], capsys)
    sol = doc["results"][0]["solutions"][0]
    assert sol["kappa"] == "1/1" and sol["residual_zero"] is True
    assert doc["results"][0]["zeros"][0]["extremal"] is True


def test_formal_with_divergent_h(capsys):
    doc = run_json(["formal", "--f", "z-z^2", "--q", "1/2", "-N", "60", "--phi", "catalan"], capsys)
    dh = doc["results"][0]["divergent_h"]
    assert abs(dh["growth_ratio"] - 1) < 0.1 and dh["all_positive"]


def test_tuples(capsys):
    code, out, err = run(["tuples", "--n", "5", "--i", "3"], capsys)
    assert code == 0 and "min L = 0 at (5, 0, 0)" in err
    r = json.loads(out)["results"][0]
    assert r["argmin"] == [[5, 0, 0]] and r["count"] == 21


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("phi = explicit:1/2,1/2\nN = 4\n")
    doc = run_json(["coeffs", "--config", str(cfg)], capsys)
    assert doc["config"]["phi"] == "explicit:1/2,1/2" and doc["config"]["N"] == 4
    doc = run_json(["coeffs", "--config", str(cfg), "-N", "2"], capsys)
    assert doc["config"]["N"] == 2
    cfg.write_text("colour = blue\n")
    assert run(["coeffs", "--config", str(cfg)], capsys)[0] == 2


def test_out_file_is_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    argv = ["qbig", "--q", "2", "-N", "80"]
    assert main(argv + ["--out", str(a)]) == 0
    assert main(argv + ["--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert capsys.readouterr().out == ""


def test_q_grid_parsing():
    assert [str(x) for x in parse_q_grid("1/10:3/10:1/10")] == ["1/10", "1/5", "3/10"]
    assert parse_q_grid("0.5") == [parse_q_grid("1/2")[0]]
    for bad in ("1:2", "1:0:1", "0:1:0"):
        with pytest.raises(ConfigError):
            parse_q_grid(bad)


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qinvert.cli", "tuples", "--n", "2", "--i", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["results"][0]["min"] == 0
