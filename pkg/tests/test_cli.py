import csv
import json
import math

import pytest

from conftest import pair_at
from illumcone.cli import main, payload_bytes


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr().out
    return code, out


def read(path):
    return json.loads(path.read_text())


@pytest.fixture
def valid_config(tmp_path, opt):
    path = tmp_path / "code.json"
    assert main(["gen", "--dim", "3", "--psi", repr(2 * opt.beta), "--target", "12", "--seed", "1",
                 "--out", str(path)]) == 0
    return path


def test_constants(capsys):
    code, out = run(["constants"], capsys)
    rep = json.loads(out)
    assert code == 0
    assert rep["tau"] == pytest.approx(1.0470963, abs=1e-6)
    assert rep["R0"] == pytest.approx(0.9050650, abs=1e-6)
    assert abs(rep["residuals"]["cos2_beta0"]) <= 1e-12
    assert abs(rep["residuals"]["tau2"]) <= 1e-12
    assert rep["alpha0_le_pi_over_6"] is True
    assert rep["meta"]["seed_defaulted"] is True


def test_params(capsys):
    code, out = run(["params", "--R", "1", "--d", "1.9498558"], capsys)
    rep = json.loads(out)
    assert rep["params"]["alpha"] == pytest.approx(math.pi / 14, abs=1e-6)


def test_params_domain_error_exit_2(capsys):
    assert main(["params", "--R", "1", "--d", "2.1"]) == 2


def test_verify_valid(valid_config, tmp_path):
    out = tmp_path / "cert.json"
    assert main(["verify", str(valid_config), "--resolution", "64", "--out", str(out)]) == 0
    rep = read(out)
    assert rep["ok"] and rep["verdicts"]["oracle"]["ok"]
    assert rep["verdicts"]["pairwise"]["notes"]


def test_verify_violating_pair(tmp_path):
    x, y = pair_at(1.0)
    cfg = tmp_path / "bad.json"
    cfg.write_text(json.dumps({"dimension": 3, "psi": 0.9, "points": [list(x), list(y)]}))
    out = tmp_path / "cert.json"
    assert main(["verify", str(cfg), "--resolution", "512", "--out", str(out)]) == 1
    rep = read(out)
    fail = rep["verdicts"]["pairwise"]["failures"][0]
    assert fail["pair"] == [0, 1] and "cond2" in fail["conditions"]
    assert rep["verdicts"]["oracle"]["diameter_estimate"] >= 1.87


def test_verify_missing_file(tmp_path):
    assert main(["verify", str(tmp_path / "nope.json")]) == 2


def test_verify_garbage_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", str(bad)]) == 2


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["bogus"])
    assert exc.value.code == 2
    assert main(["gen", "--dim", "3"]) == 2
    assert main(["gen", "--psi", "2.0"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["sweep", "--grid", "8"])
    assert exc.value.code == 2


def test_gen_and_bound_n2(tmp_path, opt):
    code_path = tmp_path / "n2.json"
    assert main(["gen", "--dim", "2", "--psi", repr(2 * opt.beta), "--target", "10",
                 "--max-trials", "200000", "--seed", "0", "--out", str(code_path)]) == 0
    code = read(code_path)
    assert len(code["points"]) == 2 and code["exhausted"]
    cert_path = tmp_path / "bound.json"
    assert main(["bound", str(code_path), "--mode", "exact_n2", "--out", str(cert_path)]) == 0
    cert = read(cert_path)
    assert cert["certified"]
    assert cert["multiplicity"]["method"] == "exact_n2"
    assert cert["lower_bound"] <= cert["greedy_cover_size"]
    for key in ("params", "verdicts", "phi", "multiplicity", "lower_bound", "caveats", "meta"):
        assert key in cert


def test_bound_phi_overrides_epsilon(tmp_path, valid_config, opt):
    out = tmp_path / "b.json"
    assert main(["bound", str(valid_config), "--mode", "bnb", "--phi", "1.3", "--out", str(out)]) == 0
    rep = read(out)
    assert rep["phi"] == pytest.approx(1.3, abs=1e-12)
    assert rep["epsilon"] == pytest.approx(1.3 - opt.cap_radius, abs=1e-12)


def test_bound_mode_mismatch_is_usage_error(valid_config):
    assert main(["bound", str(valid_config), "--mode", "exact_n2"]) == 2


def test_sweep_matches_constants(tmp_path, capsys):
    csv_path = tmp_path / "trace.csv"
    best = tmp_path / "best.json"
    assert main(["sweep", "--out", str(csv_path), "--best-json", str(best)]) == 0
    rows = list(csv.DictReader(csv_path.open()))
    top = max((r for r in rows if r["feasible"] == "1"), key=lambda r: float(r["tau"]))
    _, out = run(["constants"], capsys)
    const = json.loads(out)
    assert float(top["tau"]) == pytest.approx(const["tau"], abs=1e-3)
    assert read(best)["best"]["tau"] == pytest.approx(const["tau"], abs=1e-6)


def test_witness_command(capsys):
    code, out = run(["witness", "--apex", "1,0,0", "--ell", "0,1,0"], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["blocked"] and rep["agree"]
    assert rep["witness"] is not None
    code, out = run(["witness", "--apex", "1,0,0", "--ell=-1,0,0"], capsys)
    rep = json.loads(out)
    assert not rep["blocked"] and rep["witness"] is None and rep["agree"]
    assert main(["witness", "--apex", "1,0", "--ell", "0,1,0"]) == 2


@pytest.mark.parametrize("argv", [
    ["constants"],
    ["gen", "--dim", "4", "--psi", "1.0", "--target", "15", "--seed", "5"],
    ["witness", "--apex", "0,0,1", "--ell", "0.3,0.2,0.1", "--seed", "2"],
])
def test_same_seed_same_payload(argv, capsys):
    _, a = run(argv, capsys)
    _, b = run(argv + ["--threads", "3"], capsys)
    ra, rb = json.loads(a), json.loads(b)
    assert payload_bytes(ra) == payload_bytes(rb)
    assert ra["meta"]["threads"] != rb["meta"]["threads"]
