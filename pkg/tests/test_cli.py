import json

import pytest

from rqilab.cli import EXIT_ACCEPT, EXIT_COMPUTE, EXIT_OK, EXIT_USAGE, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_enumerate_json(capsys):
    code, out = run(capsys, "enumerate", "--n", "1000", "--cost", "unit")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["summary"]["count"] == 210909
    assert doc["provenance"]["command"] == "enumerate"
    assert doc["provenance"]["config"]["n"] == 1000.0


def test_enumerate_audit(tmp_path, capsys):
    code, _ = run(capsys, "enumerate", "--n", "4", "--audit", "--out", str(tmp_path))
    assert code == EXIT_OK
    assert len((tmp_path / "audit.csv").read_text().splitlines()) == 4
    assert json.loads((tmp_path / "enumerate.json").read_text())["audit_rows"] == 3


def test_enumerate_capped_csv(capsys):
    code, out = run(capsys, "enumerate", "--n", "1000", "--digit-cap", "2", "--format", "csv")
    assert code == EXIT_OK
    assert out.splitlines()[1].startswith("unit,1155,")


def test_reports_are_reproducible(tmp_path, capsys):
    a = tmp_path / "a"
    b = tmp_path / "b"
    run(capsys, "enumerate", "--n", "3000", "--threads", "2", "--out", str(a))
    run(capsys, "enumerate", "--n", "3000", "--threads", "2", "--out", str(b))
    assert (a / "enumerate.json").read_bytes() == (b / "enumerate.json").read_bytes()


def test_constants_chi(capsys):
    code, out = run(capsys, "constants", "--cost", "chi", "--digit", "1", "--D", "32",
                    "--M-t", "20000")
    doc = json.loads(out)
    assert code == EXIT_OK
    # 2 E[chi_1] / E, frozen from mpmath
    assert doc["mu"] == pytest.approx(0.349779457121942584, abs=1e-8)
    assert doc["mean_cost_gap"] < 1e-7
    assert {"entropy_closed", "entropy_spectral", "nu", "mu1", "nu1"} <= set(doc)


def test_dimension_csv(capsys):
    code, out = run(capsys, "dimension", "--M", "2", "3", "--format", "csv")
    assert code == EXIT_OK
    lines = out.splitlines()
    assert lines[0] == "M,sigma_M,residual,two_term"
    assert lines[1].startswith("2,0.53128050")


def test_traces(capsys):
    code, out = run(capsys, "traces", "--k", "1", "--s", "2.4", "--w", "0", "--cutoff", "1000")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["identities"][0]["gap"] < 1e-12


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"n": 4}))
    code, out = run(capsys, "enumerate", "--config", str(cfg))
    assert code == EXIT_OK and json.loads(out)["summary"]["count"] == 3


def test_usage_errors(tmp_path, capsys):
    with pytest.raises(SystemExit) as e:
        main(["enumerate", "--bogus"])
    assert e.value.code == EXIT_USAGE
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n": -3}))
    assert main(["enumerate", "--config", str(bad)]) == EXIT_USAGE
    assert "config invalid at n" in capsys.readouterr().err
    assert main(["constants", "--cost", "chi"]) == EXIT_USAGE
    assert main(["enumerate", "--n", "4", "--audit"]) == EXIT_USAGE


def test_computation_error(capsys):
    assert main(["dimension", "--M", "1"]) == EXIT_COMPUTE


def test_verify_pass_and_fail(tmp_path, capsys):
    rep = tmp_path / "r.json"
    code, _ = run(capsys, "verify", "--quick", "--only", "1", "4", "--json", str(rep))
    assert code == EXIT_OK
    doc = json.loads(rep.read_text())
    assert [c["number"] for c in doc["criteria"]] == [1, 4] and doc["passed"] == 2
    code, _ = run(capsys, "verify", "--only", "13")
    assert code == EXIT_ACCEPT
