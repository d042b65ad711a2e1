import json

import pytest

from ellipticity import cli
from ellipticity.cli import EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK, EXIT_USAGE, main, parse_eps
from ellipticity.harness import ExperimentCurve


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_eps_range_and_list():
    assert parse_eps("2^-3..2^-5") == [0.125, 0.0625, 0.03125]
    assert parse_eps("1/8, 2^-4,0.01") == [0.125, 0.0625, 0.01]
    with pytest.raises(cli.UsageError):
        parse_eps("1e-3..2^-4")
    with pytest.raises(cli.UsageError):
        parse_eps("0,1/2")


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog-list")
    assert code == EXIT_OK
    names = json.loads(out)["catalog"]
    assert "dev_symmetric_gradient" in names and "n" in names["laplacian"]


def test_classify_symmetric_gradient(capsys, tmp_path):
    path = tmp_path / "r.json"
    code, _, _ = run(capsys, "classify", "--catalog", "symmetric_gradient", "--n", "2", "--direction", "0,1",
                     "--out", str(path))
    assert code == EXIT_OK
    rep = json.loads(path.read_text())
    assert rep["boundary_elliptic"][0]["status"] == "holds"
    assert rep["settings"]["budgets"]["boxes"] == 200000
    assert rep["chain_consistent"] is True


def test_classify_byte_stable(capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert main(["classify", "--catalog", "laplacian", "--n", "2", "--out", str(p)]) == EXIT_OK
    assert a.read_bytes() == b.read_bytes()
    rep = json.loads(a.read_text())
    assert "residual" in rep["boundary_elliptic"][0]["witness"]


def test_classify_n1_note(capsys):
    code, out, _ = run(capsys, "classify", "--catalog", "laplacian", "--n", "1")
    assert code == EXIT_OK
    assert any(n.startswith("n=1: boundary ellipticity trivially reduces") for n in json.loads(out)["notes"])


def test_classify_inconclusive_exit(capsys):
    code, out, _ = run(capsys, "classify", "--catalog", "symmetric_gradient", "--n", "3", "--direction", "1,1,1",
                       "--budget", "3")
    assert code == EXIT_INCONCLUSIVE
    assert "inconclusive" in out


def test_classify_chain_inconsistency_exit(capsys, monkeypatch):
    from ellipticity.taxonomy import report

    real = report.chain_violations
    monkeypatch.setattr(report, "chain_violations", lambda *a, **k: ["forced violation"] + real(*a, **k))
    code, out, err = run(capsys, "classify", "--catalog", "gradient", "--n", "2")
    assert code == EXIT_ERROR
    assert json.loads(err)["diagnostic"]["violations"] == ["forced violation"]
    assert json.loads(out)["chain_consistent"] is False


def test_operator_file_and_parse_error(capsys, tmp_path):
    good = tmp_path / "cr.txt"
    good.write_text("w1 = d1 u1 - d2 u2 ; w2 = d2 u1 + d1 u2")
    code, out, _ = run(capsys, "classify", "--operator", str(good), "--direction", "0,1")
    assert code == EXIT_OK
    assert json.loads(out)["boundary_elliptic"][0]["status"] == "fails"
    bad = tmp_path / "bad.txt"
    bad.write_text("w1 = d1 u1 + d1 u2 u3")
    code, _, err = run(capsys, "classify", "--operator", str(bad))
    assert code == EXIT_ERROR and "line 1, column" in err
    code, _, err = run(capsys, "classify", "--operator", str(tmp_path / "missing.txt"))
    assert code == EXIT_ERROR


@pytest.mark.parametrize("argv", [
    ["classify"],
    ["classify", "--catalog", "laplacian", "--operator", "x.json"],
    ["classify", "--catalog", "laplacian", "--n", "2", "--direction", "0.6,0.8"],
    ["classify", "--catalog", "laplacian", "--n", "2", "--h", "-1"],
    ["experiment", "nope"],
    ["frobnicate"],
    ["experiment", "trace-blowup", "--catalog", "laplacian", "--n", "2", "--eps", "fast"],
    ["classify", "--catalog", "nosuch"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == EXIT_USAGE
    assert err


def test_bad_catalog_parameters_are_errors(capsys):
    code, _, err = run(capsys, "classify", "--catalog", "cauchy_riemann", "--n", "3")
    assert code == EXIT_ERROR and "error" in err


def test_experiment_trace_blowup_csv(capsys, tmp_path):
    out = tmp_path / "trace.csv"
    code, _, _ = run(capsys, "experiment", "trace-blowup", "--catalog", "laplacian", "--n", "2",
                     "--direction", "0,1", "--eps", "2^-3..2^-6", "--out", str(out))
    assert code == EXIT_OK
    curve = ExperimentCurve.from_csv(out.read_text())
    assert curve.fit.slope > 0
    summary = json.loads(out.with_suffix(".json").read_text())
    assert summary["h"] == 1 / 64 and summary["config"]["eps"] == [0.125, 0.0625, 0.03125, 0.015625]


def test_experiment_deterministic_with_seed(capsys, tmp_path):
    outs = []
    for name in ("a.csv", "b.csv"):
        p = tmp_path / name
        assert main(["experiment", "sobolev-ratio", "--catalog", "gradient", "--n", "2", "--seed", "3",
                     "--out", str(p)]) == EXIT_OK
        outs.append(p.read_bytes())
    assert outs[0] == outs[1]


def test_experiment_kernel_decay_and_besov(capsys):
    code, out, _ = run(capsys, "experiment", "kernel-decay")
    assert code == EXIT_OK
    rep = json.loads(out)
    assert rep["sobolev_kernel"]["passes"] and rep["holder_cone_reference"]["passes"]
    code, out, _ = run(capsys, "experiment", "besov-scaling")
    assert code == EXIT_OK
    assert all(r["rel_error"] <= 0.05 for r in json.loads(out)["rows"])


def test_verify_commands(capsys):
    code, out, _ = run(capsys, "verify", "extension", "--seed", "2")
    assert code == EXIT_OK
    assert json.loads(out)["vandermonde_residual"] == "0"
    code, out, _ = run(capsys, "verify", "representation", "--h", "0.015625")
    assert code == EXIT_OK
    assert json.loads(out)["error_ratio"] <= 0.7
