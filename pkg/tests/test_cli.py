import json

import numpy as np
import pytest

from symmod.cli import demo, main
from symmod.matcore import MatrixError
from symmod.report import (
    RunConfig,
    load_matrix_file,
    matrix_from_json,
    matrix_to_json,
    replay_inputs,
    run_verify,
    save_matrix_file,
)
from symmod.theorems import digest


def numeric(report):
    return {"records": report["records"], "aggregates": report["aggregates"], "ok": report["ok"]}


def test_demo_output(capsys):
    assert main(["demo"]) == 0
    out = capsys.readouterr().out
    assert "beta = 0.5: margin lam_min(RHS - LHS) = +0.000e+00" in out
    assert "is_ph = True" in out
    assert demo() in out


def test_verify_minimal_run(tmp_path, capsys):
    out = tmp_path / "r.json"
    code = main(["verify", "--suite", "thm-2.1", "--trials", "1", "--dims", "1", "--m", "1",
                 "--seed", "3", "--out", str(out)])
    assert code == 0
    rep = json.loads(out.read_text())
    assert rep["ok"] and len(rep["records"]) == 1
    rec = rep["records"][0]
    assert rec["n"] == 1 and rec["m"] == 1 and rec["passed"]
    assert "thm-2.1" in capsys.readouterr().err


def test_records_replay_to_same_inputs():
    rep = run_verify(RunConfig(suite="cor-2.5", trials=6, dims=[2, 3], seed=5))
    for rec in rep["records"]:
        assert digest(replay_inputs(rec)) == rec["digest"]


def test_grid_and_determinism():
    cfg = RunConfig(suite="all", trials=4, dims=[2, 3], m_values=[1, 2], seed=9)
    a, b = run_verify(cfg), run_verify(cfg)
    assert json.dumps(numeric(a), sort_keys=True) == json.dumps(numeric(b), sort_keys=True)
    recs = [r for r in a["records"] if r["statement_id"] == "thm-2.1"]
    assert [(r["n"], r["m"]) for r in recs] == [(2, 1), (3, 1), (2, 2), (3, 2)]
    assert a["ok"]
    other = run_verify(RunConfig(suite="all", trials=4, dims=[2, 3], m_values=[1, 2], seed=10))
    assert numeric(other) != numeric(a)


def test_seed_env_var(monkeypatch, tmp_path):
    paths = []
    for env, flag in (("11", []), (None, ["--seed", "11"])):
        if env is None:
            monkeypatch.delenv("SYMMOD_SEED", raising=False)
        else:
            monkeypatch.setenv("SYMMOD_SEED", env)
        p = tmp_path / f"r{len(paths)}.json"
        main(["verify", "--suite", "eqc2", "--trials", "3", "--out", str(p)] + flag)
        paths.append(p)
    a, b = (json.loads(p.read_text()) for p in paths)
    assert numeric(a) == numeric(b)


def test_csv_format(capsys):
    assert main(["verify", "--suite", "cor-2.4", "--trials", "2", "--format", "csv-summary"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "statement_id,trials,pass_rate,worst_margin,max_ratio"
    assert lines[1].startswith("cor-2.4,2,1.0")


def test_error_exit_codes(tmp_path, capsys):
    assert main(["verify", "--suite", "nope"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["verify", "--suite", "thm-2.1", "--input", str(bad)]) == 2
    assert main(["verify", "--suite", "thm-2.1", "--input", str(tmp_path / "missing.json")]) == 2
    assert main(["verify", "--trials", "0"]) == 2
    with pytest.raises(SystemExit):
        main(["search", "--target", "nope"])


def test_failing_input_exits_one(tmp_path):
    # A = diag(1, 0), B = I: no operator-norm violation, so the counterexample check fails
    p = tmp_path / "m.json"
    save_matrix_file(p, [np.diag([1.0, 0.0]), np.eye(2)])
    assert main(["verify", "--suite", "opnorm-triangle", "--input", str(p)]) == 1
    assert main(["verify", "--suite", "thm-2.1", "--input", str(p)]) == 0


def test_matrix_json_round_trip(tmp_path):
    M = np.array([[1 + 2j, 0.5], [-1j, 3.0]])
    assert np.array_equal(matrix_from_json(matrix_to_json(M)), M)
    p = tmp_path / "one.json"
    p.write_text(json.dumps(matrix_to_json(M)))
    assert np.array_equal(load_matrix_file(p)[0], M)
    p.write_text(json.dumps([matrix_to_json(M), matrix_to_json(2 * M)]))
    assert len(load_matrix_file(p)) == 2


@pytest.mark.parametrize("payload", [
    {"n": 2, "re": [[1, 2, 3]]},
    {"n": 2, "re": [[1, 0], [0, 1]], "im": [[0]]},
    {"re": [[1]]},
    {"n": 1, "re": [["x"]]},
    {"n": 1, "re": [[float("nan")]]},
    [],
    {"other": 1},
])
def test_malformed_matrix_files(tmp_path, payload):
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(payload))
    with pytest.raises(MatrixError):
        load_matrix_file(p)


def test_search_report_reloads_into_verify(tmp_path, capsys):
    out = tmp_path / "s.json"
    assert main(["search", "--target", "opnorm-triangle-failure-m2", "--budget", "3000",
                 "--seed", "1", "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    best = rep["result"]["best_value"]
    assert len(rep["result"]["argmax"]) == 2 and rep["result"]["budget_used"] == 3000
    ver = tmp_path / "v.json"
    main(["verify", "--suite", "opnorm-triangle", "--input", str(out), "--out", str(ver)])
    value = json.loads(ver.read_text())["records"][0]["value"]
    assert value == pytest.approx(best, rel=1e-12)
