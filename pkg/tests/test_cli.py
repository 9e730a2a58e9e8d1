import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from tsallis_coherence import cli, measures
from tsallis_coherence.states import maximally_coherent, random_density, save_state


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, rho in [("mc2", maximally_coherent(2)), ("mc3", maximally_coherent(3)),
                      ("diag", np.diag([0.2, 0.3, 0.5])), ("mixed", random_density(2, seed=4))]:
        paths[name] = tmp_path / f"{name}.json"
        save_state(rho, paths[name])
    return paths


def run(argv, capsys):
    code = cli.main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def read_csv(text):
    lines = text.splitlines()
    assert lines[0].startswith("# schema_version: 1")
    return list(csv.DictReader(io.StringIO("\n".join(lines[1:]))))


def test_coherence_of_maximally_coherent_qubit(files, capsys):
    code, out, _ = run(["coherence", "--state", files["mc2"], "--measure", "cq", "--q", 0.5], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["schema_version"] == 1
    assert rec["value"] == pytest.approx(1.0, abs=1e-6)
    assert rec["converged"] is True and len(rec["optimal_sigma"]) == 2


@pytest.mark.parametrize("measure", cli.ALL_MEASURES)
def test_diagonal_state_has_zero_coherence(files, capsys, measure):
    code, out, _ = run(["coherence", "--state", files["diag"], "--measure", measure, "--q", 0.5], capsys)
    assert code == 0
    assert json.loads(out)["value"] == pytest.approx(0, abs=1e-8)


@pytest.mark.parametrize("measure, q", [("cq", 1.0), ("cq", 0.0), ("c-half", 1.2), ("tsallis-alpha", 1.0),
                                        ("tsallis-alpha", 2.5)])
def test_q_out_of_range_exits_2(files, capsys, measure, q):
    code, _, err = run(["coherence", "--state", files["mc2"], "--measure", measure, "--q", q], capsys)
    assert code == 2
    assert "q out of range" in err


def test_malformed_and_invalid_state_files(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"dim": 2, "re": [[1, 0]]}')
    assert run(["coherence", "--state", bad], capsys)[0] == 2
    assert run(["coherence", "--state", tmp_path / "missing.json"], capsys)[0] == 2
    not_density = tmp_path / "nd.json"
    not_density.write_text(json.dumps({"dim": 2, "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]}))
    code, _, err = run(["coherence", "--state", not_density], capsys)
    assert code == 3 and "invariant" in err


def test_usage_errors_exit_2(files, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(["coherence", "--measure", "nope"])
    assert info.value.code == 2
    capsys.readouterr()
    assert run(["coherence"], capsys)[0] == 2
    assert run(["sweep", "--state", files["mc2"], "--sweep", "0.1:0.9"], capsys)[0] == 2
    assert run(["sweep", "--state", files["mc2"], "--sweep", "0.1:0.9:0"], capsys)[0] == 2
    assert run(["sweep", "--state", files["mc2"], "--sweep", "0.1:1.0:3"], capsys)[0] == 2
    assert run(["coherence", "--state", files["mc2"], "--tol", "-1"], capsys)[0] == 2


def test_non_convergence_exits_4_and_still_writes(files, capsys, monkeypatch):
    # a single iteration cannot meet the stopping rule on a generic mixed state
    monkeypatch.setattr(cli.RunConfig, "optimizer",
                        lambda self: measures.OptimizerConfig(max_iters=1, restarts=1))
    code, out, _ = run(["coherence", "--state", files["mixed"]], capsys)
    assert code == 4
    assert json.loads(out)["converged"] is False


def test_sweep_matches_closed_form(files, capsys):
    code, out, _ = run(["sweep", "--state", files["mc2"], "--sweep", "0.1:0.9:9"], capsys)
    assert code == 0
    rows = read_csv(out)
    assert list(rows[0]) == ["q", "value", "converged", "iterations"]
    assert len(rows) == 9
    for r in rows:
        assert float(r["value"]) == pytest.approx(measures.c_q_max(2, float(r["q"])), abs=1e-6)
        assert r["converged"] == "true"


def test_sweep_edge_cases(files, capsys):
    _, out, _ = run(["sweep", "--state", files["diag"], "--sweep", "0.2:0.8:4"], capsys)
    assert all(float(r["value"]) == 0.0 for r in read_csv(out))
    _, out, _ = run(["sweep", "--state", files["mc3"], "--sweep", "0.3:0.9:1"], capsys)
    (row,) = read_csv(out)
    assert float(row["q"]) == 0.3
    code, out, _ = run(["sweep", "--state", files["mc2"], "--sweep", "0.2:0.4:2", "--format", "json"], capsys)
    assert code == 0 and len(json.loads(out)["rows"]) == 2


def test_outputs_are_byte_identical(files, tmp_path, capsys):
    outs = []
    for k in range(2):
        path = tmp_path / f"s{k}.csv"
        run(["sweep", "--state", files["mixed"], "--sweep", "0.1:0.9:5", "--out", path], capsys)
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    a = run(["search-violation", "--d", 3, "--q", 0.2, "--trials", 50, "--seed", 0], capsys)[1]
    b = run(["search-violation", "--d", 3, "--q", 0.2, "--trials", 50, "--seed", 0], capsys)[1]
    assert a == b


def test_search_violation(capsys):
    code, out, _ = run(["search-violation", "--d", 2, "--q", 0.5, "--trials", 0], capsys)
    assert code == 0
    assert json.loads(out)["message"] == "not found in 0 trials"
    code, out, _ = run(["search-violation", "--d", 3, "--q", 0.2, "--trials", 100], capsys)
    rec = json.loads(out)
    assert rec["found"] is True
    assert rec["counterexample"]["trial"] == 44
    assert rec["counterexample"]["excess"] > 1e-4


@pytest.mark.parametrize("measure", ["cq", "c-half", "cg"])
def test_search_violation_refuses_other_measures(capsys, measure):
    code, _, err = run(["search-violation", "--measure", measure], capsys)
    assert code == 2
    assert "only targets tsallis-alpha" in err


def test_max_coherent(capsys):
    code, out, _ = run(["max-coherent", "--d", 2, 4, "--sweep", "0.1:0.9:3", "--format", "csv"], capsys)
    assert code == 0
    rows = read_csv(out)
    assert len(rows) == 6
    assert max(float(r["abs_error"]) for r in rows) <= 1e-6


def test_verify_small_run_and_negative_control(tmp_path, capsys):
    path = tmp_path / "v.json"
    code, _, _ = run(["verify", "--trials", 2, "--out", path], capsys)
    assert code == 0
    rep = json.loads(path.read_text())
    assert rep["overall"] == "pass" and rep["schema_version"] == 1
    code, out, err = run(["verify", "--trials", 2, "--inject-fault", "broken-channel"], capsys)
    assert code == 1
    assert "channel_completeness" in err
    assert json.loads(out)["overall"] == "fail"


def test_verify_zero_trials(capsys):
    code, out, _ = run(["verify", "--trials", 0], capsys)
    rep = json.loads(out)
    assert code == 0 and rep["overall"] == "pass"
    assert all(s["trials"] == 0 for s in rep["suites"])


def test_inject_fault_is_hidden(capsys):
    with pytest.raises(SystemExit):
        cli.main(["verify", "--help"])
    assert "inject" not in capsys.readouterr().out


def test_module_entry_point(files):
    proc = subprocess.run([sys.executable, "-m", "tsallis_coherence", "coherence", "--state", str(files["mc3"]),
                           "--q", "0.5", "--format", "csv"], capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    (row,) = read_csv(proc.stdout)
    assert float(row["value"]) == pytest.approx(4 / 3, abs=1e-6)
