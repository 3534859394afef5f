import csv
import io
import json

import pytest

from laplace_carleson.cli import main
from laplace_carleson.embeddings import default_family
from laplace_carleson.errors import HypothesisError
from laplace_carleson.theorems import REGISTRY, id_table, prepare, region_grid, run_theorem


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def strip_time(text):
    d = json.loads(text)
    d.pop("timestamp")
    return json.dumps(d, sort_keys=True)


@pytest.fixture
def squares(tmp_path):
    path = tmp_path / "squares.json"
    path.write_text(json.dumps({"kind": "squares", "n": 100}))
    return str(path)


def test_carleson_squares(squares, capsys):
    code, out, _ = run(["carleson", squares, "--beta", "0.5"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["command"] == "carleson"
    assert abs(d["result"]["sup_ratio"] - 2 / 3 ** 0.5) < 1e-9
    assert d["result"]["argmax"] == {"a": 1.0, "b": 4.0}
    assert d["config"]["beta"] == 0.5 and "version" in d


def test_carleson_empty(tmp_path, capsys):
    path = tmp_path / "empty.json"
    path.write_text(json.dumps({"kind": "atomic", "atoms": []}))
    code, out, _ = run(["carleson", str(path), "--beta", "1"], capsys)
    assert code == 0 and json.loads(out)["result"]["sup_ratio"] == 0.0


def test_carleson_malformed(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"kind": "atomic", "atoms": [{"x": 0, "y": 1}]}))
    code, _, err = run(["carleson", str(path)], capsys)
    assert code == 2 and "'mass'" in err
    path.write_text("{oops")
    assert run(["carleson", str(path)], capsys)[0] == 2
    assert run(["carleson", str(tmp_path / "missing.json")], capsys)[0] == 2


def test_counterexample(capsys):
    code, out, _ = run(["counterexample", "--n", "10", "--caps", "2", "2"], capsys)
    r = json.loads(out)["result"]
    assert code == 0 and r["feasible"] is False and r["certificate"]["status"] == "infeasible"
    assert (r["N"], r["C0"], r["C1"]) == (10, 10.0, 1.0)
    code, out, _ = run(["counterexample", "--n", "1", "--caps", "1", "1"], capsys)
    r = json.loads(out)["result"]
    assert r["certificate"]["status"] == "unknown" and r["certificate"]["witness"]
    assert run(["counterexample", "--n", "3", "--caps", "0", "2"], capsys)[0] == 2


def test_verify_hypothesis_violation(capsys):
    code, _, err = run(["verify", "1.2", "--p", "1.5", "--q", "4"], capsys)
    assert code == 4
    assert r"2< p\le q<\infty" in err


def test_verify_list(capsys):
    code, out, _ = run(["verify", "--list"], capsys)
    assert code == 0
    for tid in REGISTRY:
        assert tid in out
    assert "alias of 1.6" in out


def test_verify_disk_csv(capsys):
    code, out, _ = run(["verify", "1.4", "--p", "4", "--q", "4", "--coeff-len", "64",
                        "--n", "20", "--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["function_id", "source_norm", "target_norm", "ratio", "err_src", "err_tgt"]
    assert len(rows) == 21


def test_verify_determinism(capsys):
    argv = ["verify", "1.6", "--p", "4", "--n", "8"]
    a = run(argv, capsys)[1]
    b = run(argv, capsys)[1]
    assert strip_time(a) == strip_time(b)
    assert json.loads(a)["result"]["region"] == "II"


def test_thread_count_does_not_change_report(capsys, monkeypatch):
    argv = ["verify", "1.10", "--n", "6"]
    monkeypatch.setenv("LAPLACE_CARLESON_THREADS", "1")
    a = run(argv, capsys)[1]
    monkeypatch.setenv("LAPLACE_CARLESON_THREADS", "4")
    b = run(argv, capsys)[1]
    assert strip_time(a) == strip_time(b)


def test_verify_config_file(tmp_path, capsys):
    (tmp_path / "mu.json").write_text(json.dumps({"kind": "squares", "n": 20}))
    cfg = tmp_path / "run.toml"
    cfg.write_text('p = 4\nq = 4\nmeasure = "mu.json"\nn = 5\n')
    code, out, _ = run(["verify", "1.1", "--config", str(cfg), "--q", "5"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["config"]["effective"]["q"] == 5.0
    assert d["config"]["toml"]["q"] == 4
    assert d["result"]["carleson"]["constant"] > 0


def test_norms(capsys):
    fn = json.dumps({"kind": "step", "breakpoints": [0, 1], "values": [1]})
    code, out, _ = run(["norms", "--function", fn, "--space", "lp", "--p", "3"], capsys)
    assert code == 0 and json.loads(out)["result"]["value"] == 1.0
    code, out, _ = run(["norms", "--function", fn, "--space", "hardy", "--p", "2"], capsys)
    assert code == 0 and 0.999 <= json.loads(out)["result"]["value"] <= 1.0
    assert run(["norms", "--function", "{bad", "--space", "lp"], capsys)[0] == 2


def test_regions_csv(capsys):
    code, out, _ = run(["regions", "--n", "9"], capsys)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 82


def test_unknown_theorem(capsys):
    assert run(["verify", "9.9"], capsys)[0] == 2


def test_prepare_checks_hypotheses():
    with pytest.raises(HypothesisError) as exc:
        prepare("1.13", p=3.0)
    assert exc.value.hypothesis
    p = prepare("1.6", p=5.0)
    assert p["alpha"] == 0.0 and p["q"] == 5.0


def test_alias_runs_target():
    a, _ = run_theorem("1.3", n=4)
    b, _ = run_theorem("1.6", n=4)
    assert a.to_json() == b.to_json()


def test_id_table_rows():
    ids = [r[0] for r in id_table()]
    assert set(ids) == {"1.1", "1.2", "1.3", "1.4", "1.5", "1.6", "1.7", "1.8", "1.9", "1.10",
                        "1.11", "1.13", "L3.1", "optscale", "annulus"}


def test_region_grid_size():
    assert len(region_grid(99)) == 99 * 99


def test_family_size_override():
    rep, _ = run_theorem("1.2", n=5, levels=(8, 9))
    assert [r["function_id"] for r in rep.rows] == [fid for fid, _ in default_family(0, 5)]
