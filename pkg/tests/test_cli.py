"""End-to-end runs of the nmds command."""

import csv
import json

from nmds_expander.cli import run
from nmds_expander.report import MANIFEST_FILE_NAME, read_manifest


def _rows(path):
    with path.open(encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def _run(command, out, *extra):
    """command is split on spaces; extra arguments (paths) are passed as given."""
    return run([*command.split(), *map(str, extra), "--out", str(out)])


def _graph(out, kind="complete", n=2, delta=2, seed=0):
    status = _run(f"graph gen --kind {kind} --n {n} --delta {delta} --seed {seed}", out)
    assert status == 0
    return out / "graph.json"


def _build_k33(tmp_path):
    graph = _graph(tmp_path / "g", n=3, delta=3)
    built = tmp_path / "c"
    command = "code build --q1 4 --q2 16 --r 1/3 --R 1/3 --p 0 --seed 0 --graph"
    assert _run(command, built, graph) == 0
    return built / "instance.json"


def test_graph_gen_writes_manifest(tmp_path):
    graph = _graph(tmp_path / "g")
    manifest = read_manifest(tmp_path / "g")
    assert "graph.json" in manifest["artifacts"]
    assert "--out" not in manifest["command"]
    assert json.loads(graph.read_text(encoding="utf-8"))["adj"] == [[0, 1], [0, 1]]


def test_balance_then_verify(tmp_path, capsys):
    graph = _graph(tmp_path / "g")
    out = tmp_path / "a"
    assert _run("assign balance --p 1/2 --pbar 1/2 --seed 3 --graph", out, graph) == 0
    (balance,) = _rows(out / "balance.csv")
    assert balance["good"] == "true"

    capsys.readouterr()
    status = _run(
        "assign verify --assignment", tmp_path / "v", out / "assignment.json", "--graph", graph
    )
    assert status == 0
    assert json.loads(capsys.readouterr().out) == {"good": True, "violations": 0}
    assert _rows(tmp_path / "v" / "violations.csv") == []


def test_graph_gamma(tmp_path):
    graph = _graph(tmp_path / "g", n=3, delta=3)
    assert _run("graph gamma --graph", tmp_path / "s", graph) == 0
    (row,) = _rows(tmp_path / "s" / "gamma.csv")
    assert float(row["gamma"]) == 0.0
    assert row["ramanujan"] == "true"


def test_sweep2_csv(tmp_path):
    out = tmp_path / "t"
    assert _run("tradeoff sweep2 --eps 0.1 --R 0.7 --alpha 1/2", out) == 0
    (row,) = _rows(out / "sweep2.csv")
    assert row["rate_bound"] == "0.625"
    assert row["chain_bound"] == "0.625"


def test_sweep2_json(tmp_path):
    out = tmp_path / "t"
    assert _run("tradeoff sweep2 --eps 0.1,0.05 --R 0.7 --alpha 1/2 --format json", out) == 0
    records = json.loads((out / "sweep2.json").read_text(encoding="utf-8"))
    assert [r["eps"] for r in records] == [0.1, 0.05]


def test_sweep3(tmp_path):
    out = tmp_path / "t"
    command = (
        "tradeoff sweep3 --eps 1/10 --R 9/10 --r0 24/25 --r-m 1/2"
        " --kappa 1/2 --delta1 100 --p 1/10 --alpha 1/2"
    )
    assert _run(command, out) == 0
    (row,) = _rows(out / "sweep3.csv")
    assert row["s_in_interval"] == "true"
    assert row["residual"] == "0.001"
    assert row["q2"] == ""


def test_unknown_flag(tmp_path):
    out = tmp_path / "x"
    assert _run("graph gen --colour red", out) == 2
    assert not out.exists()


def test_bad_rational(tmp_path):
    assert _run("tradeoff sweep2 --eps one --R 0.7 --alpha 1/2", tmp_path) == 2


def test_failure_reports_json(tmp_path, capsys):
    out = tmp_path / "g"
    assert _run("graph gen --kind complete --n 3 --delta 2 --seed 0", out) == 1
    error = json.loads(capsys.readouterr().err)
    assert error["error"] == "BadParameters"
    assert not (out / MANIFEST_FILE_NAME).exists()


def test_share_above_rate_writes_nothing(tmp_path, capsys):
    graph = _graph(tmp_path / "g", n=3, delta=3)
    out = tmp_path / "c"
    assert _run("code build --q1 4 --q2 16 --r 1/3 --R 1/3 --p 2/3 --seed 0 --graph", out, graph) == 2
    assert not out.exists()
    error = json.loads(capsys.readouterr().err)
    assert error["error"] == "BadArguments"


def test_bad_tower_writes_nothing(tmp_path):
    graph = _graph(tmp_path / "g", n=3, delta=3)
    out = tmp_path / "c"
    assert _run("code build --q1 3 --q2 16 --r 1/3 --R 1/3 --p 0 --seed 0 --graph", out, graph) == 2
    assert not out.exists()


def test_full_cap_writes_nothing(tmp_path):
    graph = _graph(tmp_path / "g")
    out = tmp_path / "a"
    assert _run("assign balance --p 1/2 --pbar 1 --seed 3 --graph", out, graph) == 2
    assert not out.exists()


def test_zero_trials_writes_nothing(tmp_path):
    instance = _build_k33(tmp_path)
    out = tmp_path / "mc"
    assert _run("decode mc --t 0 --rho 0 --trials 0 --seed 1 --instance", out, instance) == 2
    assert not out.exists()


def test_bad_config(tmp_path, monkeypatch):
    config = tmp_path / "nmds.toml"
    config.write_text("colour = 1\n", encoding="utf-8")
    monkeypatch.setenv("NMDS_CONFIG", str(config))
    assert _run("tradeoff sweep2 --eps 0.1 --R 0.7 --alpha 1/2", tmp_path / "t") == 2


def test_output_dir_preference(tmp_path, monkeypatch):
    monkeypatch.setenv("NMDS_OUTPUT_DIR", str(tmp_path / "runs"))
    assert run("tradeoff sweep2 --eps 0.1 --R 0.7 --alpha 1/2".split()) == 0
    assert (tmp_path / "runs" / "sweep2.csv").is_file()


def test_replay(tmp_path, capsys):
    out = tmp_path / "g"
    _graph(out, kind="random_regular", n=8, delta=3, seed=4)
    capsys.readouterr()
    assert run(["replay", str(out)]) == 0
    assert json.loads(capsys.readouterr().out) == {"identical": True, "mismatched": []}


def test_replay_detects_change(tmp_path, capsys):
    out = tmp_path / "g"
    _graph(out, kind="random_regular", n=8, delta=3, seed=4)
    manifest = out / MANIFEST_FILE_NAME
    digest = read_manifest(out)["artifacts"]["graph.json"]
    text = manifest.read_text(encoding="utf-8")
    manifest.write_text(text.replace(digest, "0" * 64), encoding="utf-8")

    capsys.readouterr()
    assert run(["replay", str(manifest)]) == 1
    assert json.loads(capsys.readouterr().out) == {"identical": False, "mismatched": ["graph.json"]}


def test_code_build_and_rate(tmp_path):
    instance = _build_k33(tmp_path)
    assert instance.is_file()

    assert _run("code rate --instance", tmp_path / "r", instance) == 0
    (row,) = _rows(tmp_path / "r" / "rate.csv")
    assert row["meets_bounds"] == "true"
    assert row["dim"] == "2"


def test_code_mindist(tmp_path):
    instance = _build_k33(tmp_path)
    assert _run("code mindist --instance", tmp_path / "m", instance) == 0
    (row,) = _rows(tmp_path / "m" / "mindist.csv")
    assert row["outer_distance"] == "3"
    assert row["dist_vacuous"] == "false"


def test_decode_commands(tmp_path):
    instance = _build_k33(tmp_path)

    assert _run("decode mc --t 0..1 --rho 0 --trials 5 --seed 1 --instance", tmp_path / "mc", instance) == 0
    rows = _rows(tmp_path / "mc" / "mc.csv")
    assert [(r["t"], r["rho"], r["rate"]) for r in rows] == [("0", "0", "1"), ("1", "0", "1")]

    assert _run("decode one --t 1 --rho 1 --seed 2 --instance", tmp_path / "one", instance) == 0
    (row,) = _rows(tmp_path / "one" / "decode.csv")
    assert row["outcome"] == "success"
    assert row["oracle_agrees"] == "true"
