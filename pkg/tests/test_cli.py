import json

import pytest

from cutquery.cli import main
from cutquery.experiment import ExperimentSpec, run, sweep
from cutquery.generators import SpecError, gen, generate
from cutquery.graph import exact_min_cut, write_graph
from cutquery.oracle import graph_to_stream

import numpy as np


def test_generator_examples():
    assert exact_min_cut(gen("cycle:8")).value == 2
    assert exact_min_cut(gen("planted:8,8,3", 1)).value == 3
    G, info = generate("gnp:64,0.2", 7)
    assert G.is_connected() and info["attempts"] >= 1
    D = gen("dumbbell:5,3")
    assert D.n == 12 and exact_min_cut(D).value == 1
    assert gen("clique:6").m == 15


def test_generator_is_deterministic():
    assert gen("gnp:30,0.2,5", 3).edges() == gen("gnp:30,0.2,5", 3).edges()
    assert gen("planted:6,6,2", 1).edges() != gen("planted:6,6,2", 2).edges()


@pytest.mark.parametrize("spec", ["gnp:5", "nope:3", "cycle", "planted:a,b,c"])
def test_malformed_specs(spec):
    with pytest.raises(SpecError):
        gen(spec)


def test_run_2round_records():
    recs = run(ExperimentSpec("mincut2", "planted:8,8,2", trials=50, verify=True, seed=0))
    assert len(recs) == 50 and all(r.rounds == 2 for r in recs)
    assert sum(r.success for r in recs) >= 45


def test_run_monmat():
    recs = run(ExperimentSpec("monmat", n=32, r=2, trials=100, verify=True))
    assert all(r.success for r in recs)


def test_verify_off_drops_exact(capsys):
    main(["run", "--algo", "mincutU", "--gen", "cycle:12", "--r", "1", "--no-timing"])
    rows = json.loads(capsys.readouterr().out)
    assert "exact" not in rows[0] and rows[0]["rounds"] == 3


def test_json_is_byte_stable(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["run", "--algo", "mincut2", "--gen", "planted:6,6,1", "--trials", "3", "--verify",
            "--no-timing", "--seed", "4"]
    main(args + ["--out", str(a)])
    main(args + ["--out", str(b)])
    assert a.read_bytes() == b.read_bytes()
    rows = json.loads(a.read_text())
    assert list(rows[0]) == ["algorithm", "n", "m", "W", "r", "seed", "rounds", "queries",
                             "value", "exact", "success", "ms"]


def test_env_seed_overrides(monkeypatch, capsys):
    monkeypatch.setenv("CUTQUERY_SEED", "9")
    main(["run", "--algo", "mincut2", "--gen", "cycle:8", "--seed", "1", "--no-timing"])
    assert json.loads(capsys.readouterr().out)[0]["seed"] == 9


def test_csv_and_graph_file(tmp_path, capsys):
    p = tmp_path / "g.txt"
    write_graph(gen("planted:5,5,1"), p)
    main(["run", "--algo", "mincutW", "--graph", str(p), "--r", "1", "--format", "csv",
          "--verify", "--no-timing"])
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "algorithm,n,m,W,r,seed,rounds,queries,value,exact,success,ms"
    assert lines[1].split(",")[-2] == "True"


def test_stream_input(tmp_path, capsys):
    G = gen("planted:6,6,2", 0)
    events = graph_to_stream(G, np.random.default_rng(0))
    p = tmp_path / "s.txt"
    p.write_text("".join(f"{a} {b} {c}\n" for a, b, c in events))
    main(["run", "--algo", "mincut2", "--stream", str(p), "--verify", "--no-timing"])
    row = json.loads(capsys.readouterr().out)[0]
    assert row["success"] and row["rounds"] == 2


def test_gen_command(tmp_path, capsys):
    out = tmp_path / "g.txt"
    assert main(["gen", "--gen", "cycle:5", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "5 5 1"
    assert main(["gen", "--gen", "bogus:1"]) == 2


def test_sweep():
    base = ExperimentSpec("mincutU", "cycle:{n}", trials=2)
    rows = sweep(base, ns=[8, 16], rs=[1, 2, 3], algos=["mincutU"])
    assert [row["median_rounds"] for row in rows if row["n"] == 16] == [3, 5, 7]
    assert sweep(base) == []


def test_sweep_cli_csv(capsys):
    main(["sweep", "--algo", "mincut2", "--n", "8,16", "--gen", "cycle:{n}", "--format", "csv"])
    out = capsys.readouterr().out.splitlines()
    assert out[0].startswith("algorithm,n,r,runs,median_queries")
    q = [float(line.split(",")[4]) for line in out[1:]]
    assert q == sorted(q)


def test_selftest(capsys):
    assert main(["selftest"]) == 0
    assert all(line.startswith("PASS") for line in capsys.readouterr().out.splitlines())
