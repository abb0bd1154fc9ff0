from __future__ import annotations

import json

from tcgre.cli import main
from tcgre.model import load_instance


def test_gen_solve_round_trip(tmp_path, capsys):
    inst_file = tmp_path / "inst.json"
    sol_file = tmp_path / "sol.json"
    assert main(["gen", "--family", "voronoi", "--nodes", "8", "--agents", "2",
                 "--seed", "5", "--out", str(inst_file)]) == 0
    inst = load_instance(inst_file.read_text())
    assert inst.graph.n_nodes == 8 and inst.n_robots == 2
    assert main(["solve", "--solver", "hjsg", "--in", str(inst_file), "--timeout", "30",
                 "--out", str(sol_file)]) == 0
    doc = json.loads(sol_file.read_text())
    assert doc["violations"] == []
    assert doc["total_cost"] == sum(doc["per_robot_costs"])
    assert "hjsg: ok" in capsys.readouterr().err


def test_gen_rejects_bad_grid(capsys):
    assert main(["gen", "--family", "rect_perfect", "--nodes", "7", "--agents", "2"]) == 2
    assert "r*c" in capsys.readouterr().err


def test_solve_reports_oracle_cap(tmp_path, capsys):
    inst_file = tmp_path / "inst.json"
    main(["gen", "--nodes", "9", "--agents", "2", "--out", str(inst_file)])
    assert main(["solve", "--solver", "oracle", "--in", str(inst_file)]) == 2
    assert "oracle limited" in capsys.readouterr().err


def test_solve_rejects_invalid_instance(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("")
    assert main(["solve", "--in", str(bad)]) == 2
    assert "empty document" in capsys.readouterr().err


def test_bench_writes_csv_and_summary(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"solvers": ["hjsg", "jsg", "hces"], "node_counts": [6],
                               "agent_counts": [2, 3], "repeats": 2, "timeout": 20}))
    out = tmp_path / "runs.csv"
    assert main(["bench", "--config", str(cfg), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("instance_id,family,node_count")
    assert len(lines) == 1 + 2 * 2 * 3
    summary = json.loads((tmp_path / "runs.summary.json").read_text())
    assert summary["cost_violations"] == []
    assert set(summary["per_solver"]) == {"hjsg", "jsg", "hces"}
    assert "cost-equality violations: 0" in capsys.readouterr().out


def test_bench_config_error(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"solvers": []}))
    assert main(["bench", "--config", str(cfg), "--out", str(tmp_path / "x.csv")]) == 2
    assert "config error" in capsys.readouterr().err
