from __future__ import annotations

import csv
import io
import json

import pytest

from tcgre.bench import (CSV_COLUMNS, BenchConfig, BenchRecord, ConfigError, load_config,
                         read_records, run_bench, run_cell, summarize)
from tcgre.generators import GenSpec

SMALL = {"solvers": ["hjsg", "jsg"], "families": ["random"], "node_counts": [6],
         "agent_counts": [2], "repeats": 3, "timeout": 30, "seed": 12}


def _cost_columns(text: str):
    return [(r["instance_id"], r["solver"], r["total_cost"])
            for r in csv.DictReader(io.StringIO(text))]


def test_six_records_no_violations():
    out = io.StringIO()
    records, summary = run_bench(load_config(json.dumps(SMALL)), out)
    assert len(records) == 6
    assert summary.ok and summary.cost_violations == []
    assert out.getvalue().splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(out.getvalue().splitlines()) == 7


def test_tiny_timeout_is_recorded():
    rec = run_cell("x", GenSpec("random", 15, 4, seed=1), "jsg", 0.001)
    assert rec.timed_out and rec.total_cost is None
    assert rec.wall_time >= 0.001


@pytest.mark.parametrize("doc,needle", [
    ({"solvers": []}, "empty"),
    ({"families": ["random"]}, "solver list"),
    ({"solvers": ["astar"]}, "unknown solvers"),
    ({"solvers": ["hjsg"], "colour": 3}, "unknown config field"),
    ({"solvers": ["hjsg"], "families": ["blob"]}, "unknown families"),
])
def test_config_errors(doc, needle):
    with pytest.raises(ConfigError, match=needle):
        load_config(json.dumps(doc))


def test_config_syntax_error():
    with pytest.raises(ConfigError, match="line"):
        load_config("{solvers: }")


def test_singular_aliases():
    cfg = load_config(json.dumps({"solver": "hjsg", "family": "voronoi", "node_count": 9}))
    assert cfg.solvers == ["hjsg"] and cfg.families == ["voronoi"] and cfg.node_counts == [9]


def test_rerun_reproduces_costs():
    cfg = load_config(json.dumps({**SMALL, "solvers": ["hjsg", "hces"],
                                  "families": ["random", "voronoi"]}))
    first, second = io.StringIO(), io.StringIO()
    run_bench(cfg, first)
    run_bench(cfg, second)
    assert _cost_columns(first.getvalue()) == _cost_columns(second.getvalue())


def test_workers_do_not_change_costs():
    serial, parallel = io.StringIO(), io.StringIO()
    run_bench(load_config(json.dumps(SMALL)), serial)
    run_bench(load_config(json.dumps({**SMALL, "workers": 2})), parallel)
    assert _cost_columns(serial.getvalue()) == _cost_columns(parallel.getvalue())


def test_read_back_and_summary_matches_records():
    out = io.StringIO()
    records, summary = run_bench(load_config(json.dumps(SMALL)), out)
    out.seek(0)
    again = read_records(out)
    assert [r.total_cost for r in again] == [r.total_cost for r in records]
    for name, row in summary.per_solver.items():
        mine = [r for r in records if r.solver == name]
        assert row["runs"] == len(mine)
        assert row["completed"] == sum(r.total_cost is not None for r in mine)
        assert row["completion_rate"] == row["completed"] / row["runs"]


def test_disagreement_is_flagged():
    recs = [BenchRecord("i", "random", 6, 2, "hjsg", 5.0, 0.1, False, 1, 1, 0),
            BenchRecord("i", "random", 6, 2, "jsg", 5.5, 0.1, False, 1, 1, 0),
            BenchRecord("i", "random", 6, 2, "ces", 9.0, 0.1, False, 1, 1, 0)]
    summary = summarize(recs)
    assert not summary.ok
    assert [(v["solver_a"], v["solver_b"]) for v in summary.cost_violations] == [("hjsg", "jsg")]
    assert "violations: 1" in summary.format()


def test_capped_oracle_is_a_missing_cost():
    rec = run_cell("x", GenSpec("random", 9, 2, seed=1), "oracle", 10)
    assert rec.total_cost is None and not rec.timed_out


def test_cells_follow_seed_offsets():
    cfg = BenchConfig(["hjsg"], repeats=2, seed=40)
    assert [iid for iid, _ in cfg.cells()] == ["random-n6-a2-s40", "random-n6-a2-s41"]
