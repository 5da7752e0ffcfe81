"""命令行端到端测试"""
import json
from pathlib import Path

import pandas as pd
import pytest
import yaml

from app.io.ingest import ingest_city, read_observed
from app.io.persistence import read_agents
from app.main import dispatch
from app.utils.errors import InputValidationError

SMALL_CONFIG = {
    "seed": 5,
    "synthetic_city": {"rows": 4, "cols": 4},
    "synthesis": {"n_agents": 60},
    "nsga2": {"pop_size": 10, "generations": 4, "k": 5},
    "market": {"alpha": [0.8] * 12},
}


def write_config(tmp_path: Path, **sections) -> str:
    config = {**SMALL_CONFIG, **sections}
    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(config), encoding="utf-8")
    return str(path)


def snapshot(out: Path) -> dict:
    return {p.name: p.read_bytes() for p in sorted(out.iterdir()) if p.is_file()}


def error_payload(captured: str) -> dict:
    lines = [line for line in captured.splitlines() if line.startswith("{")]
    assert lines, captured
    return json.loads(lines[-1])


def test_synth_city_is_deterministic(tmp_path):
    cfg = write_config(tmp_path)
    assert dispatch(["synth-city", "--config", cfg, "--out", str(tmp_path / "a")]) == 0
    assert dispatch(["synth-city", "--config", cfg, "--out", str(tmp_path / "b")]) == 0
    for name in ("zones.csv", "facilities.csv", "adjacency.csv", "zone_stats.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    zones = pd.read_csv(tmp_path / "a" / "zones.csv")
    assert len(zones) == 16
    assert zones["air_class"].between(1, 5).all()


def test_seed_flag_changes_city(tmp_path):
    cfg = write_config(tmp_path)
    dispatch(["synth-city", "--config", cfg, "--out", str(tmp_path / "a")])
    dispatch(["synth-city", "--config", cfg, "--seed", "6", "--out", str(tmp_path / "b")])
    assert (tmp_path / "a" / "zones.csv").read_bytes() != (tmp_path / "b" / "zones.csv").read_bytes()
    echoed = yaml.safe_load((tmp_path / "b" / "effective_config.yaml").read_text(encoding="utf-8"))
    assert echoed["seed"] == 6


def test_run_twice_gives_identical_outputs(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert dispatch(["run", "--config", cfg, "--out", str(out)]) == 0
    first = snapshot(out)
    assert dispatch(["run", "--config", cfg, "--out", str(out)]) == 0
    assert snapshot(out) == first

    for name in ("agents.csv", "alternatives.csv", "assignments.csv", "events.jsonl", "capacity.csv",
                 "hist_alternatives.csv", "hist_rank.csv", "dist_work.csv", "dist_former.csv",
                 "zone_summary.csv", "category_summary.csv", "zone_highlights.csv", "effective_config.yaml"):
        assert name in first
    assignments = pd.read_csv(out / "assignments.csv")
    assert len(assignments) == SMALL_CONFIG["synthesis"]["n_agents"]
    assert set(assignments["status"]) <= {"housed", "unhoused"}


def test_worker_count_does_not_change_outputs(tmp_path):
    cfg = write_config(tmp_path)
    single, pooled = tmp_path / "single", tmp_path / "pooled"
    assert dispatch(["run", "--config", cfg, "--out", str(single), "--workers", "1"]) == 0
    assert dispatch(["run", "--config", cfg, "--out", str(pooled), "--workers", "2"]) == 0

    first, second = snapshot(single), snapshot(pooled)
    assert sorted(first) == sorted(second)
    assert [name for name in first if first[name] != second[name]] == []


def test_validate_against_own_assignments(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    dispatch(["run", "--config", cfg, "--out", str(out)])
    assert dispatch(["validate", "--config", cfg, "--out", str(out),
                     "--observed", str(out / "assignments.csv")]) == 0

    metrics = pd.read_csv(out / "validation.csv").set_index("metric")["value"]
    assert metrics["identical_zone"] == 100.0
    assert metrics["in_alternatives"] == 100.0
    assert metrics["distance_gt_10km"] == 0.0
    assert (out / "validation_distance.csv").exists()
    assert (out / "validation_rent.csv").exists()


def test_choose_then_reuse_matches_full_run(tmp_path):
    cfg = write_config(tmp_path)
    staged, direct = tmp_path / "staged", tmp_path / "direct"
    assert dispatch(["choose", "--config", cfg, "--out", str(staged)]) == 0
    assert (staged / "alternatives.csv").exists()
    assert dispatch(["run", "--config", cfg, "--out", str(staged), "--reuse-alternatives"]) == 0
    assert dispatch(["run", "--config", cfg, "--out", str(direct)]) == 0

    for name in ("agents.csv", "alternatives.csv", "assignments.csv", "events.jsonl"):
        assert (staged / name).read_bytes() == (direct / name).read_bytes()


def test_report_regenerates_same_tables(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    dispatch(["run", "--config", cfg, "--out", str(out)])
    before = (out / "category_summary.csv").read_bytes()
    (out / "category_summary.csv").unlink()
    assert dispatch(["report", "--config", cfg, "--out", str(out)]) == 0
    assert (out / "category_summary.csv").read_bytes() == before


def test_ingested_city_matches_synthetic(tmp_path):
    cfg = write_config(tmp_path)
    city_dir = tmp_path / "city"
    dispatch(["synth-city", "--config", cfg, "--out", str(city_dir)])
    dispatch(["gen-agents", "--config", cfg, "--out", str(tmp_path / "synthetic")])

    ingest_cfg = write_config(
        tmp_path,
        city={"zones_path": str(city_dir / "zones.csv"), "facilities_path": str(city_dir / "facilities.csv"),
              "adjacency_path": str(city_dir / "adjacency.csv")},
        synthesis={"n_agents": 60, "zone_stats_path": str(city_dir / "zone_stats.csv")},
    )
    assert dispatch(["gen-agents", "--config", ingest_cfg, "--out", str(tmp_path / "ingested")]) == 0
    assert (tmp_path / "synthetic" / "agents.csv").read_bytes() == (tmp_path / "ingested" / "agents.csv").read_bytes()


def test_ingest_rejects_bad_air_class(tmp_path, capsys):
    cfg = write_config(tmp_path)
    city_dir = tmp_path / "city"
    dispatch(["synth-city", "--config", cfg, "--out", str(city_dir)])
    zones = pd.read_csv(city_dir / "zones.csv")
    zones.loc[0, "air_class"] = 7
    zones.to_csv(city_dir / "zones.csv", index=False)
    capsys.readouterr()

    bad_cfg = write_config(
        tmp_path,
        city={"zones_path": str(city_dir / "zones.csv"), "facilities_path": str(city_dir / "facilities.csv")},
        synthesis={"n_agents": 60, "zone_stats_path": str(city_dir / "zone_stats.csv")},
    )
    assert dispatch(["gen-agents", "--config", bad_cfg, "--out", str(tmp_path / "out")]) == 1
    payload = error_payload(capsys.readouterr().err)
    assert payload["status"] == "error"
    assert payload["type"] == "InputValidationError"
    assert {"row": 2, "column": "air_class"}.items() <= payload["issues"][0].items()


def test_ingest_rejects_coverage_above_one(tmp_path):
    cfg = write_config(tmp_path)
    city_dir = tmp_path / "city"
    dispatch(["synth-city", "--config", cfg, "--out", str(city_dir)])
    zones = pd.read_csv(city_dir / "zones.csv")
    zones.loc[2, "cov_bus"] = 1.3
    zones.loc[3, "cov_subway"] = -0.1
    zones.to_csv(city_dir / "zones.csv", index=False)

    with pytest.raises(InputValidationError) as exc:
        ingest_city(city_dir / "zones.csv", city_dir / "facilities.csv")
    assert [(row, column) for row, column, _ in exc.value.issues] == [(4, "cov_bus"), (5, "cov_subway")]


def test_ingest_missing_column_named(tmp_path):
    cfg = write_config(tmp_path)
    city_dir = tmp_path / "city"
    dispatch(["synth-city", "--config", cfg, "--out", str(city_dir)])
    pd.read_csv(city_dir / "zones.csv").drop(columns="rent_per_m2").to_csv(city_dir / "zones.csv", index=False)
    with pytest.raises(InputValidationError, match="rent_per_m2"):
        ingest_city(city_dir / "zones.csv", city_dir / "facilities.csv")


def test_agents_file_rejects_month_out_of_range(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    assert dispatch(["gen-agents", "--config", cfg, "--out", str(out)]) == 0
    agents = pd.read_csv(out / "agents.csv")
    agents.loc[1, "relocation_month"] = 13
    agents.loc[4, "relocation_month"] = 0
    agents.to_csv(out / "agents.csv", index=False)

    with pytest.raises(InputValidationError, match="2 项") as exc:
        read_agents(out / "agents.csv")
    assert [(row, column) for row, column, _ in exc.value.issues] == \
        [(3, "relocation_month"), (6, "relocation_month")]


def test_observed_file_validation(tmp_path):
    path = tmp_path / "observed.csv"
    path.write_text("agent_id,zone_id,month\n1,3,2\n2,,\n1,4,5\n", encoding="utf-8")
    with pytest.raises(InputValidationError, match="1 项"):
        read_observed(path)
    path.write_text("agent_id,zone_id,month\n2,3,2\n1,4,5\n", encoding="utf-8")
    assert [(o.agent_id, o.zone, o.month) for o in read_observed(path)] == [(1, 4, 5), (2, 3, 2)]


def test_unknown_subcommand_exits_with_usage_error():
    with pytest.raises(SystemExit) as exc:
        dispatch(["bogus"])
    assert exc.value.code == 2


def test_bad_seed_is_usage_error():
    with pytest.raises(SystemExit) as exc:
        dispatch(["synth-city", "--seed", "-1"])
    assert exc.value.code == 2


def test_bad_config_reports_json_error(tmp_path, capsys):
    path = tmp_path / "config.yaml"
    path.write_text("seed: 1\nnsga2:\n  popsize: 3\n", encoding="utf-8")
    assert dispatch(["synth-city", "--config", str(path), "--out", str(tmp_path / "out")]) == 1
    payload = error_payload(capsys.readouterr().err)
    assert payload["type"] == "ConfigError"
    assert "popsize" in payload["message"]


def test_repeat_and_sweep_tables(tmp_path):
    cfg = write_config(tmp_path)
    out = tmp_path / "out"
    dispatch(["run", "--config", cfg, "--out", str(out)])
    assert dispatch(["sweep-k", "--config", cfg, "--out", str(out), "--observed", str(out / "assignments.csv"),
                     "--k-values", "1,3,5"]) == 0
    sweep = pd.read_csv(out / "k_sensitivity.csv")
    assert sweep["k"].tolist() == [1, 3, 5]
    assert sweep.iloc[-1]["identical_zone"] == 100.0

    assert dispatch(["repeat", "--config", cfg, "--out", str(out), "--seeds", "1,2"]) == 0
    repeat = pd.read_csv(out / "repeatability.csv", dtype={"seed": str})
    assert repeat["seed"].tolist() == ["1", "2", "max_diff_pp"]
