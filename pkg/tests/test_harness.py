import json
import subprocess
import sys

import numpy as np
import pytest

from swiptgrid.harness import (
    COMPARE_COLUMNS,
    SWEEP_COLUMNS,
    ExperimentConfig,
    InstanceFormatError,
    allocation_document,
    load_instance,
    run_compare,
    run_region,
    run_solve,
    run_sweep,
    run_verify,
)
from swiptgrid.allocator import optimal_allocation


def _write(tmp_path, name, doc):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


GOOD_DIRECT = {
    "gains": [2.0, 1.0],
    "harvest": [1.0, 8.0],
    "p_max": 10.0,
    "eta": 0.8,
}


def test_load_direct_instance(tmp_path):
    inst, order = load_instance(_write(tmp_path, "i.json", GOOD_DIRECT))
    assert inst.n_raus == 2 and order.tolist() == [0, 1]
    assert inst.eta == 0.8


def test_load_channel_instance_permutes_harvest(tmp_path):
    doc = {
        "harvest": [1.0, 2.0, 3.0, 4.0],
        "p_max": 5.0,
        "eta": 0.9,
        "channel": {"m": 2, "dist_low": 10, "dist_high": 50, "alpha": 2, "seed": 3},
    }
    inst, order = load_instance(_write(tmp_path, "c.json", doc))
    assert np.all(np.diff(inst.gains) <= 0)
    assert np.allclose(inst.harvest, np.array(doc["harvest"])[order])


@pytest.mark.parametrize(
    "mutate,needle",
    [
        (lambda d: d.pop("harvest"), "$.harvest"),
        (lambda d: d.pop("gains"), "exactly one"),
        (lambda d: d.update(channel={"m": 1, "dist_low": 1, "dist_high": 2, "alpha": 2, "seed": 0}), "exactly one"),
        (lambda d: d.update(gains=[1.0, 2.0]), "$.gains"),
        (lambda d: d.update(gains=[2.0, float("nan")]), "$.gains[1]"),
        (lambda d: d.update(harvest=[1.0, -2.0]), "$.harvest[1]"),
        (lambda d: d.update(gains=[2.0]), "$.gains"),
        (lambda d: d.update(eta=1.5), "$"),
    ],
)
def test_load_instance_diagnostics(tmp_path, mutate, needle):
    doc = json.loads(json.dumps(GOOD_DIRECT))
    mutate(doc)
    with pytest.raises((InstanceFormatError, ValueError)) as err:
        load_instance(_write(tmp_path, "bad.json", doc))
    assert needle in str(err.value)


def test_load_instance_rejects_broken_json(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json", encoding="utf-8")
    with pytest.raises(InstanceFormatError):
        load_instance(path)


def test_solve_document_schema(tmp_path):
    doc = run_solve(_write(tmp_path, "i.json", GOOD_DIRECT))
    for key in ("scenario", "powers", "charge", "discharge", "states", "sum_state",
                "kappa_g", "kappa_l", "classification", "objective"):
        assert key in doc
    assert doc["scenario"] == "neutral"
    assert doc["kappa_l"] == pytest.approx(0.8**2 * doc["kappa_g"], rel=1e-15)
    assert len(doc["powers"]) == 2
    assert abs(doc["sum_state"]) < 1e-9


def test_solve_writes_deterministic_file(tmp_path):
    src = _write(tmp_path, "i.json", GOOD_DIRECT)
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    run_solve(src, out_path=out1)
    run_solve(src, out_path=out2)
    assert out1.read_bytes() == out2.read_bytes()


def test_single_rau_document(tmp_path):
    doc = run_solve(_write(tmp_path, "one.json", {
        "gains": [1.0], "harvest": [4.0], "p_max": 5.0, "eta": 0.8,
    }))
    assert doc["scenario"] in ("neutral", "profitable")
    assert "sum_state" in doc and len(doc["classification"]) == 1


def test_allocation_document_roundtrips_through_json(tmp_path):
    inst, order = load_instance(GOOD_DIRECT)
    doc = allocation_document(optimal_allocation(inst), order=order)
    assert json.loads(json.dumps(doc)) == doc


def test_config_defaults_and_validation():
    cfg = ExperimentConfig(n_values=[2], seed=1)
    assert cfg.m_values == [4] and cfg.eta_values == [0.8]
    with pytest.raises(ValueError):
        ExperimentConfig(n_values=[], seed=1)
    with pytest.raises(ValueError):
        ExperimentConfig(n_values=[2], trials=0, seed=1)
    with pytest.raises(ValueError):
        ExperimentConfig(n_values=[2], policies=["nonsense"], seed=1)
    with pytest.raises(ValueError):
        ExperimentConfig(n_values=[2], eta_values=[1.5], seed=1)


def test_config_seed_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("SWIPTGRID_SEED", "777")
    cfg = ExperimentConfig(n_values=[2])
    assert cfg.seed == 777
    monkeypatch.delenv("SWIPTGRID_SEED")
    assert ExperimentConfig(n_values=[2]).seed == 12345
    assert ExperimentConfig(n_values=[2], seed=5).seed == 5


def test_config_from_file_rejects_unknown_fields(tmp_path):
    path = _write(tmp_path, "cfg.json", {"n_values": [2], "bogus": 1})
    with pytest.raises(ValueError):
        ExperimentConfig.from_file(path)


def _tiny_config(**overrides):
    base = dict(n_values=[2, 3], m_values=[2], p_max_values=[5.0],
                eta_values=[0.8], trials=5, seed=42,
                policies=["optimal", "greedy", "waterfilling"])
    base.update(overrides)
    return ExperimentConfig(**base)


def test_sweep_layout_and_determinism(tmp_path):
    cfg = _tiny_config()
    text1 = run_sweep(cfg, out_path=tmp_path / "a.csv")
    text2 = run_sweep(cfg)
    assert text1 == text2
    lines = text1.strip().split("\n")
    assert lines[0] == ",".join(SWEEP_COLUMNS)
    assert len(lines) == 1 + 2 * 3  # combos x policies
    assert (tmp_path / "a.csv").read_text(encoding="utf-8") == text1


def test_sweep_different_seed_changes_output():
    assert run_sweep(_tiny_config()) != run_sweep(_tiny_config(seed=43))


def test_compare_counts_no_violations_and_pairs_policies():
    cfg = _tiny_config(trials=10)
    lines = run_compare(cfg).strip().split("\n")
    assert lines[0] == ",".join(COMPARE_COLUMNS)
    rows = [dict(zip(COMPARE_COLUMNS, line.split(","))) for line in lines[1:]]
    for row in rows:
        assert row["dominance_violations"] == "0"
    by_combo = {}
    for row in rows:
        by_combo.setdefault(row["n"], {})[row["policy"]] = float(row["mean_objective"])
    for combo in by_combo.values():
        assert combo["optimal"] >= combo["greedy"] - 1e-12
        assert combo["optimal"] >= combo["waterfilling"] - 1e-12


def test_compare_requires_reference_policy():
    with pytest.raises(ValueError):
        run_compare(_tiny_config(policies=["greedy", "waterfilling"]))
    with pytest.raises(ValueError):
        run_compare(_tiny_config(policies=["optimal"]))


def test_sweep_rejects_overflow_scale_config_with_estimate():
    cfg = _tiny_config(n_values=[32] * 40, trials=10_000_000)
    with pytest.raises(ValueError) as err:
        run_sweep(cfg)
    assert "RAU-trials" in str(err.value)


def test_region_monotone_and_boundary(tmp_path):
    src = _write(tmp_path, "i.json", GOOD_DIRECT)
    text, rho = run_region(src, 25, out_path=tmp_path / "r.csv", q_min=2.0)
    lines = text.strip().split("\n")
    assert lines[0] == "rho,wit,wet"
    rows = [tuple(map(float, line.split(","))) for line in lines[1:]]
    assert len(rows) == 25
    assert rows[-1][0] == 1.0 and rows[-1][2] == 0.0
    assert all(b[1] >= a[1] for a, b in zip(rows, rows[1:]))
    assert all(b[2] <= a[2] for a, b in zip(rows, rows[1:]))
    assert rho is not None and 0 < rho <= 1


def test_region_without_demand_returns_no_ratio(tmp_path):
    src = _write(tmp_path, "i.json", GOOD_DIRECT)
    _, rho = run_region(src, 5)
    assert rho is None


def test_verify_reports_clean_small_run():
    cfg = ExperimentConfig(n_values=[2, 3], m_values=[2], p_max_values=[5.0],
                           eta_values=[0.8], trials=3, seed=9, policies=["optimal"])
    report = run_verify(cfg, grid_steps=11)
    assert report["instances"] == 6
    assert report["grid_checked"] == 6 and report["ascent_checked"] == 6
    assert report["violations"] == []
    assert report["max_grid_gap"] <= 1e-4


def test_cli_entry_point_smoke(tmp_path):
    src = _write(tmp_path, "i.json", GOOD_DIRECT)
    out = subprocess.run(
        [sys.executable, "-m", "swiptgrid.cli", "solve", str(src)],
        capture_output=True, text=True, check=True,
    )
    doc = json.loads(out.stdout)
    assert doc["scenario"] == "neutral"
