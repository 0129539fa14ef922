"""End-to-end checks that the compiled module exposes the core operations."""

import json
import math

import pytest

import jmlab


def test_cone_constants():
    assert jmlab.cone_radius(1.0) == 0.5
    assert jmlab.to_cone_coordinate(1.0, 1.0) == pytest.approx(2.0, abs=1e-12)
    assert jmlab.from_cone_coordinate(2.0, 1.0) == pytest.approx(1.0, abs=1e-12)


def test_jm_length_radial_fall():
    pot = jmlab.Potential.central(2, 1.0)
    # the collision-segment power rule is exact on radial paths
    length = jmlab.jm_length(0.0, pot, [[1.0, 0.0], [0.0, 0.0]], [0.0, 1.0])
    assert length == pytest.approx(2.0 * math.sqrt(2.0), abs=1e-12)


def test_potential_evaluation():
    pot = jmlab.Potential.power_law(2, [1.0, 1.0], 1.0, 1.0)
    assert pot.evaluate([0.0, 0.0, 1.0, 0.0]) == pytest.approx(1.0)
    assert math.isinf(pot.evaluate([0.5, 0.5, 0.5, 0.5]))
    assert pot.collision_distance([0.0, 0.0, 1.0, 0.0]) == pytest.approx(1.0)


def test_step_metric_classification():
    assert not jmlab.marchal_condition(1.0, 3.9, 0.5, 1.0, "PaperLiteral")
    assert jmlab.marchal_condition(1.0, 4.0, 0.5, 1.0, "PaperLiteral")
    band = jmlab.band_minimum(1.0, 2.0, 0.5, 1.0, "PaperLiteral")
    assert not band["through_vertex"]
    assert band["x_star"] == pytest.approx(0.5635252369314108, abs=1e-12)
    assert band["length"] == pytest.approx(1.7521751493354059, abs=1e-12)
    vertex = jmlab.band_minimum(1.0, 4.0, 0.5, 1.0, "PaperLiteral")
    assert vertex["through_vertex"]
    assert vertex["length"] == pytest.approx(2.0, abs=1e-12)


def test_oracle_agrees_with_closed_form():
    res = jmlab.oracle_shortest_path(1.0, 4.0, 0.5, 1.0, "PaperLiteral",
                                     resolution=150, neighbor_order=4)
    assert res["hits_vertex"]
    assert res["length"] == pytest.approx(2.0, rel=0.02)


def test_curvature():
    assert jmlab.kepler_gauss_curvature(2.0, -0.25) == pytest.approx(0.5, rel=1e-12)
    pot = jmlab.Potential.central(2, 1.0)
    assert abs(jmlab.gauss_curvature_fd(0.0, pot, [1.0, 0.5])) < 1e-4


def test_minimize_and_bridge():
    pot = jmlab.Potential.central(2, 1.0)
    out = jmlab.minimize_fixed_time([1.0, 0.0], [0.0, 1.0], 1.2, pot,
                                    samples=25, starts=2, max_iterations=20000,
                                    tolerance=1e-6, seed=3)
    assert out["converged"]
    assert out["action"] > 0.0
    bridge = jmlab.action_length_bridge(out["path"]["points"],
                                        out["path"]["params"], pot)
    assert bridge["slack"] >= -1e-9


def test_validate_config_reports_all_violations():
    errors = jmlab.validate_config("{}")
    assert len(errors) == 2
    assert any("name" in e for e in errors)
    assert any("kind" in e for e in errors)
    errors = jmlab.validate_config(json.dumps(
        {"name": "t", "kind": "BrakeCheck", "alpha": 2.5}))
    assert any("alpha" in e for e in errors)


def test_run_scenario_round_trip(tmp_path):
    cfg = {
        "name": "smoke-brake",
        "kind": "BrakeCheck",
        "steps": 500,
        "duration": 0.2,
    }
    rc, log = jmlab.run_scenario(json.dumps(cfg), seed=1,
                                 output_dir=str(tmp_path), tolerance=1e-6)
    assert rc == 0, log
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["status"] == "ok"
    assert (tmp_path / "brake.csv").exists()


def test_list_scenarios_mentions_all_kinds():
    text = jmlab.list_scenarios()
    for kind in ("KeplerCone", "CounterexampleSweep", "SectorTrace", "OracleRun",
                 "Minimize", "BlowupDemo", "BridgeCheck", "BrakeCheck"):
        assert kind in text
