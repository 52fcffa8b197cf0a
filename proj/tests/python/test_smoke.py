"""Smoke tests for the arrowlab Python bindings."""

import json
import math

import pytest

import arrowlab as al


def test_module_imports_and_doc():
    assert "billiard" in al.__doc__


def test_pair_prediction_and_resolution():
    d1 = al.Disk()
    d1.position = al.Vec2(0.0, 0.0)
    d1.velocity = al.Vec2(1.0, 0.0)
    d1.radius = 0.5
    d2 = al.Disk()
    d2.id = 1
    d2.position = al.Vec2(4.0, 0.0)
    d2.velocity = al.Vec2(0.0, 0.0)
    d2.radius = 0.5
    t = al.predict_pair_collision(d1, d2, 100.0)
    assert t == pytest.approx(3.0, abs=1e-12)

    d2.position = al.Vec2(1.0, 0.0)
    v1, v2 = al.resolve_pair_collision(d1, d2)
    assert v1.x == pytest.approx(0.0)
    assert v2.x == pytest.approx(1.0)


def test_advance_and_reverse_roundtrip():
    cfg = al.ScenarioConfig.from_json(
        json.dumps({"engine": "event", "disks": 8, "seed": 11,
                    "initial": {"kind": "thermal"}})
    )
    state = al.build_initial_event(cfg)
    e0 = state.kinetic_energy()
    budget = al.Budget()
    budget.max_collisions = 50
    al.advance(state, budget)
    assert state.collision_count == 50
    assert state.kinetic_energy() == pytest.approx(e0, rel=1e-12)
    al.reverse_momenta(state)
    al.reverse_momenta(state)
    al.validate_state(state)


def test_bitrev_exact_echo():
    cfg = al.ScenarioConfig.from_json(
        json.dumps({"engine": "bitrev", "disks": 6, "seed": 2, "radius": 0.04,
                    "run": {"length": 2000, "sampling_interval": 100}})
    )
    state = al.build_initial_bitrev(cfg)
    start = al.build_initial_bitrev(cfg)
    for _ in range(2000):
        al.step_forward(state)
    al.reverse(state)
    for _ in range(2000):
        al.step_forward(state)
    al.reverse(state)
    assert al.bitwise_equal(state, start)


def test_entropy_observables():
    cfg = al.ScenarioConfig.from_json(
        json.dumps({"engine": "event", "disks": 26, "seed": 4})
    )
    state = al.build_initial_event(cfg)
    grid = al.coarse_grain(state, 8, 8)
    assert grid.total == 26
    # ordered block + incident ball: two occupied cells
    assert al.boltzmann_entropy(grid) == pytest.approx(math.log(26.0), abs=1e-9)
    assert al.equipartition_index(state) == pytest.approx(5.0, abs=1e-9)


def test_run_scenario_via_json_reports_exact_echo():
    report_text = al.run_scenario_json(json.dumps({
        "engine": "bitrev", "disks": 10, "seed": 3, "radius": 0.03,
        "run": {"length": 2000, "sampling_interval": 200},
        "reverse_at": 1000,
        "equilibrium_reference": {"runs": 3, "run_length": 300},
    }))
    report = json.loads(report_text)
    assert report["echo"]["exact"] is True
    assert report["echo"]["pos_rms"] == 0.0
    assert report["verdict"] == "reversed"
    assert report["seed"] == 3
    assert len(report["config_hash"]) == 16


def test_config_validation_raises():
    with pytest.raises(ValueError):
        al.ScenarioConfig.from_json(json.dumps({"engine": "event"}))
    with pytest.raises(ValueError):
        al.ScenarioConfig.from_json(json.dumps(
            {"engine": "event", "disks": 8, "seed": 1, "nope": True}))


def test_snapshot_svg_renders():
    cfg = al.ScenarioConfig.from_json(
        json.dumps({"engine": "event", "disks": 5, "seed": 9,
                    "initial": {"kind": "thermal"}})
    )
    state = al.build_initial_event(cfg)
    svg = al.render_snapshot_svg(state, velocity_arrows=True)
    assert svg.startswith("<svg")
    assert svg.count("<circle") == 5
