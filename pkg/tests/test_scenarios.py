from __future__ import annotations

import json
import warnings

import pytest

from mcsgame.io import load_scenario, save_scenario, scenario_from_dict, scenario_to_dict
from mcsgame.model import ScenarioError
from mcsgame.routing import route_graph_skeleton
from mcsgame.scenarios import GenConfig, generate, real_world_fixture


def test_same_seed_same_scenario(tmp_path):
    a, b = generate(GenConfig(seed=9)), generate(GenConfig(seed=9))
    assert json.dumps(scenario_to_dict(a)) == json.dumps(scenario_to_dict(b))
    assert scenario_to_dict(generate(GenConfig(seed=10))) != scenario_to_dict(a)


def test_defaults():
    sc = generate(GenConfig())
    assert sc.num_tasks == 10 and sc.horizon == 15
    assert {int(t.reward) for t in sc.tasks} <= {10, 15, 20}
    assert sc.num_locations == sc.num_users + sc.num_tasks


def test_many_seeds_valid():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for seed in range(10_000):
            sc = generate(GenConfig(I=3, K=4, seed=seed))
            assert all(2 <= t.execution_time <= 15 for t in sc.tasks)
            assert all(1 <= u.reputation <= 3 for u in sc.users)
            if seed % 250 == 0:
                sc.validate(strict=True)


def test_bad_config():
    with pytest.raises(ValueError):
        GenConfig(I=0)
    with pytest.raises(ValueError):
        GenConfig(T=1)


def test_json_round_trip(tmp_path):
    sc = generate(GenConfig(I=4, K=5, seed=3))
    path = tmp_path / "s.json"
    save_scenario(sc, path)
    again = load_scenario(path)
    assert scenario_to_dict(again) == scenario_to_dict(sc)
    for user in range(1, 5):
        assert route_graph_skeleton(again, user).vertices == route_graph_skeleton(sc, user).vertices


def test_unknown_schema():
    with pytest.raises(ScenarioError):
        scenario_from_dict({"schema": "other/9"})


def test_missing_field():
    doc = scenario_to_dict(generate(GenConfig(I=2, K=2)))
    del doc["horizon"]
    with pytest.raises(ScenarioError):
        scenario_from_dict(doc)


class TestFixture:
    def test_shape(self):
        sc = real_world_fixture()
        assert (sc.num_users, sc.num_tasks, sc.num_locations) == (3, 3, 3)
        assert [u.mode for u in sc.users] == ["drive", "walk", "walk"]

    def test_movement_times(self):
        sc = real_world_fixture()
        assert sc.movement.time(1, 1, 2) == 3
        assert sc.movement.time(2, 2, 3) == 6

    def test_self_contained_export(self, tmp_path):
        doc = scenario_to_dict(real_world_fixture())
        assert "by_class" in doc["movement_time"]
        path = tmp_path / "fixture.json"
        path.write_text(json.dumps(doc))
        assert scenario_to_dict(load_scenario(path)) == doc
