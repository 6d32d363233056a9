import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from temporal_games.correlators import Target
from temporal_games.qubit import BiqubitDensity
from temporal_games.scenario import (
    ScenarioError,
    dump_scenario,
    load_scenario,
    scenario_from_dict,
)

BASE = {
    "game": "biased-lgi",
    "strategy": {"t1": [0, 0], "t2": [60, 0], "t3": [120, 0]},
    "intervener": {"target": "shared-qubit", "dirs": [[0, 0]]},
    "rounds": 1000,
    "seed": 12345,
    "initial_state": None,
    "output": "result.json",
}


def with_(**changes):
    d = json.loads(json.dumps(BASE))
    d.update(changes)
    return d


def test_parse_basic():
    sc = scenario_from_dict(BASE)
    assert sc.kind.value == "biased-lgi"
    strat = sc.quantum_strategy()
    assert strat.a_dirs[2] == strat.b_dirs[2]
    assert sc.schedule().target is Target.SHARED and sc.schedule().n == 1


def test_xyz_directions_normalize():
    sc = scenario_from_dict(with_(strategy={"t1": [0, 0, 2], "t2": [1, 0, 1], "t3": [3, 0, 0]}))
    d = sc.quantum_strategy().a_dirs[1]
    assert (d.x, d.y, d.z) == pytest.approx((0, 0, 1))


@pytest.mark.parametrize("changes,field", [
    ({"rounds": 0}, "rounds"),
    ({"rounds": 2.5}, "rounds"),
    ({"seed": -1}, "seed"),
    ({"seed": 2**64}, "seed"),
    ({"game": "poker"}, "game"),
    ({"strategy": {"t1": [0, 0], "t2": [60, 0]}}, "strategy"),
    ({"strategy": {"t1": [0, 0], "t2": [60, 0], "t3": [0, 0, 0]}}, "strategy.t3"),
    ({"strategy": {"t1": [0], "t2": [60, 0], "t3": [1, 0]}}, "strategy.t1"),
    ({"intervener": {"target": "bob-qubit", "dirs": [[0, 0]]}}, "intervener.target"),
    ({"intervener": {"target": "shared-qubit", "dirs": [["a", 0]]}}, "intervener.dirs[0]"),
    ({"initial_state": [1, 1, 1]}, "initial_state"),
    ({"initial_state": "singlet"}, "initial_state"),
    ({"output": ""}, "output"),
    ({"colour": "red"}, "colour"),
])
def test_validation_names_field(changes, field):
    with pytest.raises(ScenarioError) as err:
        scenario_from_dict(with_(**changes))
    assert err.value.field == field
    assert str(err.value).startswith(field)


def test_missing_field():
    d = with_()
    del d["seed"]
    with pytest.raises(ScenarioError, match="seed"):
        scenario_from_dict(d)


def test_nonlocal_scenario():
    sc = scenario_from_dict({
        "game": "nonlocal-temporal",
        "strategy": {"a0": [0, 0], "a1": [90, 0], "b0": [135, 180], "b1": [135, 0]},
        "intervener": {"target": "alice-qubit", "dirs": [[90, 90]]},
        "rounds": 10, "seed": 0, "initial_state": "singlet",
    })
    assert isinstance(sc.state(), BiqubitDensity)
    assert sc.schedule().target is Target.ALICE
    with pytest.raises(ScenarioError):
        scenario_from_dict({**sc.to_dict(), "intervener": {"target": "shared-qubit", "dirs": []}})


def test_file_round_trip(tmp_path):
    path = tmp_path / "s.json"
    sc = scenario_from_dict(with_(initial_state=[0.1, 0.2, 0.3]))
    path.write_text(dump_scenario(sc))
    assert load_scenario(path) == sc


def test_bad_files(tmp_path):
    with pytest.raises(ScenarioError):
        load_scenario(tmp_path / "missing.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ScenarioError, match="invalid JSON"):
        load_scenario(bad)


angles = st.floats(-360, 360, allow_nan=False)
vec = st.tuples(st.floats(-5, 5, allow_nan=False), st.floats(-5, 5, allow_nan=False),
                st.floats(0.5, 5, allow_nan=False))
dir_spec = st.one_of(st.tuples(angles, angles).map(list), vec.map(list))


@given(
    st.sampled_from(["lgi", "biased-lgi", "biased-tchsh"]),
    st.lists(dir_spec, min_size=4, max_size=4),
    st.lists(dir_spec, max_size=4),
    st.integers(1, 10**9),
    st.integers(0, 2**64 - 1),
    st.one_of(st.none(), st.just([0.0, 0.6, 0.8])),
)
def test_round_trip_property(game, dirs, mids, rounds, seed, state):
    names = ["t1", "t2", "t3"] if "lgi" in game else ["a0", "a1", "b0", "b1"]
    data = {
        "game": game,
        "strategy": dict(zip(names, dirs)),
        "intervener": {"target": "shared-qubit", "dirs": mids},
        "rounds": rounds, "seed": seed, "initial_state": state, "output": "o.json",
    }
    sc = scenario_from_dict(data)
    again = scenario_from_dict(json.loads(dump_scenario(sc)))
    assert again == sc
    assert dump_scenario(again) == dump_scenario(sc)
