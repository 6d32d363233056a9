"""JSON scenario files for the ``simulate`` command.

Example::

    {
      "game": "biased-lgi",
      "strategy": {"t1": [0, 0], "t2": [60, 0], "t3": [120, 0]},
      "intervener": {"target": "shared-qubit", "dirs": [[0, 0]]},
      "rounds": 1000000,
      "seed": 12345,
      "initial_state": null,
      "output": "result.json"
    }

Directions are either ``[theta_deg, phi_deg]`` (polar angle from +z,
azimuth from +x) or ``[x, y, z]``. ``initial_state`` is a Bloch triple for
the single-qubit games or ``"singlet"`` for ``nonlocal-temporal``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .correlators import InterventionSchedule, Target
from .games import GameKind, QuantumStrategy
from .montecarlo import MAX_SEED
from .qubit import BiqubitDensity, Direction, QubitDensity, make_singlet

FIELDS = ("game", "strategy", "intervener", "rounds", "seed", "initial_state", "output")
STRATEGY_NAMES = {
    "lgi": ("t1", "t2", "t3"),
    "chsh": ("a0", "a1", "b0", "b1"),
}

DirSpec = tuple[float, ...]


class ScenarioError(ValueError):
    """Malformed scenario; ``field`` names the offending entry."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def parse_direction(raw: Any, field: str) -> DirSpec:
    if not isinstance(raw, (list, tuple)) or len(raw) not in (2, 3):
        raise ScenarioError(field, "direction must be [theta_deg, phi_deg] or [x, y, z]")
    try:
        values = tuple(float(v) for v in raw)
    except (TypeError, ValueError):
        raise ScenarioError(field, "direction components must be numbers") from None
    if any(isinstance(v, bool) for v in raw) or not all(math.isfinite(v) for v in values):
        raise ScenarioError(field, "direction components must be finite numbers")
    try:
        direction_from_spec(values)
    except ValueError as exc:
        raise ScenarioError(field, str(exc)) from None
    return values


def direction_from_spec(spec: DirSpec) -> Direction:
    if len(spec) == 2:
        return Direction.spherical(math.radians(spec[0]), math.radians(spec[1]))
    return Direction.from_vector(spec)


@dataclass(frozen=True)
class Intervener:
    target: str
    dirs: tuple[DirSpec, ...]


@dataclass(frozen=True)
class Scenario:
    game: str
    strategy: dict[str, DirSpec]
    intervener: Intervener | None
    rounds: int
    seed: int
    initial_state: tuple[float, float, float] | str | None
    output: str

    @property
    def kind(self) -> GameKind:
        return GameKind(self.game)

    def quantum_strategy(self) -> QuantumStrategy:
        d = {name: direction_from_spec(v) for name, v in self.strategy.items()}
        if self.kind.is_lgi:
            return QuantumStrategy.lgi(d["t1"], d["t2"], d["t3"])
        return QuantumStrategy.chsh(d["a0"], d["a1"], d["b0"], d["b1"])

    def schedule(self) -> InterventionSchedule | None:
        if self.intervener is None:
            return None
        return InterventionSchedule(tuple(direction_from_spec(v) for v in self.intervener.dirs),
                                    Target(self.intervener.target))

    def state(self) -> QubitDensity | BiqubitDensity | None:
        if self.initial_state is None:
            return None
        if self.initial_state == "singlet":
            return make_singlet()
        return QubitDensity(self.initial_state)

    def to_dict(self) -> dict:
        return {
            "game": self.game,
            "strategy": {k: list(v) for k, v in self.strategy.items()},
            "intervener": None if self.intervener is None else {
                "target": self.intervener.target,
                "dirs": [list(v) for v in self.intervener.dirs],
            },
            "rounds": self.rounds,
            "seed": self.seed,
            "initial_state": list(self.initial_state) if isinstance(self.initial_state, tuple)
            else self.initial_state,
            "output": self.output,
        }


def _int_field(data: dict, field: str, lo: int, hi: int | None = None) -> int:
    value = data.get(field)
    if isinstance(value, bool) or not isinstance(value, int):
        raise ScenarioError(field, f"must be an integer, got {value!r}")
    if value < lo or (hi is not None and value > hi):
        bound = f"between {lo} and {hi}" if hi is not None else f"at least {lo}"
        raise ScenarioError(field, f"must be {bound}, got {value}")
    return value


def scenario_from_dict(data: Any) -> Scenario:
    if not isinstance(data, dict):
        raise ScenarioError("scenario", "top level must be a JSON object")
    unknown = sorted(set(data) - set(FIELDS))
    if unknown:
        raise ScenarioError(unknown[0], "unknown field")
    for required in ("game", "strategy", "rounds", "seed"):
        if required not in data:
            raise ScenarioError(required, "missing required field")

    try:
        kind = GameKind(data["game"])
    except ValueError:
        raise ScenarioError("game", f"unknown game kind {data['game']!r}") from None

    raw = data["strategy"]
    names = STRATEGY_NAMES["lgi" if kind.is_lgi else "chsh"]
    if not isinstance(raw, dict) or set(raw) != set(names):
        raise ScenarioError("strategy", f"{kind.value} needs exactly the directions {', '.join(names)}")
    strategy = {n: parse_direction(raw[n], f"strategy.{n}") for n in names}

    intervener = None
    if data.get("intervener") is not None:
        iv = data["intervener"]
        if not isinstance(iv, dict) or set(iv) - {"target", "dirs"}:
            raise ScenarioError("intervener", "must be an object with 'target' and 'dirs'")
        target = iv.get("target", Target.SHARED.value if kind.is_temporal else Target.BOB.value)
        try:
            target = Target(target)
        except ValueError:
            raise ScenarioError("intervener.target", f"unknown target {target!r}") from None
        if kind.is_temporal and target is not Target.SHARED:
            raise ScenarioError("intervener.target", f"{kind.value} interventions act on the shared qubit")
        if not kind.is_temporal and target is Target.SHARED:
            raise ScenarioError("intervener.target", "nonlocal-temporal needs alice-qubit or bob-qubit")
        dirs = iv.get("dirs", [])
        if not isinstance(dirs, list):
            raise ScenarioError("intervener.dirs", "must be a list of directions")
        intervener = Intervener(target.value, tuple(
            parse_direction(d, f"intervener.dirs[{i}]") for i, d in enumerate(dirs)))

    rounds = _int_field(data, "rounds", 1)
    seed = _int_field(data, "seed", 0, MAX_SEED)

    state = data.get("initial_state")
    if state is not None:
        if kind.is_temporal:
            if not isinstance(state, list) or len(state) != 3:
                raise ScenarioError("initial_state", "must be a Bloch triple [bx, by, bz]")
            try:
                state = tuple(float(c) for c in state)
                QubitDensity(state)
            except (TypeError, ValueError) as exc:
                raise ScenarioError("initial_state", str(exc)) from None
        elif state != "singlet":
            raise ScenarioError("initial_state", "nonlocal-temporal supports only \"singlet\"")

    output = data.get("output", "result.json")
    if not isinstance(output, str) or not output:
        raise ScenarioError("output", "must be a non-empty file path")

    return Scenario(kind.value, strategy, intervener, rounds, seed, state, output)


def load_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError("scenario", f"cannot read {path}: {exc.strerror}") from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError("scenario", f"invalid JSON: {exc}") from None
    return scenario_from_dict(data)


def dump_scenario(scenario: Scenario) -> str:
    return json.dumps(scenario.to_dict(), indent=2) + "\n"
