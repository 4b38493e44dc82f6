"""Named teleportation strategies and their JSON file format.

A scenario file stores each unitary as an axis-angle record::

    {"name": "rotated_pauli",
     "U": [{"axis": [0, 0, 1], "angle": 0.0}, ... four records ...],
     "V": [... four records ...]}

``V`` may be omitted for files that only supply a measurement (``optimize``).
Floats are written with Python's shortest round-trip repr, so a file written by
:func:`write_scenario` re-parses to bit-identical records.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .qubit import axis_angle_from_unitary, pauli, random_su2, unitary_from_axis_angle
from .teleportation import ConfigError, ProtocolConfig

DOUBLE_SWAP = (1, 0, 3, 2)


class ScenarioError(ValueError):
    pass


@dataclass(frozen=True)
class AxisAngle:
    axis: tuple[float, float, float]
    angle: float

    def unitary(self) -> np.ndarray:
        return unitary_from_axis_angle(self.axis, self.angle)

    @classmethod
    def of(cls, X: np.ndarray) -> "AxisAngle":
        n, theta = axis_angle_from_unitary(X)
        return cls(tuple(float(c) for c in n), float(theta))

    def to_json(self) -> dict:
        return {"axis": list(self.axis), "angle": self.angle}

    @classmethod
    def from_json(cls, obj) -> "AxisAngle":
        try:
            axis = tuple(float(c) for c in obj["axis"])
            angle = float(obj["angle"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ScenarioError(f"bad axis-angle record {obj!r}: {exc}") from None
        if len(axis) != 3 or not all(math.isfinite(c) for c in axis + (angle,)):
            raise ScenarioError(f"bad axis-angle record {obj!r}")
        if math.hypot(*axis) < 1e-12:
            raise ScenarioError(f"zero rotation axis in {obj!r}")
        return cls(axis, angle)


PAULI_RECORDS = (
    AxisAngle((0.0, 0.0, 1.0), 0.0),
    AxisAngle((1.0, 0.0, 0.0), math.pi),
    AxisAngle((0.0, 1.0, 0.0), math.pi),
    AxisAngle((0.0, 0.0, 1.0), math.pi),
)


@dataclass(frozen=True)
class Scenario:
    """A named strategy.

    ``kind`` is one of ``optimal``, ``permuted``, ``custom`` or ``random``.
    Optimal and permuted scenarios use the exact Pauli matrices; custom and
    random ones are built from their axis-angle records.
    """

    name: str
    kind: str
    U: tuple[AxisAngle, ...]
    V: tuple[AxisAngle, ...]
    perm: Optional[tuple[int, ...]] = None
    seed: Optional[int] = None

    def config(self) -> ProtocolConfig:
        if self.kind == "optimal":
            return ProtocolConfig.optimal()
        if self.kind == "permuted":
            return ProtocolConfig.permuted(self.perm)
        return ProtocolConfig(tuple(r.unitary() for r in self.U), tuple(r.unitary() for r in self.V))

    def to_json(self) -> dict:
        return {"name": self.name,
                "U": [r.to_json() for r in self.U],
                "V": [r.to_json() for r in self.V]}


def optimal_scenario() -> Scenario:
    return Scenario("optimal", "optimal", PAULI_RECORDS, PAULI_RECORDS)


def permuted_scenario(perm: Sequence[int] = DOUBLE_SWAP) -> Scenario:
    perm = tuple(int(k) for k in perm)
    if sorted(perm) != [0, 1, 2, 3]:
        raise ScenarioError(f"{perm} is not a permutation of 0..3")
    name = "permuted:" + ",".join(str(k) for k in perm)
    return Scenario(name, "permuted", PAULI_RECORDS, tuple(PAULI_RECORDS[k] for k in perm), perm=perm)


def random_scenario(seed: int) -> Scenario:
    """U_a = A sigma_a B and V_a Haar random, all drawn from ``seed``."""
    rng = np.random.default_rng(seed)
    A, B = random_su2(rng), random_su2(rng)
    U = tuple(AxisAngle.of(A @ pauli(k) @ B) for k in range(4))
    V = tuple(AxisAngle.of(random_su2(rng)) for _ in range(4))
    return Scenario(f"random:{seed}", "random", U, V, seed=int(seed))


def scenario_from_json(obj, default_name: str = "custom", require_v: bool = True) -> Scenario:
    if not isinstance(obj, dict) or "U" not in obj:
        raise ScenarioError("scenario JSON must be an object with a 'U' list")
    U = obj["U"]
    V = obj.get("V")
    if V is None and not require_v:
        V = U
    if not isinstance(U, list) or not isinstance(V, list) or len(U) != 4 or len(V) != 4:
        raise ScenarioError("scenario needs four 'U' and four 'V' records")
    scn = Scenario(str(obj.get("name", default_name)), "custom",
                   tuple(AxisAngle.from_json(r) for r in U),
                   tuple(AxisAngle.from_json(r) for r in V))
    try:
        scn.config()
    except ConfigError as exc:
        raise ScenarioError(str(exc)) from None
    return scn


def read_scenario(path, require_v: bool = True) -> Scenario:
    path = Path(path)
    try:
        obj = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc}") from None
    return scenario_from_json(obj, default_name=path.stem, require_v=require_v)


def write_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario.to_json(), indent=2) + "\n")


def parse_scenario(text: str) -> Scenario:
    """Resolve ``optimal``, ``permuted[:a,b,c,d]``, ``random:SEED``, ``file:PATH`` or ``PATH.json``."""
    kind, _, arg = text.partition(":")
    if text == "optimal":
        return optimal_scenario()
    if kind == "permuted":
        if not arg:
            return permuted_scenario()
        try:
            perm = [int(k) for k in arg.split(",")]
        except ValueError:
            raise ScenarioError(f"bad permutation {arg!r}") from None
        return permuted_scenario(perm)
    if kind == "random":
        try:
            seed = int(arg)
        except ValueError:
            raise ScenarioError(f"bad random seed {arg!r}") from None
        if seed < 0:
            raise ScenarioError("random seed must be nonnegative")
        return random_scenario(seed)
    if kind == "file":
        return read_scenario(arg)
    if text.endswith(".json"):
        return read_scenario(text)
    raise ScenarioError(f"unknown scenario {text!r}")
