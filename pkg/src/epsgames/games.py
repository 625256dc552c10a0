"""Normal-form games: shapes, mixed-radix profile indexing, lines, storage.

A profile is addressed by a flat index in little-endian mixed radix: agent 0
varies fastest.  Utilities live in one (num_agents, num_profiles) float64
tensor, agent-major, so an equilibrium scan streams one agent's payoffs at a
time.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np

# Flat profile indices (times num_agents) must stay addressable as int64.
INDEX_LIMIT = 2 ** 62
# Materialized utility tensors are a desk-scale tool; refuse monsters.
ENTRY_LIMIT = 2 ** 31


@dataclass(frozen=True)
class GameShape:
    """Per-agent action counts; every agent has at least two actions."""

    action_counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.action_counts)
        if len(counts) == 0:
            raise ValueError("a game needs at least one agent")
        if any(c < 2 for c in counts):
            raise ValueError("every agent needs at least two actions")
        object.__setattr__(self, "action_counts", counts)
        p = 1
        for c in counts:
            p *= c
            if p * len(counts) > INDEX_LIMIT:
                raise ValueError(
                    f"profile space of shape {counts} exceeds the index range"
                )

    @property
    def num_agents(self) -> int:
        return len(self.action_counts)

    @cached_property
    def num_profiles(self) -> int:
        p = 1
        for c in self.action_counts:
            p *= c
        return p

    @cached_property
    def strides(self) -> tuple[int, ...]:
        out = []
        s = 1
        for c in self.action_counts:
            out.append(s)
            s *= c
        return tuple(out)

    @property
    def num_entries(self) -> int:
        return self.num_agents * self.num_profiles

    def dims_array(self) -> np.ndarray:
        return np.asarray(self.action_counts, dtype=np.int64)

    def strides_array(self) -> np.ndarray:
        return np.asarray(self.strides, dtype=np.int64)


def shape_of(counts) -> GameShape:
    if isinstance(counts, GameShape):
        return counts
    return GameShape(tuple(int(c) for c in counts))


def encode(shape: GameShape, actions) -> int:
    """Flat index of a per-agent action tuple."""
    shape = shape_of(shape)
    if len(actions) != shape.num_agents:
        raise ValueError("action tuple length != number of agents")
    flat = 0
    for a, c, s in zip(actions, shape.action_counts, shape.strides):
        a = int(a)
        if not 0 <= a < c:
            raise ValueError(f"action {a} out of range [0, {c})")
        flat += a * s
    return flat


def decode(shape: GameShape, flat: int) -> tuple[int, ...]:
    """Per-agent action tuple of a flat index."""
    shape = shape_of(shape)
    flat = int(flat)
    if not 0 <= flat < shape.num_profiles:
        raise ValueError(f"flat index {flat} out of range")
    out = []
    for c in shape.action_counts:
        out.append(flat % c)
        flat //= c
    return tuple(out)


def axis_indices(shape: GameShape, agent: int, flats: np.ndarray) -> np.ndarray:
    """Vectorized a_i extraction for an array of flat indices."""
    s = shape.strides[agent]
    return (flats // s) % shape.action_counts[agent]


def line(shape: GameShape, flat: int, agent: int) -> np.ndarray:
    """Profiles that agree with `flat` except in `agent`'s coordinate,
    ordered by that agent's action (contains `flat` itself)."""
    shape = shape_of(shape)
    if not 0 <= agent < shape.num_agents:
        raise ValueError(f"agent {agent} out of range")
    flat = int(flat)
    if not 0 <= flat < shape.num_profiles:
        raise ValueError(f"flat index {flat} out of range")
    s = shape.strides[agent]
    k = shape.action_counts[agent]
    base = flat - ((flat // s) % k) * s
    return base + s * np.arange(k, dtype=np.int64)


def line_id(shape: GameShape, flat: int, agent: int) -> int:
    """Index of the line through `flat` in direction `agent` among the
    num_profiles / |A_agent| lines of that direction."""
    s = shape.strides[agent]
    k = shape.action_counts[agent]
    return (flat // (s * k)) * s + (flat % s)


class Game:
    """A materialized game: shape plus the agent-major utility tensor."""

    def __init__(self, shape: GameShape, utilities: np.ndarray):
        shape = shape_of(shape)
        if shape.num_entries > ENTRY_LIMIT:
            raise ValueError(
                f"shape {shape.action_counts} needs {shape.num_entries} entries, "
                f"over the {ENTRY_LIMIT} materialization cap"
            )
        utilities = np.ascontiguousarray(utilities, dtype=np.float64)
        expected = (shape.num_agents, shape.num_profiles)
        if utilities.shape != expected:
            raise ValueError(f"utilities shape {utilities.shape} != {expected}")
        if not np.all(np.isfinite(utilities)):
            raise ValueError("utilities must be finite")
        self.shape = shape
        self.utilities = utilities

    @classmethod
    def zeros(cls, shape) -> "Game":
        shape = shape_of(shape)
        if shape.num_entries > ENTRY_LIMIT:  # refuse before allocating
            raise ValueError(
                f"shape {shape.action_counts} needs {shape.num_entries} entries, "
                f"over the {ENTRY_LIMIT} materialization cap"
            )
        return cls(shape, np.zeros((shape.num_agents, shape.num_profiles)))

    def utility(self, agent: int, flat: int) -> float:
        return float(self.utilities[agent, flat])

    def set_utility(self, agent: int, flat: int, value: float) -> None:
        value = float(value)
        if not np.isfinite(value):
            raise ValueError("utility must be finite")
        self.utilities[agent, flat] = value

    def to_json_dict(self) -> dict:
        return {
            "actions": list(self.shape.action_counts),
            "utilities": [[float(v) for v in row] for row in self.utilities],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Game":
        if not isinstance(obj, dict) or "actions" not in obj or "utilities" not in obj:
            raise ValueError("game file must contain 'actions' and 'utilities'")
        shape = GameShape(tuple(int(c) for c in obj["actions"]))
        rows = obj["utilities"]
        if len(rows) != shape.num_agents:
            raise ValueError("utilities outer length != number of agents")
        tensor = np.asarray(rows, dtype=np.float64)
        return cls(shape, tensor)

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Game":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_json_dict(json.load(fh))
