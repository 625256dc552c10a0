"""Counter-based random number derivation.

Every uniform draw is a pure function of (master_seed, game_index, position),
where position = flat_profile * num_agents + agent.  There is no sequential
generator state, so games can be produced in any order, on any number of
threads, and individual draws can be addressed at random (the large-game
scan path relies on this).  The word function is two rounds of the
splitmix64 finalizer over a Weyl sequence, which passes standard statistical
batteries and is bit-stable across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels

_MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MUL1 = 0xBF58476D1CE4E5B9
_MUL2 = 0x94D049BB133111EB


def mix64(x: int) -> int:
    """splitmix64 finalizer on a 64-bit integer (pure-Python reference)."""
    x &= _MASK
    x = (x ^ (x >> 30)) * _MUL1 & _MASK
    x = (x ^ (x >> 27)) * _MUL2 & _MASK
    return x ^ (x >> 31)


def stream_root(master_seed: int) -> int:
    return mix64((master_seed + GOLDEN) & _MASK)


def game_key(master_seed: int, game_index: int) -> int:
    """64-bit key for one game; distinct (seed, index) pairs give
    statistically independent draw fields."""
    if game_index < 0:
        raise ValueError("game_index must be nonnegative")
    root = stream_root(master_seed)
    return mix64(root ^ ((game_index + 1) * GOLDEN & _MASK))


def uniform_word(key: int, position: int) -> int:
    """The raw 64-bit word behind one draw (reference implementation)."""
    return mix64((key ^ mix64((position + 1) * GOLDEN & _MASK)) & _MASK)


def uniform01(key: int, position: int) -> float:
    """One uniform draw strictly inside (0, 1)."""
    return ((uniform_word(key, position) >> 11) + 0.5) * 2.0 ** -53


def uniforms_at(key: int, positions: np.ndarray) -> np.ndarray:
    """Vectorized draws at arbitrary positions (open interval (0,1))."""
    pos = np.ascontiguousarray(positions, dtype=np.int64).ravel()
    out = _kernels.uniforms_at(np.uint64(key), pos)
    return out.reshape(np.shape(positions))


def uniform_field(key: int, num_profiles: int, num_agents: int) -> np.ndarray:
    """The (num_profiles, num_agents) table of uniforms for one game.

    Entry [block, agent] sits at position block * num_agents + agent; the
    i.i.d., copula and network generators all read from this one field,
    which is what makes their coincidence cases bit-exact.
    """
    total = num_profiles * num_agents
    out = _kernels.uniforms_range(np.uint64(key), total)
    return out.reshape(num_profiles, num_agents)


@dataclass(frozen=True)
class SeedSpec:
    """Master seed for a family of games, one independent field per index."""

    master_seed: int

    def key(self, game_index: int) -> int:
        return game_key(self.master_seed, game_index)


def as_seed(seed: "SeedSpec | int") -> SeedSpec:
    if isinstance(seed, SeedSpec):
        return seed
    return SeedSpec(int(seed))


class CounterStream:
    """Single-owner stream view over a draw field (for plain sampling)."""

    def __init__(self, master_seed: int, stream_index: int = 0):
        self._key = game_key(master_seed, stream_index)
        self._pos = 0

    def uniforms(self, n: int) -> np.ndarray:
        pos = np.arange(self._pos, self._pos + n, dtype=np.int64)
        self._pos += n
        return uniforms_at(self._key, pos)

    def uniform(self) -> float:
        u = uniform01(self._key, self._pos)
        self._pos += 1
        return u
