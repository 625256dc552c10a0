"""Exact equilibrium analysis of materialized games.

The deviation gain of agent i at profile a is the best utility i could get
by switching action (others fixed) minus i's utility at a.  Gains <= 0 mean
a (weakly) best response; ties never break existence.  A profile is:

* a pure Nash equilibrium      — every agent's gain <= 0;
* a pure eps-equilibrium       — every agent's gain <= eps;
* a pure eps-star-equilibrium  — a pure eps-equilibrium in which all agents,
  except at most one, have gain <= 0.

Comparisons are exact floating point, no tolerance slack: under continuous
utility draws boundary cases have measure zero, and slack would silently
change counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .games import Game, GameShape, line

__all__ = [
    "EquilibriumReport",
    "LineStats",
    "deviation_gain",
    "deviation_tensor",
    "line_stats",
    "analyze",
    "naive_analyze",
    "exists_eps_star",
]


@dataclass(frozen=True)
class EquilibriumReport:
    epsilon: float
    count_nash: int
    count_eps: int
    count_eps_star: int
    profiles_nash: tuple[int, ...] | None = None
    profiles_eps: tuple[int, ...] | None = None
    profiles_eps_star: tuple[int, ...] | None = None

    def counts(self) -> tuple[int, int, int]:
        return (self.count_nash, self.count_eps, self.count_eps_star)


@dataclass(frozen=True)
class LineStats:
    """Per (agent, opposing profile) line maxima.

    For agent i, arrays are indexed by line id (num_profiles / |A_i| lines):
    best[i][o] is the line maximum, second[i][o] the runner-up counting
    duplicates, argmax[i][o] the first maximizing action.
    """

    best: tuple[np.ndarray, ...]
    second: tuple[np.ndarray, ...]
    argmax: tuple[np.ndarray, ...]


def _agent_view(utilities_row: np.ndarray, shape: GameShape, agent: int):
    """Reshape one agent's flat payoff vector so their own action is an
    axis; axis n-1-i corresponds to agent i under the little-endian layout."""
    rev = shape.action_counts[::-1]
    return utilities_row.reshape(rev), shape.num_agents - 1 - agent


def _line_extrema(utilities_row, shape, agent):
    view, axis = _agent_view(utilities_row, shape, agent)
    k = shape.action_counts[agent]
    part = np.partition(view, (k - 2, k - 1), axis=axis)
    m1 = np.take(part, k - 1, axis=axis)
    m2 = np.take(part, k - 2, axis=axis)
    return view, axis, m1, m2


def deviation_gain(game: Game, agent: int, flat: int) -> float:
    """Best alternative on the line minus own utility; may be negative."""
    profiles = line(game.shape, flat, agent)
    own = game.utilities[agent, flat]
    alt = game.utilities[agent, profiles[profiles != flat]]
    return float(alt.max() - own)


def deviation_tensor(game: Game) -> np.ndarray:
    """(num_agents, num_profiles) array of deviation gains."""
    shape = game.shape
    out = np.empty_like(game.utilities)
    for i in range(shape.num_agents):
        view, axis, m1, m2 = _line_extrema(game.utilities[i], shape, i)
        m1e = np.expand_dims(m1, axis)
        m2e = np.expand_dims(m2, axis)
        delta = np.where(view < m1e, m1e, m2e) - view
        out[i] = delta.reshape(shape.num_profiles)
    return out


def line_stats(game: Game) -> LineStats:
    best, second, argmax = [], [], []
    for i in range(game.shape.num_agents):
        view, axis, m1, m2 = _line_extrema(game.utilities[i], game.shape, i)
        am = np.argmax(view, axis=axis)
        best.append(m1.reshape(-1))
        second.append(m2.reshape(-1))
        argmax.append(am.reshape(-1))
    return LineStats(tuple(best), tuple(second), tuple(argmax))


def _classify(game: Game):
    delta = deviation_tensor(game)
    nonbr = (delta > 0.0).sum(axis=0)
    dmax = delta.max(axis=0)
    return nonbr, dmax


def analyze(game: Game, epsilon: float, include_profiles: bool = False) -> EquilibriumReport:
    """Exact counts of pure Nash / eps / eps-star equilibria in one pass."""
    epsilon = float(epsilon)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    nonbr, dmax = _classify(game)
    nash_mask = nonbr == 0
    eps_mask = dmax <= epsilon
    star_mask = eps_mask & (nonbr <= 1)
    report = EquilibriumReport(
        epsilon=epsilon,
        count_nash=int(nash_mask.sum()),
        count_eps=int(eps_mask.sum()),
        count_eps_star=int(star_mask.sum()),
    )
    if include_profiles:
        report = EquilibriumReport(
            epsilon=epsilon,
            count_nash=report.count_nash,
            count_eps=report.count_eps,
            count_eps_star=report.count_eps_star,
            profiles_nash=tuple(int(x) for x in np.nonzero(nash_mask)[0]),
            profiles_eps=tuple(int(x) for x in np.nonzero(eps_mask)[0]),
            profiles_eps_star=tuple(int(x) for x in np.nonzero(star_mask)[0]),
        )
    return report


def naive_analyze(game: Game, epsilon: float, include_profiles: bool = False) -> EquilibriumReport:
    """Literal-definition oracle: no caching, no vectorization."""
    epsilon = float(epsilon)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    shape = game.shape
    nash, eps, star = [], [], []
    for flat in range(shape.num_profiles):
        worst = -np.inf
        num_nonbr = 0
        for i in range(shape.num_agents):
            own = game.utilities[i, flat]
            best_alt = -np.inf
            for q in line(shape, flat, i):
                if q != flat and game.utilities[i, q] > best_alt:
                    best_alt = game.utilities[i, q]
            gain = best_alt - own
            if gain > 0.0:
                num_nonbr += 1
            if gain > worst:
                worst = gain
        if num_nonbr == 0:
            nash.append(flat)
        if worst <= epsilon:
            eps.append(flat)
            if num_nonbr <= 1:
                star.append(flat)
    report = EquilibriumReport(
        epsilon=epsilon,
        count_nash=len(nash),
        count_eps=len(eps),
        count_eps_star=len(star),
    )
    if include_profiles:
        report = EquilibriumReport(
            epsilon, len(nash), len(eps), len(star),
            tuple(nash), tuple(eps), tuple(star),
        )
    return report


def exists_eps_star(game: Game, epsilon: float) -> bool:
    """Early-exit variant: true iff some profile is a pure eps-star
    equilibrium; short-circuits on the first witness."""
    epsilon = float(epsilon)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    shape = game.shape
    u = game.utilities
    for flat in range(shape.num_profiles):
        budget = 1
        ok = True
        for i in range(shape.num_agents):
            profiles = line(shape, flat, i)
            own = u[i, flat]
            alt = u[i, profiles[profiles != flat]].max()
            gain = alt - own
            if gain > 0.0:
                if gain > epsilon or budget == 0:
                    ok = False
                    break
                budget -= 1
        if ok:
            return True
    return False
