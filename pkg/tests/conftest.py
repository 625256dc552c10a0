import numpy as np
import pytest

from epsgames.games import Game, GameShape


@pytest.fixture
def matching_pennies() -> Game:
    """Row agent scores +1 when actions match, -1 otherwise; column agent
    gets the negation.  Flat order: (0,0), (1,0), (0,1), (1,1)."""
    row = np.array([1.0, -1.0, -1.0, 1.0])
    return Game(GameShape((2, 2)), np.vstack([row, -row]))


def random_game(rng: np.random.Generator, max_agents=3, max_actions=4) -> Game:
    agents = int(rng.integers(2, max_agents + 1))
    counts = tuple(int(c) for c in rng.integers(2, max_actions + 1, size=agents))
    shape = GameShape(counts)
    utilities = rng.standard_normal((shape.num_agents, shape.num_profiles))
    return Game(shape, utilities)
