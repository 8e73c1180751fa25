import numpy as np
import pytest

from rmdo import games
from rmdo.tree import BehaviorStrategy


@pytest.fixture(scope="session")
def tiny_game():
    return games.tiny()


@pytest.fixture(scope="session")
def kuhn1():
    return games.kuhn(1)


@pytest.fixture(scope="session")
def blotto23():
    return games.sequential_blotto(2, 3)


@pytest.fixture(scope="session")
def oshi421():
    return games.oshi_zumo(4, 2, 1)


@pytest.fixture(scope="session")
def leduc_base():
    return games.leduc()


def random_behavior(game, player, rng):
    """Random fully-mixed behavior strategy (every action gets mass)."""
    isets = game.isets
    flat = np.zeros(isets.total_slots)
    for s in isets.infosets_of(player):
        row = rng.random(isets.n_actions[s]) + 1e-3
        flat[isets.offset[s] : isets.offset[s + 1]] = row / row.sum()
    return BehaviorStrategy(game, player, flat)
