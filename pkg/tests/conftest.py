from fractions import Fraction
from itertools import combinations

import pytest

from coopet import Game, PlayerSet, unanimity_game, weighted_majority_game


def mask(*players):
    """Bit pattern from 1-based player numbers."""
    m = 0
    for p in players:
        m |= 1 << (p - 1)
    return m


def glove_oracle(n_left=1, n_right=2):
    # Built from label sets, not bit tricks, so it checks the engine independently.
    labels = [str(i + 1) for i in range(n_left + n_right)]
    left = set(labels[:n_left])
    right = set(labels[n_left:])
    worth = {}
    for k in range(len(labels) + 1):
        for combo in combinations(labels, k):
            c = set(combo)
            worth[frozenset(c)] = Fraction(min(len(c & left), len(c & right)))
    return labels, worth


def game_from_oracle(labels, worth):
    players = PlayerSet(tuple(labels))
    return Game.from_function(players, lambda S: worth[frozenset(players.labels_of(S))])


@pytest.fixture
def glove():
    return game_from_oracle(*glove_oracle())


@pytest.fixture
def majority3():
    return weighted_majority_game(2, (1, 1, 1))


@pytest.fixture
def u12_n3():
    return unanimity_game(3, mask(1, 2))
