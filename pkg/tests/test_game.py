from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from coopet import Game, PlayerSet, add_null_player, enumerate_two_partitions, unanimity_game
from coopet.errors import ContainmentError, DisjointnessError, DomainError, GeneratorError, InvalidCoalitionError
from coopet.game import (
    additive_game,
    from_dividends,
    popcount,
    random_game,
    random_monotone_game,
    submasks,
    weighted_majority_game,
)

from conftest import mask


# --- worth ---------------------------------------------------------------

def test_worth_of_empty_is_zero(glove):
    assert glove.worth(0) == 0


def test_unanimity_worth(u12_n3):
    assert u12_n3.worth(mask(1, 2, 3)) == 1
    assert u12_n3.worth(mask(1, 3)) == 0


def test_glove_worth(glove):
    assert glove.worth(mask(2, 3)) == 0
    assert glove.worth(mask(1, 2)) == 1


def test_out_of_range_coalition(glove):
    with pytest.raises(InvalidCoalitionError):
        glove.worth(1 << 3)


def test_nonzero_empty_worth_rejected():
    with pytest.raises(DomainError):
        Game.from_values(2, [1, 0, 0, 0])


def test_float_values_refused_in_exact_mode():
    with pytest.raises(TypeError):
        Game.from_values(1, [0, 0.5])


# --- marginal contributions and null players -------------------------------

def test_marginal_contribution():
    uN = unanimity_game(3, mask(1, 2, 3))
    assert uN.marginal_contribution(mask(1), mask(2, 3)) == 1


def test_marginal_contribution_glove(glove):
    assert glove.marginal_contribution(mask(2, 3), mask(1)) == 1
    assert glove.marginal_contribution(0, mask(1)) == 0


def test_marginal_overlap_rejected(glove):
    with pytest.raises(DisjointnessError):
        glove.marginal_contribution(mask(1, 2), mask(2))


def test_null_players(u12_n3, glove):
    assert u12_n3.is_null_player(2)
    assert not u12_n3.is_null_player(0)
    assert not glove.is_null_player(0)
    assert u12_n3.null_players() == mask(3)


def test_monotonicity(u12_n3, glove):
    assert u12_n3.monotone and glove.monotone
    bad = Game.from_values(2, [0, 1, 0, 0])
    assert not bad.is_monotone()


# --- restrictions ----------------------------------------------------------

def test_restrict_identity(glove):
    assert glove.restrict(0) == glove


def test_restrict_unanimity(u12_n3):
    g = u12_n3.restrict(mask(3))
    assert g.worths == unanimity_game(2, mask(1, 2)).worths


def test_restrict_glove(glove):
    g = glove.restrict(mask(3))
    assert g.players.labels == ("1", "2")
    assert [g.worth(S) for S in range(4)] == [0, 0, 0, 1]


def test_restrict_in_presence(glove):
    g = glove.restrict_in_presence(mask(1), mask(1))
    assert g.players.labels == ("2", "3")
    assert g.worth(g.players.coalition("2")) == 1
    assert g.worth(g.players.coalition("2,3")) == 1


def test_restrict_in_presence_grand_unanimity():
    uN = unanimity_game(3, mask(1, 2, 3))
    g = uN.restrict_in_presence(mask(3), mask(3))
    assert g.worths == unanimity_game(2, mask(1, 2)).worths


def test_restrict_in_presence_containment(glove):
    with pytest.raises(ContainmentError):
        glove.restrict_in_presence(mask(1), mask(2))


# --- unanimity games and dividends -----------------------------------------

def test_unanimity_single_player():
    assert unanimity_game(1, 1).worth(1) == 1


def test_unanimity_empty_carrier():
    with pytest.raises(DomainError):
        unanimity_game(3, 0)


def test_mobius_of_unanimity():
    d = unanimity_game(4, mask(2, 4)).mobius_transform()
    assert d[mask(2, 4)] == 1
    assert sum(abs(x) for x in d) == 1


def test_mobius_of_additive_game():
    d = additive_game([3, Fraction(1, 2), 0]).mobius_transform()
    assert d[mask(1)] == 3 and d[mask(2)] == Fraction(1, 2)
    assert all(x == 0 for S, x in enumerate(d) if popcount(S) != 1)


def test_mobius_of_glove(glove):
    d = glove.mobius_transform()
    expected = {mask(1, 2): 1, mask(1, 3): 1, mask(1, 2, 3): -1}
    assert {S: x for S, x in enumerate(d) if x} == expected


# --- generators ------------------------------------------------------------

def test_majority_games():
    maj = weighted_majority_game(2, (1, 1, 1))
    assert [maj.worth(S) for S in range(8)] == [0, 0, 0, 1, 0, 1, 1, 1]
    assert weighted_majority_game(3, (2, 1, 1, 1)).worth(mask(1, 2)) == 1
    assert weighted_majority_game(51, (50, 49, 1)).worth(mask(2, 3)) == 0


def test_unsatisfiable_quota():
    with pytest.raises(GeneratorError):
        weighted_majority_game(10, (1, 2))


def test_random_monotone_is_seeded_and_monotone():
    a = random_monotone_game(5, 7)
    assert a == random_monotone_game(5, 7)
    assert a.monotone


def test_add_null_player(glove):
    g = add_null_player(glove)
    assert g.n == 4 and g.is_null_player(3)
    assert g.restrict(mask(4)) == glove


# --- two-partitions --------------------------------------------------------

def test_partitions_small():
    assert enumerate_two_partitions(mask(1)) == []
    assert enumerate_two_partitions(mask(1, 2)) == [(mask(1), mask(2))]
    assert len(enumerate_two_partitions(mask(1, 2, 3))) == 3


# --- properties ------------------------------------------------------------

games = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.fractions(-10, 10, max_denominator=6), min_size=(1 << n) - 1, max_size=(1 << n) - 1)
    .map(lambda vals: Game.from_values(n, [0] + vals))
)


@given(games)
def test_mobius_round_trip(game):
    assert from_dividends(game.players, game.mobius_transform()) == game


@given(st.integers(0, (1 << 10) - 1))
def test_partition_count_and_shape(S):
    parts = enumerate_two_partitions(S)
    s = popcount(S)
    assert len(parts) == (2 ** (s - 1) - 1 if s >= 2 else 0)
    for a, b in parts:
        assert a and b and not a & b and a | b == S
    assert len({frozenset(p) for p in parts}) == len(parts)


@given(games, st.data())
def test_restrict_in_presence_without_b(game, data):
    A = data.draw(st.integers(0, game.grand - 1))
    assert game.restrict_in_presence(A, 0) == game.restrict(A)


@settings(max_examples=30)
@given(st.integers(1, 6), st.integers(0, 10**6))
def test_monotone_marginals_non_negative(n, seed):
    g = random_monotone_game(n, seed)
    for S in range(1 << n):
        for T in submasks(g.grand & ~S):
            assert g.marginal_contribution(S, T) >= 0


@settings(max_examples=30)
@given(st.integers(1, 5), st.integers(0, 10**6))
def test_null_player_has_no_dividends(n, seed):
    g = add_null_player(random_game(n, seed))
    d = g.mobius_transform()
    i = 1 << n
    assert all(d[S] == 0 for S in range(len(d)) if S & i)


@given(games, games)
def test_game_arithmetic(a, b):
    if a.n != b.n:
        return
    c = a * Fraction(2) - b
    assert all(c.worth(S) == 2 * a.worth(S) - b.worth(S) for S in range(1 << a.n))


def test_player_labels():
    ps = PlayerSet(("x", "y", "z"))
    assert ps.coalition("x,z") == 0b101
    assert ps.labels_of(0b110) == ["y", "z"]
    with pytest.raises(InvalidCoalitionError):
        ps.coalition("w")
