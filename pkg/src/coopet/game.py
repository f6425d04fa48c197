"""TU-games over dense worth tables indexed by coalition bit patterns.

A coalition is a plain ``int``: bit ``i`` set means player ``i`` belongs to it.
Worths are :class:`fractions.Fraction` in exact mode and ``float`` in float
mode; a game never holds a mixture of the two.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Iterator, Sequence, Union

from .errors import (
    ContainmentError,
    DisjointnessError,
    DomainError,
    GeneratorError,
    InvalidCoalitionError,
)

Scalar = Union[Fraction, float]

MAX_PLAYERS = 24


def popcount(mask: int) -> int:
    return mask.bit_count()


def members(mask: int) -> list[int]:
    """Player indices in ``mask``, ascending."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def submasks(mask: int) -> Iterator[int]:
    """Yield every subset of ``mask`` in increasing numeric order, ``0`` first."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def compress(mask: int, keep: int) -> int:
    """Pack the bits of ``mask`` that sit on positions of ``keep`` into a dense word."""
    out = 0
    k = 0
    for i in members(keep):
        if mask >> i & 1:
            out |= 1 << k
        k += 1
    return out


def expand(mask: int, keep: int) -> int:
    """Inverse of :func:`compress`: spread dense bits back onto ``keep``."""
    out = 0
    for k, i in enumerate(members(keep)):
        if mask >> k & 1:
            out |= 1 << i
    return out


def to_fraction(value) -> Fraction:
    """Exact conversion of ints, Fractions, Decimals and ``"num/den"`` strings.

    Binary floats are refused: they are where silent precision loss creeps in.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not worths")
    if isinstance(value, float):
        raise TypeError(f"float {value!r} given where an exact value is required")
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational literal: {value!r}") from exc
    return Fraction(value)


def to_scalar(value, exact: bool) -> Scalar:
    if exact:
        return to_fraction(value)
    if isinstance(value, str):
        return float(Fraction(value.strip()))
    return float(value)


def format_scalar(value: Scalar) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return repr(float(value))


@dataclass(frozen=True)
class PlayerSet:
    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(lab) for lab in self.labels)
        object.__setattr__(self, "labels", labels)
        if not 1 <= len(labels) <= MAX_PLAYERS:
            raise DomainError(f"player count must lie in 1..{MAX_PLAYERS}, got {len(labels)}")
        if len(set(labels)) != len(labels):
            raise DomainError(f"duplicate player labels in {labels}")

    @classmethod
    def of_size(cls, n: int) -> PlayerSet:
        return cls(tuple(str(i + 1) for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def grand(self) -> int:
        return (1 << self.n) - 1

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise InvalidCoalitionError(f"unknown player {label!r}") from None

    def coalition(self, labels: Iterable[str] | str) -> int:
        """Bit pattern for a collection of labels, or a comma separated string."""
        if isinstance(labels, str):
            labels = [lab for lab in (x.strip() for x in labels.split(",")) if lab]
        mask = 0
        for lab in labels:
            bit = 1 << self.index(lab)
            if mask & bit:
                raise InvalidCoalitionError(f"player {lab!r} listed twice")
            mask |= bit
        return mask

    def labels_of(self, mask: int) -> list[str]:
        self.check(mask)
        return [self.labels[i] for i in members(mask)]

    def check(self, mask: int) -> int:
        if not isinstance(mask, int) or mask < 0 or mask >> self.n:
            raise InvalidCoalitionError(f"bit pattern {mask!r} is not a coalition of {self.n} players")
        return mask

    def without(self, removed: int) -> PlayerSet:
        """Surviving players in their original relative order."""
        self.check(removed)
        keep = self.grand & ~removed
        if not keep:
            raise DomainError("cannot remove every player")
        return PlayerSet(tuple(self.labels[i] for i in members(keep)))


@dataclass(frozen=True)
class Game:
    """A TU-game: player set plus the worth of each of the ``2**n`` coalitions."""

    players: PlayerSet
    worths: tuple
    exact: bool = True

    def __post_init__(self):
        worths = tuple(self.worths)
        object.__setattr__(self, "worths", worths)
        if len(worths) != 1 << self.players.n:
            raise DomainError(f"expected {1 << self.players.n} worths, got {len(worths)}")
        kind = Fraction if self.exact else float
        for w in worths:
            if type(w) is not kind:
                raise TypeError(
                    f"{'exact' if self.exact else 'float'} game holds {type(w).__name__} value {w!r}"
                )
        if worths[0] != 0:
            raise DomainError(f"the empty coalition must be worth 0, got {worths[0]}")

    @classmethod
    def from_values(cls, players: PlayerSet | int | Sequence[str], values, exact: bool = True) -> Game:
        if isinstance(players, int):
            players = PlayerSet.of_size(players)
        elif not isinstance(players, PlayerSet):
            players = PlayerSet(tuple(players))
        return cls(players, tuple(to_scalar(v, exact) for v in values), exact)

    @classmethod
    def from_function(cls, players: PlayerSet | int, fn, exact: bool = True) -> Game:
        """Tabulate ``fn(mask)`` over every coalition."""
        if isinstance(players, int):
            players = PlayerSet.of_size(players)
        return cls.from_values(players, [fn(m) for m in range(1 << players.n)], exact)

    @property
    def n(self) -> int:
        return self.players.n

    @property
    def grand(self) -> int:
        return self.players.grand

    @property
    def mode(self) -> str:
        return "exact" if self.exact else "float"

    def scalar(self, value) -> Scalar:
        """Bring a constant (typically an exact weight) into this game's mode."""
        if self.exact:
            return value if isinstance(value, Fraction) else to_fraction(value)
        return float(value)

    def zero(self) -> Scalar:
        return Fraction(0) if self.exact else 0.0

    def worth(self, S: int) -> Scalar:
        return self.worths[self.players.check(S)]

    def marginal_contribution(self, S: int, T: int) -> Scalar:
        """``v(S | T) - v(T)`` for disjoint coalitions."""
        self.players.check(S)
        self.players.check(T)
        if S & T:
            raise DisjointnessError("marginal contribution needs disjoint coalitions")
        return self.worths[S | T] - self.worths[T]

    def is_null_player(self, i: int) -> bool:
        if not 0 <= i < self.n:
            raise InvalidCoalitionError(f"no player with index {i}")
        bit = 1 << i
        v = self.worths
        return all(v[T | bit] == v[T] for T in submasks(self.grand & ~bit))

    def null_players(self) -> int:
        """Bit pattern of all null players."""
        return sum(1 << i for i in range(self.n) if self.is_null_player(i))

    @cached_property
    def monotone(self) -> bool:
        v = self.worths
        for i in range(self.n):
            bit = 1 << i
            for S in submasks(self.grand & ~bit):
                if v[S] > v[S | bit]:
                    return False
        return True

    def is_monotone(self) -> bool:
        return self.monotone

    def restrict(self, A: int) -> Game:
        """The game without ``A``: worths of coalitions avoiding ``A``, reindexed."""
        return self.restrict_in_presence(A, 0)

    def restrict_in_presence(self, A: int, B: int) -> Game:
        """The game on ``N - A`` where ``S`` is worth ``v(S | B) - v(B)``."""
        self.players.check(A)
        self.players.check(B)
        if B & ~A:
            raise ContainmentError("the present coalition must lie inside the removed one")
        if A == 0:
            return self
        keep = self.grand & ~A
        players = self.players.without(A)
        v = self.worths
        base = v[B]
        old = [0] * (1 << players.n)
        positions = [1 << i for i in members(keep)]
        worths = [self.zero()] * len(old)
        for m in range(1, len(old)):
            low = m & -m
            old[m] = old[m ^ low] | positions[low.bit_length() - 1]
            worths[m] = v[old[m] | B] - base
        return Game(players, tuple(worths), self.exact)

    def mobius_transform(self) -> list[Scalar]:
        """Harsanyi dividends ``d`` with ``v = sum_C d(C) u_C``."""
        d = list(self.worths)
        for i in range(self.n):
            bit = 1 << i
            for m in range(len(d)):
                if m & bit:
                    d[m] -= d[m ^ bit]
        return d

    def as_float(self) -> Game:
        if not self.exact:
            return self
        return Game(self.players, tuple(float(w) for w in self.worths), False)

    def relabel(self, labels: Sequence[str]) -> Game:
        return Game(PlayerSet(tuple(labels)), self.worths, self.exact)

    def _combine(self, other: Game, a, b) -> Game:
        if other.players != self.players:
            raise DomainError("games live on different player sets")
        if other.exact != self.exact:
            raise TypeError("cannot combine an exact game with a float game")
        a, b = self.scalar(a), self.scalar(b)
        return Game(self.players, tuple(a * x + b * y for x, y in zip(self.worths, other.worths)), self.exact)

    def __add__(self, other: Game) -> Game:
        return self._combine(other, 1, 1)

    def __sub__(self, other: Game) -> Game:
        return self._combine(other, 1, -1)

    def __mul__(self, alpha) -> Game:
        a = self.scalar(alpha)
        return Game(self.players, tuple(a * x for x in self.worths), self.exact)

    __rmul__ = __mul__

    def __neg__(self) -> Game:
        return self * -1


def from_dividends(players: PlayerSet | int, dividends: Sequence, exact: bool = True) -> Game:
    """Rebuild a game from its Harsanyi dividends (the zeta transform)."""
    if isinstance(players, int):
        players = PlayerSet.of_size(players)
    v = [to_scalar(x, exact) for x in dividends]
    if len(v) != 1 << players.n:
        raise DomainError("dividend table has the wrong length")
    for i in range(players.n):
        bit = 1 << i
        for m in range(len(v)):
            if m & bit:
                v[m] += v[m ^ bit]
    return Game(players, tuple(v), exact)


def unanimity_game(players: PlayerSet | int, C: int, exact: bool = True) -> Game:
    """``u_C``: worth 1 on supersets of ``C``, 0 elsewhere."""
    if isinstance(players, int):
        players = PlayerSet.of_size(players)
    players.check(C)
    if C == 0:
        raise DomainError("the unanimity carrier must be non-empty")
    return Game.from_function(players, lambda S: 1 if S & C == C else 0, exact)


def additive_game(weights: Sequence, labels: Sequence[str] | None = None, exact: bool = True) -> Game:
    players = PlayerSet(tuple(labels)) if labels else PlayerSet.of_size(len(weights))
    w = [to_scalar(x, exact) for x in weights]
    zero = Fraction(0) if exact else 0.0
    return Game.from_function(players, lambda S: sum((w[i] for i in members(S)), zero), exact)


def weighted_majority_game(quota, weights: Sequence, labels: Sequence[str] | None = None) -> Game:
    """Simple game won by coalitions whose total weight reaches ``quota``."""
    q = to_fraction(quota)
    w = [to_fraction(x) for x in weights]
    if not w:
        raise GeneratorError("at least one player is required")
    if q <= 0:
        raise GeneratorError("the quota must be positive")
    if any(x < 0 for x in w):
        raise GeneratorError("weights must be non-negative")
    if sum(w) < q:
        raise GeneratorError(f"quota {q} exceeds the total weight {sum(w)}")
    players = PlayerSet(tuple(labels)) if labels else PlayerSet.of_size(len(w))
    return Game.from_function(players, lambda S: 1 if sum(w[i] for i in members(S)) >= q else 0)


def random_monotone_game(n: int, rng: random.Random | int, labels: Sequence[str] | None = None,
                         levels: Sequence[int] = (0, 0, 1, 2, 3)) -> Game:
    """Seeded random monotone game with non-negative integer worths.

    Every coalition draws an i.i.d. increment from ``levels``; coalitions are
    visited along a random maximal chain order (a random player permutation)
    and each worth is the max over its one-smaller subsets plus its increment.
    """
    if isinstance(rng, int):
        rng = random.Random(rng)
    players = PlayerSet(tuple(labels)) if labels else PlayerSet.of_size(n)
    order = list(range(players.n))
    rng.shuffle(order)
    increments = [rng.choice(levels) for _ in range(1 << players.n)]
    v = [0] * (1 << players.n)
    for m in range(1, 1 << players.n):
        # the chain order decides which physical player each bit stands for
        phys = 0
        for k in members(m):
            phys |= 1 << order[k]
        v[phys] = increments[m]
    worths = [0] * len(v)
    for m in sorted(range(1, len(v)), key=popcount):
        worths[m] = max(worths[m ^ (1 << i)] for i in members(m)) + v[m]
    return Game.from_values(players, worths)


def random_game(n: int, rng: random.Random | int, lo: int = -5, hi: int = 5, denominators=(1, 2, 3)) -> Game:
    """Seeded TU-game with arbitrary small rational worths (not monotone in general)."""
    if isinstance(rng, int):
        rng = random.Random(rng)
    values = [Fraction(0)] + [Fraction(rng.randint(lo, hi), rng.choice(denominators))
                              for _ in range((1 << n) - 1)]
    return Game.from_values(n, values)


def add_null_player(game: Game, label: str | None = None) -> Game:
    """Append a player (highest index) whose presence never changes a worth."""
    if label is None:
        label = str(game.n + 1)
        while label in game.players.labels:
            label += "'"
    players = PlayerSet(game.players.labels + (label,))
    return Game(players, game.worths + game.worths, game.exact)


def enumerate_two_partitions(S: int) -> list[tuple[int, int]]:
    """Unordered non-trivial 2-partitions of ``S``.

    Each appears once as ``(first, second)`` with the lowest member of ``S`` in
    ``first``; the list is ordered by ``first``.
    """
    if S < 0:
        raise InvalidCoalitionError("negative bit pattern")
    if popcount(S) < 2:
        return []
    low = S & -S
    rest = S ^ low
    out = []
    for sub in submasks(rest):
        first = low | sub
        if first != S:
            out.append((first, S ^ first))
    out.sort()
    return out
