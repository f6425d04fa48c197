"""Internal (2-partition) and external (opponent subset) probability families.

Internal families put a distribution on the unordered non-trivial
2-partitions of a coalition; external families put one on the subsets of
the players outside it.  Built-in families depend only on cardinalities and
so answer for any player set, restricted ones included.  Custom families are
keyed by player labels and answer only for the player sets they tabulate.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Callable, Mapping, Sequence

from .errors import DomainError, FamilyError
from .game import (
    PlayerSet,
    compress,
    enumerate_two_partitions,
    popcount,
    submasks,
)


@lru_cache(maxsize=None)
def factorial(k: int) -> int:
    if k < 0:
        raise DomainError(f"factorial of {k}")
    return 1 if k < 2 else k * factorial(k - 1)


def _partition_key(players: PlayerSet, a: int, b: int) -> frozenset:
    return frozenset((frozenset(players.labels_of(a)), frozenset(players.labels_of(b))))


def _check_partition(S: int, pi: tuple[int, int]) -> tuple[int, int]:
    a, b = pi
    if popcount(S) < 2:
        raise FamilyError("internal families are vacuous on coalitions with fewer than two players")
    if not a or not b or a & b or a | b != S:
        raise DomainError(f"({a:b}, {b:b}) is not a non-trivial 2-partition of {S:b}")
    return a, b


def p_uniform(S: int, pi: tuple[int, int]) -> Fraction:
    """Uniform weight over the ``2**(s-1) - 1`` partitions of ``S``."""
    _check_partition(S, pi)
    return Fraction(1, 2 ** (popcount(S) - 1) - 1)


def p_permutation(S: int, pi: tuple[int, int]) -> Fraction:
    """Permutation-induced weight ``2 r! (s-r)! / ((s-1) s!)`` of ``{R, S - R}``."""
    a, _ = _check_partition(S, pi)
    s, r = popcount(S), popcount(a)
    return Fraction(2 * factorial(r) * factorial(s - r), (s - 1) * factorial(s))


def q_uniform(n: int, S: int, T: int) -> Fraction:
    """Banzhaf weight ``1 / 2**(n-s)``, the same for every ``T`` outside ``S``."""
    if S >> n or T >> n:
        raise DomainError("coalition outside the player set")
    if S & T:
        raise DomainError("opponents must lie outside the coalition")
    return Fraction(1, 2 ** (n - popcount(S)))


def q_permutation(n: int, s: int, t: int) -> Fraction:
    """Shapley weight ``t! (n-s-t)! / (n-s+1)!``."""
    if not 0 <= s <= n or not 0 <= t <= n - s:
        raise DomainError(f"need 0 <= t <= n - s, got n={n}, s={s}, t={t}")
    return Fraction(factorial(t) * factorial(n - s - t), factorial(n - s + 1))


class InternalFamily(ABC):
    name = "internal"

    @abstractmethod
    def weight(self, players: PlayerSet, S: int, pi: tuple[int, int]) -> Fraction:
        """Probability of the partition ``pi`` of ``S``."""

    def block_weights(self, players: PlayerSet, S: int) -> list[tuple[int, Fraction]]:
        """``(R, p({R, S - R}))`` for every non-empty proper ``R`` of ``S``.

        Each unordered partition shows up twice, once per block, which is the
        shape the attitude sum needs.
        """
        out = []
        for a, b in enumerate_two_partitions(S):
            w = self.weight(players, S, (a, b))
            out.append((a, w))
            out.append((b, w))
        out.sort(key=lambda x: x[0])
        return out


class UniformInternal(InternalFamily):
    name = "uniform"

    def weight(self, players, S, pi):
        return p_uniform(S, pi)

    def block_weights(self, players, S):
        s = popcount(S)
        if s < 2:
            raise FamilyError("internal families are vacuous on coalitions with fewer than two players")
        w = Fraction(1, 2 ** (s - 1) - 1)
        return [(R, w) for R in submasks(S) if R and R != S]

    def __repr__(self):
        return "UniformInternal()"


class PermutationInternal(InternalFamily):
    name = "perm"

    def weight(self, players, S, pi):
        return p_permutation(S, pi)

    def block_weights(self, players, S):
        s = popcount(S)
        if s < 2:
            raise FamilyError("internal families are vacuous on coalitions with fewer than two players")
        by_size = [Fraction(2 * factorial(r) * factorial(s - r), (s - 1) * factorial(s)) if 0 < r < s else None
                   for r in range(s + 1)]
        return [(R, by_size[popcount(R)]) for R in submasks(S) if R and R != S]

    def __repr__(self):
        return "PermutationInternal()"


class CustomInternal(InternalFamily):
    """Explicit partition probabilities keyed by player labels.

    ``table`` maps ``frozenset(coalition labels)`` to a mapping from
    ``frozenset({frozenset(block1), frozenset(block2)})`` to a probability.
    Partitions not listed carry probability zero.
    """

    name = "custom"

    def __init__(self, table: Mapping[frozenset, Mapping[frozenset, Fraction]]):
        self.table = {frozenset(k): dict(v) for k, v in table.items()}

    def weight(self, players, S, pi):
        a, b = _check_partition(S, pi)
        key = frozenset(players.labels_of(S))
        if key not in self.table:
            raise FamilyError(f"custom internal family has no distribution for {sorted(key)}")
        return self.table[key].get(_partition_key(players, a, b), Fraction(0))

    @classmethod
    def from_function(cls, labels: Sequence[str], fn: Callable[[frozenset, frozenset, frozenset], Fraction]):
        """Tabulate ``fn(S, block1, block2)`` (label sets) over all coalitions of ``labels``."""
        players = PlayerSet(tuple(labels))
        table = {}
        for S in range(1, 1 << players.n):
            if popcount(S) < 2:
                continue
            key = frozenset(players.labels_of(S))
            table[key] = {}
            for a, b in enumerate_two_partitions(S):
                la, lb = frozenset(players.labels_of(a)), frozenset(players.labels_of(b))
                table[key][frozenset((la, lb))] = Fraction(fn(key, la, lb))
        return cls(table)

    def __repr__(self):
        return f"CustomInternal({len(self.table)} coalitions)"


class ExternalFamily(ABC):
    name = "external"

    @abstractmethod
    def weight(self, players: PlayerSet, S: int, T: int) -> Fraction:
        """Probability of facing opponents ``T`` (disjoint from ``S``)."""

    def weights(self, players: PlayerSet, S: int) -> list[tuple[int, Fraction]]:
        """``(T, q_S(T))`` for every ``T`` outside ``S``, in increasing bit order."""
        outside = players.grand & ~S
        return [(T, self.weight(players, S, T)) for T in submasks(outside)]


class SemivalueFamily(ExternalFamily):
    """External family whose weight depends only on ``(n, s, t)``."""

    @abstractmethod
    def coefficient(self, n: int, s: int, t: int) -> Fraction:
        ...

    def weight(self, players, S, T):
        players.check(S)
        players.check(T)
        if S & T:
            raise DomainError("opponents must lie outside the coalition")
        return self.coefficient(players.n, popcount(S), popcount(T))

    def weights(self, players, S):
        players.check(S)
        n, s = players.n, popcount(S)
        coef = [self.coefficient(n, s, t) for t in range(n - s + 1)]
        outside = players.grand & ~S
        return [(T, coef[popcount(T)]) for T in submasks(outside)]


class UniformExternal(SemivalueFamily):
    name = "uniform"

    def coefficient(self, n, s, t):
        if not 0 <= t <= n - s:
            raise DomainError(f"need 0 <= t <= n - s, got n={n}, s={s}, t={t}")
        return Fraction(1, 2 ** (n - s))

    def __repr__(self):
        return "UniformExternal()"


class PermutationExternal(SemivalueFamily):
    name = "perm"

    def coefficient(self, n, s, t):
        return q_permutation(n, s, t)

    def __repr__(self):
        return "PermutationExternal()"


class TabulatedSemivalue(SemivalueFamily):
    """Semivalue given by an explicit table ``{(n, s): [q(0), ..., q(n-s)]}``."""

    name = "semivalue"

    def __init__(self, table: Mapping[tuple[int, int], Sequence[Fraction]]):
        self.table = {(int(n), int(s)): tuple(Fraction(x) for x in row) for (n, s), row in table.items()}
        for (n, s), row in self.table.items():
            if len(row) != n - s + 1:
                raise FamilyError(f"row for n={n}, s={s} needs {n - s + 1} entries, has {len(row)}")

    def coefficient(self, n, s, t):
        row = self.table.get((n, s))
        if row is None:
            raise FamilyError(f"semivalue table has no row for n={n}, s={s}")
        if not 0 <= t < len(row):
            raise DomainError(f"t={t} outside 0..{len(row) - 1}")
        return row[t]

    def __repr__(self):
        return f"TabulatedSemivalue({sorted(self.table)})"


class CustomExternal(ExternalFamily):
    """Explicit opponent probabilities keyed by labels.

    ``table`` maps ``(frozenset(player labels), frozenset(coalition labels))``
    to ``{frozenset(opponent labels): probability}``.  Unlisted opponents get
    zero.  Queries on a player set without a table (for example a restricted
    game that was never tabulated) are refused.
    """

    name = "custom"

    def __init__(self, table: Mapping[tuple[frozenset, frozenset], Mapping[frozenset, Fraction]]):
        self.table = {(frozenset(N), frozenset(S)): {frozenset(T): Fraction(p) for T, p in dist.items()}
                      for (N, S), dist in table.items()}

    def _dist(self, players: PlayerSet, S: int):
        key = (frozenset(players.labels), frozenset(players.labels_of(S)))
        dist = self.table.get(key)
        if dist is None:
            raise FamilyError(
                f"custom external family has no table for coalition {sorted(key[1])} "
                f"within players {sorted(key[0])}"
            )
        return dist

    def weight(self, players, S, T):
        players.check(T)
        if S & T:
            raise DomainError("opponents must lie outside the coalition")
        return self._dist(players, S).get(frozenset(players.labels_of(T)), Fraction(0))

    def weights(self, players, S):
        dist = self._dist(players, S)
        outside = players.grand & ~S
        return [(T, dist.get(frozenset(players.labels_of(T)), Fraction(0))) for T in submasks(outside)]

    @classmethod
    def from_function(cls, labels: Sequence[str],
                      fn: Callable[[frozenset, frozenset, frozenset], Fraction],
                      restrictions: bool = True):
        """Tabulate ``fn(N, S, T)`` (label sets).

        With ``restrictions`` every non-empty sub-player-set of ``labels`` is
        tabulated too, so the family answers on restricted games.
        """
        universe = PlayerSet(tuple(labels))
        table = {}
        subsets = range(1, 1 << universe.n) if restrictions else [universe.grand]
        for sub in subsets:
            players = PlayerSet(tuple(universe.labels_of(sub)))
            N = frozenset(players.labels)
            for S in range(1, 1 << players.n):
                lS = frozenset(players.labels_of(S))
                table[(N, lS)] = {
                    frozenset(players.labels_of(T)): Fraction(fn(N, lS, frozenset(players.labels_of(T))))
                    for T in submasks(players.grand & ~S)
                }
        return cls(table)

    def __repr__(self):
        return f"CustomExternal({len(self.table)} tables)"


P_UNIFORM = UniformInternal()
P_PERMUTATION = PermutationInternal()
Q_UNIFORM = UniformExternal()
Q_PERMUTATION = PermutationExternal()

PRESETS = {
    "banzhaf": (P_UNIFORM, Q_UNIFORM),
    "so": (P_PERMUTATION, Q_PERMUTATION),
    "su": (P_UNIFORM, Q_PERMUTATION),
}


@dataclass
class ValidationReport:
    family: str
    ok: bool
    checked: int = 0
    coalition: list[str] | None = None
    total: Fraction | float | None = None
    deficit: Fraction | float | None = None
    message: str = ""

    def as_dict(self) -> dict:
        return {
            "family": self.family,
            "ok": self.ok,
            "checked": self.checked,
            "coalition": self.coalition,
            "total": None if self.total is None else str(self.total),
            "deficit": None if self.deficit is None else str(self.deficit),
            "message": self.message,
        }


def _close(total, exact: bool) -> bool:
    return total == 1 if exact else abs(float(total) - 1.0) <= 1e-12


def validate_family(family: InternalFamily | ExternalFamily, players: PlayerSet,
                    exact: bool = True) -> ValidationReport:
    """Check non-negativity and unit mass of every per-coalition distribution.

    Internal families are checked on coalitions with at least two players,
    external ones on every non-empty coalition.  Semivalue tables are also
    checked against the cardinality normalisation ``sum C(n-s, t) q(t) = 1``.
    The first failing coalition is reported.
    """
    name = getattr(family, "name", type(family).__name__)
    checked = 0
    if isinstance(family, SemivalueFamily):
        n = players.n
        for s in range(1, n + 1):
            try:
                coef = [family.coefficient(n, s, t) for t in range(n - s + 1)]
            except (FamilyError, DomainError) as exc:
                return ValidationReport(name, False, checked, message=str(exc))
            total = sum(comb(n - s, t) * c for t, c in enumerate(coef))
            if any(c < 0 for c in coef) or not _close(total, exact):
                return ValidationReport(name, False, checked, coalition=[f"|S|={s}"], total=total,
                                        deficit=1 - total, message=f"cardinality normalisation fails at s={s}")
    for S in range(1, 1 << players.n):
        if isinstance(family, InternalFamily):
            if popcount(S) < 2:
                continue
            try:
                probs = [w for _, w in family.block_weights(players, S)]
            except (FamilyError, DomainError) as exc:
                return ValidationReport(name, False, checked, players.labels_of(S), message=str(exc))
            total = sum(probs) / 2
        else:
            try:
                probs = [w for _, w in family.weights(players, S)]
            except (FamilyError, DomainError) as exc:
                return ValidationReport(name, False, checked, players.labels_of(S), message=str(exc))
            total = sum(probs)
        checked += 1
        if any(p < 0 for p in probs):
            return ValidationReport(name, False, checked, players.labels_of(S), total, 1 - total,
                                    "negative probability")
        if not _close(total, exact):
            return ValidationReport(name, False, checked, players.labels_of(S), total, 1 - total,
                                    "probabilities do not sum to 1")
    return ValidationReport(name, True, checked)


def has_charac_property(family: ExternalFamily, players: PlayerSet) -> bool:
    """Whether ``q_S(T)`` on ``N`` equals ``q_{S1}(T)`` on ``N - S2`` for every split.

    Checked exhaustively over every coalition ``S``, both orientations of each
    2-partition ``{S1, S2}``, and every ``T`` outside ``S``.
    """
    grand = players.grand
    for S in range(1, 1 << players.n):
        if popcount(S) < 2:
            continue
        outside = grand & ~S
        try:
            full = family.weights(players, S)
        except FamilyError:
            return False
        for a, b in enumerate_two_partitions(S):
            for S1, S2 in ((a, b), (b, a)):
                keep = grand & ~S2
                sub = players.without(S2)
                s1 = compress(S1, keep)
                for T, w in full:
                    try:
                        if family.weight(sub, s1, compress(T, keep)) != w:
                            return False
                    except FamilyError:
                        return False
    return True
