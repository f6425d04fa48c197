"""Attitude, generalized values and coopetition indices.

Everything here is a direct enumeration: opponents ``T`` range over the
subsets of ``N - S`` and internal splits over the 2-partitions of ``S``.
Results are exact whenever the game is exact.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .errors import (
    DisjointnessError,
    DomainError,
    IdentityViolation,
    PreconditionError,
)
from .families import (
    P_PERMUTATION,
    P_UNIFORM,
    Q_PERMUTATION,
    Q_UNIFORM,
    ExternalFamily,
    InternalFamily,
    factorial,
    has_charac_property,
)
from .game import Game, Scalar, compress, enumerate_two_partitions, popcount, submasks

FLOAT_TOL = 1e-9


def _check_coalition(game: Game, S: int) -> int:
    game.players.check(S)
    if S == 0:
        raise DomainError("the coalition must be non-empty")
    return S


def _blocks(game: Game, S: int, internal: InternalFamily):
    return [(R, game.scalar(w)) for R, w in internal.block_weights(game.players, S)]


def _attitude(v, S: int, T: int, blocks) -> Scalar:
    if blocks is None:
        return v[S | T] - v[T]
    split = sum(w * v[R | T] for R, w in blocks)
    return v[S | T] + v[T] - split


def attitude(game: Game, S: int, T: int, internal: InternalFamily = P_UNIFORM) -> Scalar:
    """How much better ``S`` does against ``T`` united than split.

    For a singleton this is the plain marginal contribution; otherwise
    ``v(S+T) + v(T) - sum_pi p(pi) (v(S1+T) + v(S2+T))``.
    """
    _check_coalition(game, S)
    game.players.check(T)
    if S & T:
        raise DisjointnessError("the opponent coalition must be disjoint from S")
    blocks = _blocks(game, S, internal) if popcount(S) >= 2 else None
    return _attitude(game.worths, S, T, blocks)


def generalized_value(game: Game, S: int, external: ExternalFamily = Q_PERMUTATION) -> Scalar:
    """Expected marginal contribution of ``S`` under the external family."""
    _check_coalition(game, S)
    v = game.worths
    total = game.zero()
    for T, q in external.weights(game.players, S):
        if q:
            total += game.scalar(q) * (v[S | T] - v[T])
    return total


def shapley_value(game: Game, S: int) -> Scalar:
    """Generalized Shapley value of a coalition."""
    return generalized_value(game, S, Q_PERMUTATION)


def banzhaf_value(game: Game, S: int) -> Scalar:
    return generalized_value(game, S, Q_UNIFORM)


def coopetition(game: Game, S: int, internal: InternalFamily = P_UNIFORM,
                external: ExternalFamily = Q_PERMUTATION) -> Scalar:
    """Opponent-averaged attitude of ``S``."""
    _check_coalition(game, S)
    v = game.worths
    blocks = _blocks(game, S, internal) if popcount(S) >= 2 else None
    total = game.zero()
    for T, q in external.weights(game.players, S):
        if q:
            total += game.scalar(q) * _attitude(v, S, T, blocks)
    return total


def absolute_coopetition(game: Game, S: int, internal: InternalFamily = P_UNIFORM,
                         external: ExternalFamily = Q_PERMUTATION) -> Scalar:
    """Coopetition over generalized value, or 0 when the value vanishes."""
    phi = generalized_value(game, S, external)
    if phi == 0:
        return game.zero()
    return coopetition(game, S, internal, external) / phi


def banzhaf_coopetition(game: Game, S: int) -> Scalar:
    return coopetition(game, S, P_UNIFORM, Q_UNIFORM)


def shapley_owen_coopetition(game: Game, S: int) -> Scalar:
    return coopetition(game, S, P_PERMUTATION, Q_PERMUTATION)


def uniform_shapley_coopetition(game: Game, S: int) -> Scalar:
    return coopetition(game, S, P_UNIFORM, Q_PERMUTATION)


def _value_in_restriction(game: Game, R: int, removed: int, external: ExternalFamily) -> Scalar:
    sub = game.restrict(removed)
    return generalized_value(sub, compress(R, game.grand & ~removed), external)


def uniform_shapley_via_decomposition(game: Game, S: int) -> Scalar:
    """Uniform Shapley coopetition rebuilt from Shapley group values.

    ``Sh(S) - (sum over non-empty proper R of Sh of R in the game without S - R)
    / (2**(s-1) - 1)``.
    """
    _check_coalition(game, S)
    s = popcount(S)
    if s < 2:
        raise DomainError("the decomposition needs at least two players")
    acc = game.zero()
    for R in submasks(S):
        if R and R != S:
            acc += _value_in_restriction(game, R, S ^ R, Q_PERMUTATION)
    return shapley_value(game, S) - acc / game.scalar(2 ** (s - 1) - 1)


def coopetition_via_group_values(game: Game, S: int, internal: InternalFamily,
                                 external: ExternalFamily, check_family: bool = True) -> Scalar:
    """Coopetition as group value minus the expected values of the two blocks.

    Each block's value is taken in the game without the other block.  Valid
    only for external families that are consistent under those restrictions,
    which is verified first unless ``check_family`` is false.
    """
    _check_coalition(game, S)
    if popcount(S) < 2:
        raise DomainError("the decomposition needs at least two players")
    if check_family and not has_charac_property(external, game.players):
        raise PreconditionError(f"{external!r} is not consistent under restriction")
    acc = game.zero()
    for a, b in enumerate_two_partitions(S):
        p = game.scalar(internal.weight(game.players, S, (a, b)))
        if p:
            acc += p * (_value_in_restriction(game, a, b, external)
                        + _value_in_restriction(game, b, a, external))
    return generalized_value(game, S, external) - acc


class Contribution(enum.Enum):
    NOT_CONTRIBUTING = "not-contributing"
    ESSENTIAL = "essential"
    FULLY_COMPLEMENTARY = "fully-complementary"
    MIXED = "mixed"

    def __str__(self):
        return self.value


def _equal(x, y, exact: bool) -> bool:
    return x == y if exact else abs(x - y) <= FLOAT_TOL


def classify_contributing(game: Game, S: int, T: int) -> Contribution:
    """Where ``S`` sits relative to ``T``: inert, essential, fully complementary or mixed.

    Singletons that contribute are reported as essential.
    """
    _check_coalition(game, S)
    game.players.check(T)
    if S & T:
        raise DisjointnessError("the opponent coalition must be disjoint from S")
    v = game.worths
    exact = game.exact
    gain = v[S | T] - v[T]
    if (gain <= 0) if exact else (gain <= FLOAT_TOL):
        return Contribution.NOT_CONTRIBUTING
    proper = [P for P in submasks(S) if P and P != S]
    if all(_equal(v[P | T], v[T], exact) for P in proper):
        return Contribution.ESSENTIAL
    if all(_equal(v[P | T], v[S | T], exact) for P in proper):
        return Contribution.FULLY_COMPLEMENTARY
    return Contribution.MIXED


def classification_summary(game: Game, S: int) -> dict[str, int]:
    counts = {c.value: 0 for c in Contribution}
    for T in submasks(game.grand & ~S):
        counts[classify_contributing(game, S, T).value] += 1
    return counts


@dataclass
class AttainmentReport:
    coalition: int
    phi: Scalar
    coop: Scalar
    classes: dict[int, Contribution]
    contributes: bool
    all_essential: bool
    all_fully_complementary: bool
    holds: bool
    notes: list[str] = field(default_factory=list)


def check_attainment(game: Game, S: int, internal: InternalFamily = P_UNIFORM,
                     external: ExternalFamily = Q_PERMUTATION) -> AttainmentReport:
    """Test whether ``S`` reaches one of its bounds and whether the class explains it.

    If ``S`` is essential whenever it contributes, the index must equal the
    group value; if it is fully complementary whenever it contributes, the
    index must equal minus the group value.  ``holds`` is false when either
    implication is violated.
    """
    _check_coalition(game, S)
    classes = {T: classify_contributing(game, S, T) for T in submasks(game.grand & ~S)}
    active = [c for c in classes.values() if c is not Contribution.NOT_CONTRIBUTING]
    all_ess = bool(active) and all(c is Contribution.ESSENTIAL for c in active)
    all_fc = bool(active) and all(c is Contribution.FULLY_COMPLEMENTARY for c in active)
    phi = generalized_value(game, S, external)
    coop = coopetition(game, S, internal, external)
    holds = True
    notes = []
    if not game.monotone:
        notes.append("game is not monotone: bounds are not guaranteed")
    if all_ess and not _equal(coop, phi, game.exact):
        holds = False
        notes.append("essential everywhere but coopetition differs from the group value")
    if all_fc and popcount(S) >= 2 and not _equal(coop, -phi, game.exact):
        holds = False
        notes.append("fully complementary everywhere but coopetition differs from minus the group value")
    return AttainmentReport(S, phi, coop, classes, bool(active), all_ess, all_fc, holds, notes)


def null_pair_index(game: Game, i: int, j: int, internal: InternalFamily = P_UNIFORM,
                    external: ExternalFamily = Q_PERMUTATION) -> Scalar:
    """Coopetition of ``{i, j}`` for a null player ``i``; always exactly zero."""
    if not game.is_null_player(i):
        raise PreconditionError(f"player {game.players.labels[i]} is not null")
    if i == j:
        raise DomainError("the pair needs two distinct players")
    value = coopetition(game, (1 << i) | (1 << j), internal, external)
    if not _equal(value, 0, game.exact):
        raise IdentityViolation(f"pair with a null player has coopetition {value}")
    return value


@dataclass
class NullScaling:
    k_p: Fraction | None
    k_q: Fraction | None
    conditions_met: bool
    holds: bool
    lhs: Scalar | None = None
    rhs: Scalar | None = None
    reason: str = ""

    @property
    def factor(self):
        return None if self.k_p is None or self.k_q is None else self.k_p * self.k_q


def null_scaling_check(game: Game, S: int, i: int, internal: InternalFamily = P_UNIFORM,
                       external: ExternalFamily = Q_PERMUTATION) -> NullScaling:
    """Verify that adding the null player ``i`` to ``S`` rescales the index.

    The two ratio conditions (internal split mass, external opponent mass) are
    checked by enumeration; when both are constant the product of the ratios
    must rescale the coopetition of ``S`` into that of ``S + i``.
    """
    _check_coalition(game, S)
    if popcount(S) < 2:
        raise DomainError("the scaling law needs |S| >= 2")
    bit = 1 << i
    if S & bit:
        raise DomainError("the null player must lie outside S")
    if not game.is_null_player(i):
        raise PreconditionError(f"player {game.players.labels[i]} is not null")
    players = game.players
    Si = S | bit

    k_p = None
    for a, b in enumerate_two_partitions(S):
        den = internal.weight(players, S, (a, b))
        num = internal.weight(players, Si, (a | bit, b)) + internal.weight(players, Si, (a, b | bit))
        if den == 0:
            if num != 0:
                return NullScaling(None, None, False, False, reason="internal ratio undefined")
            continue
        ratio = num / den
        if k_p is None:
            k_p = ratio
        elif ratio != k_p:
            return NullScaling(None, None, False, False, reason="internal ratio is not constant")

    k_q = None
    for T in submasks(game.grand & ~Si):
        den = external.weight(players, S, T) + external.weight(players, S, T | bit)
        num = external.weight(players, Si, T)
        if den == 0:
            if num != 0:
                return NullScaling(k_p, None, False, False, reason="external ratio undefined")
            continue
        ratio = num / den
        if k_q is None:
            k_q = ratio
        elif ratio != k_q:
            return NullScaling(k_p, None, False, False, reason="external ratio is not constant")
    if k_p is None or k_q is None:
        return NullScaling(k_p, k_q, False, False, reason="ratios have no support")

    lhs = coopetition(game, Si, internal, external)
    rhs = game.scalar(k_p * k_q) * coopetition(game, S, internal, external)
    return NullScaling(k_p, k_q, True, _equal(lhs, rhs, game.exact), lhs, rhs)


def uniform_null_factor(s: int) -> Fraction:
    """Rescaling from ``S`` to ``S + null`` under uniform splits, ``|S| = s``."""
    return Fraction(2 ** s - 2, 2 ** s - 1)


def permutation_null_factor(s: int) -> Fraction:
    """Rescaling from ``S`` to ``S + null`` under permutation splits, ``|S| = s``."""
    return Fraction((s - 1) * (s + 2), s * (s + 1))


def closed_form_unanimity(kind: str, n: int, C: int, S: int) -> Fraction:
    """Uniform Shapley (``"SU"``) or Shapley-Owen (``"SO"``) index of ``S`` in ``u_C``."""
    kind = kind.upper()
    if kind not in ("SU", "SO"):
        raise DomainError(f"unknown index kind {kind!r}")
    grand = (1 << n) - 1
    if not C or not S or C & ~grand or S & ~grand:
        raise DomainError("C and S must be non-empty subsets of the player set")
    c, s, r = popcount(C), popcount(S), popcount(S & C)
    if r == 0:
        return Fraction(0)
    if r == s:
        return Fraction(1, c - s + 1)
    if kind == "SU":
        inner = Fraction(2 ** (s - 1) - 2 ** (s - r), 2 ** (s - 1) - 1)
    else:
        inner = Fraction((s + 1) * (r - 1), (s - 1) * (r + 1))
    return inner / (c - r + 1)


def lemma_E(s: int, r: int) -> Fraction:
    """Direct summation of the Shapley-Owen split mass identity; checked against its closed form."""
    if not 1 <= r < s:
        raise DomainError(f"need 1 <= r < s, got s={s}, r={r}")
    den = factorial(s) * (s - 1)
    total = 1 - Fraction(2 * factorial(r) * factorial(s - r), den)
    for t in range(1, s - r):
        total -= comb(s - r, t) * Fraction(
            factorial(t) * factorial(s - t) + factorial(t + r) * factorial(s - t - r), den)
    closed = Fraction((s + 1) * (r - 1), (s - 1) * (r + 1))
    if total != closed:
        raise IdentityViolation(f"lemma fails at s={s}, r={r}: {total} != {closed}")
    return total


def attitude_family_coincidence(game: Game, S: int) -> bool:
    """Whether uniform and permutation splits give the same attitude against every ``T``."""
    _check_coalition(game, S)
    if popcount(S) > 3:
        raise DomainError("uniform and permutation attitudes only coincide up to three players")
    return all(_equal(attitude(game, S, T, P_UNIFORM), attitude(game, S, T, P_PERMUTATION), game.exact)
               for T in submasks(game.grand & ~S))


@dataclass
class IndexReport:
    coalition: int
    labels: list[str]
    phi: Scalar
    coop: Scalar
    absolute: Scalar
    classes: dict[str, int]
    flags: list[str] = field(default_factory=list)

    @property
    def size(self) -> int:
        return len(self.labels)


def index_report(game: Game, S: int, internal: InternalFamily = P_UNIFORM,
                 external: ExternalFamily = Q_PERMUTATION) -> IndexReport:
    phi = generalized_value(game, S, external)
    coop = coopetition(game, S, internal, external)
    absolute = coop / phi if phi != 0 else game.zero()
    flags = []
    if not game.monotone:
        flags.append("non-monotone")
        if abs(absolute) > 1:
            flags.append("outside-monotone-range")
    return IndexReport(S, game.players.labels_of(S), phi, coop, absolute,
                       classification_summary(game, S), flags)
