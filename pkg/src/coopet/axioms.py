"""Group indices, axiom checkers and the independence counterexamples.

A group index maps ``(S, game)`` to a number and is zero on the empty
coalition.  The checkers test one axiom on concrete games and return an
:class:`AxiomVerdict` carrying the first violation found, if any.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Sequence

from .errors import DomainError, PreconditionError
from .game import (
    Game,
    Scalar,
    add_null_player,
    compress,
    format_scalar,
    popcount,
    random_game,
    random_monotone_game,
    submasks,
    unanimity_game,
)
from .indices import shapley_owen_coopetition, shapley_value, uniform_shapley_coopetition

AXIOMS = ("L", "SB", "EN", "ICU", "ICP")
AXIOM_NAMES = {
    "L": "linearity",
    "SB": "symmetry over the pure bargaining game",
    "EN": "external null player neutrality (nullity)",
    "ICU": "internal null player contraction, uniform splits",
    "ICP": "internal null player contraction, permutation splits",
}


@dataclass(frozen=True)
class GroupIndex:
    name: str
    evaluator: Callable[[int, Game], Scalar]

    def __call__(self, S: int, game: Game) -> Scalar:
        if S == 0:
            return game.zero()
        return self.evaluator(S, game)


@dataclass
class AxiomVerdict:
    axiom: str
    index: str
    holds: bool
    checked: int = 0
    witness: dict | None = None
    metadata: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "axiom": self.axiom,
            "index": self.index,
            "holds": self.holds,
            "checked": self.checked,
            "witness": self.witness,
            "metadata": self.metadata,
        }


def _merge(axiom: str, index: GroupIndex, verdicts: Iterable[AxiomVerdict], **metadata) -> AxiomVerdict:
    checked = 0
    for v in verdicts:
        checked += v.checked
        if not v.holds:
            return AxiomVerdict(axiom, index.name, False, checked, v.witness, {**v.metadata, **metadata})
    return AxiomVerdict(axiom, index.name, True, checked, None, metadata)


def _game_record(game: Game) -> dict:
    return {"players": list(game.players.labels), "worth": [format_scalar(w) for w in game.worths]}


def _equal(x, y, exact: bool) -> bool:
    return x == y if exact else abs(x - y) <= 1e-9


def icu_factor(s: int) -> Fraction:
    """Contraction for a coalition of ``s`` players shedding a null member, uniform splits."""
    return Fraction(2 ** (s - 1) - 2, 2 ** (s - 1) - 1)


def icp_factor(s: int) -> Fraction:
    """Same contraction under permutation splits."""
    return Fraction((s + 1) * (s - 2), s * (s - 1))


def check_linearity(index: GroupIndex, n: int, trials: int = 50, seed: int = 0,
                    null_players: int = 0) -> AxiomVerdict:
    """Compare ``xi(a v + b w)`` with ``a xi(v) + b xi(w)`` on seeded random games.

    ``null_players`` players whose presence never matters are appended to
    every sampled game.
    """
    if n < 1 or null_players >= n:
        raise DomainError("need at least one non-null player")
    rng = random.Random(seed)
    checked = 0
    meta = {"n": n, "trials": trials, "seed": seed, "null_players": null_players}
    for trial in range(trials):
        v = random_game(n - null_players, rng)
        w = random_game(n - null_players, rng)
        for _ in range(null_players):
            v, w = add_null_player(v), add_null_player(w)
        a = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        b = Fraction(rng.randint(-4, 4), rng.randint(1, 3))
        mix = a * v + b * w
        for S in range(1, 1 << n):
            checked += 1
            lhs = index(S, mix)
            rhs = a * index(S, v) + b * index(S, w)
            if lhs != rhs:
                return AxiomVerdict("L", index.name, False, checked, {
                    "trial": trial, "alpha": str(a), "beta": str(b), "coalition": v.players.labels_of(S),
                    "v": _game_record(v), "w": _game_record(w), "lhs": str(lhs), "rhs": str(rhs),
                }, meta)
    return AxiomVerdict("L", index.name, True, checked, None, meta)


def check_sb(index: GroupIndex, n: int) -> AxiomVerdict:
    """``xi(S; u_N) = 1 / (n - s + 1)`` for every non-empty ``S``."""
    u = unanimity_game(n, (1 << n) - 1)
    checked = 0
    for S in range(1, 1 << n):
        checked += 1
        got = index(S, u)
        want = Fraction(1, n - popcount(S) + 1)
        if got != want:
            return AxiomVerdict("SB", index.name, False, checked, {
                "n": n, "coalition": u.players.labels_of(S), "lhs": str(got), "rhs": str(want)})
    return AxiomVerdict("SB", index.name, True, checked, metadata={"n": n})


def check_en(index: GroupIndex, game: Game, i: int) -> AxiomVerdict:
    """Dropping an outside null player ``i`` from the game leaves the index unchanged."""
    if not game.is_null_player(i):
        raise PreconditionError(f"player {game.players.labels[i]} is not null")
    if game.n == 1:
        return AxiomVerdict("EN", index.name, True, 0)
    bit = 1 << i
    keep = game.grand & ~bit
    sub = game.restrict(bit)
    checked = 0
    for S in submasks(keep):
        if not S:
            continue
        checked += 1
        lhs = index(S, game)
        rhs = index(compress(S, keep), sub)
        if not _equal(lhs, rhs, game.exact):
            return AxiomVerdict("EN", index.name, False, checked, {
                "game": _game_record(game), "coalition": game.players.labels_of(S),
                "null_player": game.players.labels[i], "lhs": str(lhs), "rhs": str(rhs)})
    return AxiomVerdict("EN", index.name, True, checked)


def _check_contraction(axiom: str, factor: Callable[[int], Fraction], index: GroupIndex,
                       game: Game, S: int, i: int) -> AxiomVerdict:
    bit = 1 << i
    if not S & bit:
        raise PreconditionError("the null player must belong to the coalition")
    if popcount(S) < 2:
        raise PreconditionError("contraction needs at least two players in the coalition")
    if not game.is_null_player(i):
        raise PreconditionError(f"player {game.players.labels[i]} is not null")
    keep = game.grand & ~bit
    s = popcount(S)
    lhs = index(S, game)
    rhs = game.scalar(factor(s)) * index(compress(S & ~bit, keep), game.restrict(bit))
    if _equal(lhs, rhs, game.exact):
        return AxiomVerdict(axiom, index.name, True, 1)
    return AxiomVerdict(axiom, index.name, False, 1, {
        "game": _game_record(game), "coalition": game.players.labels_of(S),
        "null_player": game.players.labels[i], "factor": str(factor(s)), "lhs": str(lhs), "rhs": str(rhs)})


def check_icu(index: GroupIndex, game: Game, S: int, i: int) -> AxiomVerdict:
    """Removing null member ``i`` scales the index by ``(2**(s-1) - 2) / (2**(s-1) - 1)``."""
    return _check_contraction("ICU", icu_factor, index, game, S, i)


def check_icp(index: GroupIndex, game: Game, S: int, i: int) -> AxiomVerdict:
    """Removing null member ``i`` scales the index by ``(s+1)(s-2) / (s(s-1))``."""
    return _check_contraction("ICP", icp_factor, index, game, S, i)


# --- indices ---------------------------------------------------------------

def _index_fn(fn):
    return lambda S, game: fn(game, S)


C_SU = GroupIndex("C_SU", _index_fn(uniform_shapley_coopetition))
C_SO = GroupIndex("C_SO", _index_fn(shapley_owen_coopetition))
PHI_SH = GroupIndex("Phi_Sh", _index_fn(shapley_value))


@lru_cache(maxsize=512)
def _null_mask(game: Game) -> int:
    return game.null_players()


@lru_cache(maxsize=512)
def _dividends(game: Game) -> tuple:
    return tuple(game.mobius_transform())


def _uniform_split_mass(s: int, r: int) -> Fraction:
    """Share of uniform splits of ``s`` players that cut a block of ``r`` of them."""
    if r == s:
        return Fraction(1)
    return Fraction(2 ** (s - 1) - 2 ** (s - r), 2 ** (s - 1) - 1)


def _perm_split_mass(s: int, r: int) -> Fraction:
    if r == s:
        return Fraction(1)
    return Fraction((s + 1) * (r - 1), (s - 1) * (r + 1))


SPLIT_MASS = {"uniform": _uniform_split_mass, "permutation": _perm_split_mass}


def l_index_value(variant: str, n: int, m: int, s: int, z: int, as_printed: bool = False) -> Fraction:
    """Value of the non-linear counterexample for ``n >= 2`` players.

    ``m`` null players in the game, ``z`` of them inside the ``s``-player
    coalition.  The default completes the printed expression where it breaks
    down: coalitions made only of null players get 0, and a non-null
    singleton gets factor 1.  ``as_printed`` evaluates the expression
    literally, raising where it divides by zero.
    """
    if m == 0:
        return Fraction(1, n - s + 1)
    base = Fraction(1, (n - m) - (s - z) + 1)
    if as_printed:
        if variant == "uniform":
            den = 2 ** (s - 1) - 1
            if den == 0:
                raise DomainError("printed expression is 0/0 for singletons")
            return base * Fraction(2 ** (s - 1) - 2 ** z, den)
        if s == 1:
            raise DomainError("printed expression is 0/0 for singletons")
        return base * Fraction((s + 1) * (s - z - 1), (s - 1) * (s - z + 1))
    if z == s:
        return Fraction(0)
    return base * SPLIT_MASS[variant](s, s - z)


def enpn_unanimity_value(variant: str, n: int, C: int, S: int, as_printed: bool = False) -> Fraction:
    """Value of the non-neutral counterexample on ``u_C``.

    It matches the characterised index except that the pure bargaining factor
    ``1 / (n - s + 1)`` ignores how many players lie outside ``C``.  With
    ``as_printed`` coalitions inside a proper carrier get 0, as the formula
    is literally written.
    """
    grand = (1 << n) - 1
    s = popcount(S)
    if C == grand:
        return Fraction(1, n - s + 1)
    r = popcount(S & C)
    if r == 0 or (as_printed and r == s):
        return Fraction(0)
    return Fraction(1, n - s + 1) * SPLIT_MASS[variant](s, r)


def _l_index(variant: str) -> GroupIndex:
    def evaluate(S: int, game: Game) -> Scalar:
        if game.n == 1:
            # single-player case taken as written; S is non-empty here
            return game.scalar(1)
        nulls = _null_mask(game)
        value = l_index_value(variant, game.n, popcount(nulls), popcount(S), popcount(S & nulls))
        return game.scalar(value)

    return GroupIndex(f"xi_L_{variant}", evaluate)


def _enpn_index(variant: str) -> GroupIndex:
    def evaluate(S: int, game: Game) -> Scalar:
        total = game.zero()
        for C, d in enumerate(_dividends(game)):
            if C and d:
                total += d * game.scalar(enpn_unanimity_value(variant, game.n, C, S))
        return total

    return GroupIndex(f"xi_ENPN_{variant}", evaluate)


XI_SB = GroupIndex("xi_SB", lambda S, game: game.zero())

COUNTEREXAMPLES = {
    "L-uniform": _l_index("uniform"),
    "L-perm": _l_index("permutation"),
    "SB": XI_SB,
    "INPCU": GroupIndex("xi_INPCU", PHI_SH.evaluator),
    "INPCP": GroupIndex("xi_INPCP", PHI_SH.evaluator),
    "ENPN-uniform": _enpn_index("uniform"),
    "ENPN-perm": _enpn_index("permutation"),
}


def counterexample_index(kind: str) -> GroupIndex:
    try:
        return COUNTEREXAMPLES[kind]
    except KeyError:
        raise DomainError(f"unknown counterexample {kind!r}; choose from {sorted(COUNTEREXAMPLES)}") from None


# --- battery and suites ----------------------------------------------------

def standard_battery(max_n: int = 5, random_sizes: Sequence[int] = (3, 4, 5), per_size: int = 25,
                     seed: int = 2024) -> list[Game]:
    """Every unanimity game up to ``max_n`` players, then seeded random
    monotone games with one null player appended."""
    games = []
    for n in range(1, max_n + 1):
        for C in range(1, 1 << n):
            games.append(unanimity_game(n, C))
    rng = random.Random(seed)
    for n in random_sizes:
        for _ in range(per_size):
            games.append(add_null_player(random_monotone_game(n, rng)))
    return games


def check_en_battery(index: GroupIndex, games: Iterable[Game]) -> AxiomVerdict:
    def run():
        for game in games:
            nulls = _null_mask(game)
            for i in range(game.n):
                if nulls >> i & 1:
                    yield check_en(index, game, i)
    return _merge("EN", index, run())


def check_contraction_battery(axiom: str, index: GroupIndex, games: Iterable[Game]) -> AxiomVerdict:
    check = {"ICU": check_icu, "ICP": check_icp}[axiom]

    def run():
        for game in games:
            nulls = _null_mask(game)
            for i in range(game.n):
                if not nulls >> i & 1:
                    continue
                for S in submasks(game.grand):
                    if S >> i & 1 and popcount(S) >= 2:
                        yield check(index, game, S, i)
    return _merge(axiom, index, run())


def check_sb_battery(index: GroupIndex, max_n: int = 5) -> AxiomVerdict:
    return _merge("SB", index, (check_sb(index, n) for n in range(1, max_n + 1)), max_n=max_n)


def check_linearity_battery(index: GroupIndex, n: int = 4, trials: int = 50, seed: int = 0) -> AxiomVerdict:
    """Linearity on plain random games, then on random games carrying a null player."""
    return _merge("L", index, (
        check_linearity(index, n, trials, seed),
        check_linearity(index, n, max(1, trials // 2), seed + 1, null_players=1),
    ), n=n, trials=trials + max(1, trials // 2), seed=seed)


@dataclass
class IndependenceReport:
    variant: str
    axioms: tuple[str, ...]
    verdicts: dict[str, dict[str, AxiomVerdict]]
    expected_failure: dict[str, str | None]

    def row_matches(self, name: str) -> bool:
        want = self.expected_failure[name]
        return all(v.holds == (ax != want) for ax, v in self.verdicts[name].items())

    @property
    def matches(self) -> bool:
        return all(self.row_matches(name) for name in self.verdicts)

    def as_dict(self) -> dict:
        return {
            "variant": self.variant,
            "axioms": list(self.axioms),
            "matches": self.matches,
            "rows": [
                {
                    "index": name,
                    "expected_failure": self.expected_failure[name],
                    "matches": self.row_matches(name),
                    "verdicts": {ax: v.as_dict() for ax, v in row.items()},
                }
                for name, row in self.verdicts.items()
            ],
        }


def independence_suite(variant: str, games: Sequence[Game] | None = None, max_n: int = 5,
                       trials: int = 50, seed: int = 0, linearity_n: int = 4) -> IndependenceReport:
    """Run the four axioms of one characterisation on the characterised index
    and on each counterexample, recording the full verdict matrix."""
    if variant not in ("uniform", "permutation"):
        raise DomainError("variant must be 'uniform' or 'permutation'")
    contraction = "ICU" if variant == "uniform" else "ICP"
    if games is None:
        games = standard_battery(max_n)
    if variant == "uniform":
        rows = [(C_SU, None), (COUNTEREXAMPLES["L-uniform"], "L"), (XI_SB, "SB"),
                (COUNTEREXAMPLES["INPCU"], "ICU"), (COUNTEREXAMPLES["ENPN-uniform"], "EN")]
    else:
        rows = [(C_SO, None), (COUNTEREXAMPLES["L-perm"], "L"), (XI_SB, "SB"),
                (COUNTEREXAMPLES["INPCP"], "ICP"), (COUNTEREXAMPLES["ENPN-perm"], "EN")]
    verdicts = {}
    expected = {}
    for index, fails in rows:
        verdicts[index.name] = {
            "L": check_linearity_battery(index, linearity_n, trials, seed),
            "SB": check_sb_battery(index, max_n),
            "EN": check_en_battery(index, games),
            contraction: check_contraction_battery(contraction, index, games),
        }
        expected[index.name] = fails
    return IndependenceReport(variant, ("L", "SB", "EN", contraction), verdicts, expected)
