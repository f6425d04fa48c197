"""The ``coopet/1`` JSON document formats for games and custom families.

Game document::

    {"format": "coopet/1",
     "players": ["a", "b", "c"],
     "worth": [0, 0, 0, "1/2", ...]}            # dense, 2**n values in bit order

or with a sparse worth list, one entry per coalition::

     "worth": [{"coalition": ["a", "b"], "value": "1/2"}, [["c"], 1], ...]

Values are JSON integers, decimals, or ``"num/den"`` strings.  Decimals are
read exactly, never through binary floats.
"""

from __future__ import annotations

import json
from decimal import Decimal
from fractions import Fraction

from .errors import CoopetError, DocumentError
from .families import CustomExternal, CustomInternal, TabulatedSemivalue
from .game import Game, PlayerSet, format_scalar

FORMAT_TAG = "coopet/1"


def _load(text: str) -> dict:
    try:
        doc = json.loads(text, parse_float=Decimal)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise DocumentError("document must be a JSON object")
    tag = doc.get("format", FORMAT_TAG)
    if tag != FORMAT_TAG:
        raise DocumentError(f"unsupported format tag {tag!r}, expected {FORMAT_TAG!r}")
    return doc


def _value(raw, exact: bool, allow_decimal: bool = True):
    if isinstance(raw, bool) or not isinstance(raw, (int, str, Decimal)):
        raise DocumentError(f"not a numeric value: {raw!r}")
    if isinstance(raw, Decimal):
        if exact and not allow_decimal and raw != raw.to_integral_value():
            raise DocumentError(f"decimal literal {raw} not allowed in exact mode; write it as \"num/den\"")
        return Fraction(raw) if exact else float(raw)
    if isinstance(raw, str):
        try:
            q = Fraction(raw.strip())
        except (ValueError, ZeroDivisionError):
            raise DocumentError(f"not a rational literal: {raw!r}") from None
        return q if exact else float(q)
    return Fraction(raw) if exact else float(raw)


def _players(doc: dict) -> PlayerSet:
    labels = doc.get("players")
    if not isinstance(labels, list) or not labels:
        raise DocumentError("'players' must be a non-empty list of labels")
    if any(not isinstance(x, (str, int)) or isinstance(x, bool) for x in labels):
        raise DocumentError("player labels must be strings")
    labels = [str(x) for x in labels]
    if len(set(labels)) != len(labels):
        raise DocumentError(f"duplicate player labels: {labels}")
    try:
        return PlayerSet(tuple(labels))
    except CoopetError as exc:
        raise DocumentError(str(exc)) from None


def _coalition(players: PlayerSet, raw) -> int:
    if isinstance(raw, str):
        raw = [x for x in (y.strip() for y in raw.split(",")) if x]
    if not isinstance(raw, list):
        raise DocumentError(f"coalition must be a list of labels, got {raw!r}")
    try:
        return players.coalition([str(x) for x in raw])
    except CoopetError as exc:
        raise DocumentError(str(exc)) from None


def parse_game(text: str, strict: bool = False, exact: bool = True) -> Game:
    """Build a game from a document; missing sparse entries are 0 unless ``strict``."""
    doc = _load(text)
    players = _players(doc)
    worth = doc.get("worth")
    size = 1 << players.n
    zero = Fraction(0) if exact else 0.0
    if isinstance(worth, list) and all(not isinstance(x, (list, dict)) for x in worth):
        if len(worth) != size:
            raise DocumentError(f"dense worth array needs {size} entries, has {len(worth)}")
        values = [_value(x, exact) for x in worth]
    elif isinstance(worth, list):
        values = [None] * size
        for entry in worth:
            if isinstance(entry, dict):
                if "coalition" not in entry or "value" not in entry:
                    raise DocumentError(f"sparse entry needs 'coalition' and 'value': {entry!r}")
                raw_c, raw_v = entry["coalition"], entry["value"]
            elif isinstance(entry, list) and len(entry) == 2:
                raw_c, raw_v = entry
            else:
                raise DocumentError(f"malformed sparse entry {entry!r}")
            S = _coalition(players, raw_c)
            if values[S] is not None:
                raise DocumentError(f"coalition {players.labels_of(S)} listed twice")
            values[S] = _value(raw_v, exact)
        if values[0] is None:
            values[0] = zero
        missing = [S for S, x in enumerate(values) if x is None]
        if missing and strict:
            raise DocumentError(f"{len(missing)} coalitions missing, first {players.labels_of(missing[0])}")
        values = [zero if x is None else x for x in values]
    else:
        raise DocumentError("'worth' must be a dense array or a list of sparse entries")
    if values[0] != 0:
        raise DocumentError(f"the empty coalition must be worth 0, got {values[0]}")
    game = Game(players, tuple(values), exact)
    game.monotone  # computed once, cached on the instance
    return game


def game_document(game: Game, layout: str = "dense") -> dict:
    if layout == "dense":
        worth = [format_scalar(w) if game.exact else w for w in game.worths]
    elif layout == "sparse":
        worth = [{"coalition": game.players.labels_of(S), "value": format_scalar(w) if game.exact else w}
                 for S, w in enumerate(game.worths) if S]
    else:
        raise ValueError(f"unknown layout {layout!r}")
    return {"format": FORMAT_TAG, "players": list(game.players.labels), "worth": worth}


def serialize_game(game: Game, layout: str = "dense") -> str:
    return json.dumps(game_document(game, layout), indent=2) + "\n"


def parse_internal_family(text: str, exact: bool = True) -> CustomInternal:
    """Custom internal family::

        {"format": "coopet/1", "family": "internal",
         "distributions": [{"coalition": ["a", "b", "c"],
                            "partitions": [{"blocks": [["a"], ["b", "c"]], "p": "1/3"}, ...]}]}
    """
    doc = _load(text)
    if doc.get("family") != "internal":
        raise DocumentError("expected \"family\": \"internal\"")
    table = {}
    for dist in doc.get("distributions", []):
        S = frozenset(str(x) for x in dist.get("coalition", []))
        if len(S) < 2:
            raise DocumentError("internal distributions are defined for coalitions of two or more players")
        if S in table:
            raise DocumentError(f"coalition {sorted(S)} listed twice")
        table[S] = {}
        for part in dist.get("partitions", []):
            blocks = part.get("blocks")
            if not isinstance(blocks, list) or len(blocks) != 2:
                raise DocumentError(f"partition needs exactly two blocks: {part!r}")
            a, b = (frozenset(str(x) for x in blk) for blk in blocks)
            if not a or not b or a & b or a | b != S:
                raise DocumentError(f"{sorted(a)} | {sorted(b)} does not split {sorted(S)}")
            key = frozenset((a, b))
            if key in table[S]:
                raise DocumentError(f"partition {sorted(a)} | {sorted(b)} listed twice")
            table[S][key] = Fraction(_value(part.get("p"), exact, allow_decimal=False))
    return CustomInternal(table)


def parse_external_family(text: str, exact: bool = True):
    """Custom external family, either explicit tables or a semivalue::

        {"family": "external",
         "tables": [{"players": [...], "coalition": [...],
                     "weights": [{"opponents": [...], "q": "1/4"}, ...]}]}

        {"family": "semivalue", "rows": [{"n": 3, "s": 1, "q": ["1/3", "1/6", "1/3"]}]}
    """
    doc = _load(text)
    kind = doc.get("family")
    if kind == "semivalue":
        rows = {}
        for row in doc.get("rows", []):
            try:
                key = (int(row["n"]), int(row["s"]))
                rows[key] = [Fraction(_value(x, exact, allow_decimal=False)) for x in row["q"]]
            except (KeyError, TypeError) as exc:
                raise DocumentError(f"malformed semivalue row {row!r}") from exc
        try:
            return TabulatedSemivalue(rows)
        except CoopetError as exc:
            raise DocumentError(str(exc)) from None
    if kind != "external":
        raise DocumentError("expected \"family\": \"external\" or \"semivalue\"")
    table = {}
    for entry in doc.get("tables", []):
        N = frozenset(str(x) for x in entry.get("players", []))
        S = frozenset(str(x) for x in entry.get("coalition", []))
        if not S or not S <= N:
            raise DocumentError(f"coalition {sorted(S)} must be a non-empty subset of {sorted(N)}")
        dist = {}
        for w in entry.get("weights", []):
            T = frozenset(str(x) for x in w.get("opponents", []))
            if T & S or not T <= N:
                raise DocumentError(f"opponents {sorted(T)} must lie in {sorted(N - S)}")
            dist[T] = Fraction(_value(w.get("q"), exact, allow_decimal=False))
        table[(N, S)] = dist
    return CustomExternal(table)

