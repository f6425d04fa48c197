"""Command line front end: ``coopet <command> [options]``.

Exit status is 0 on success, 1 when a computation or axiom check fails, and
2 for bad input (unreadable documents, unknown players, invalid families).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from functools import partial
from pathlib import Path

from . import __version__
from .axioms import independence_suite, standard_battery
from .documents import (
    FORMAT_TAG,
    game_document,
    parse_external_family,
    parse_game,
    parse_internal_family,
)
from .errors import CoopetError, IdentityViolation
from .families import (
    P_PERMUTATION,
    P_UNIFORM,
    PRESETS,
    Q_PERMUTATION,
    Q_UNIFORM,
    has_charac_property,
    validate_family,
)
from .game import (
    Game,
    PlayerSet,
    format_scalar,
    from_dividends,
    popcount,
    random_monotone_game,
    submasks,
    unanimity_game,
    weighted_majority_game,
)
from .indices import attitude, check_attainment, index_report

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2
DEFAULT_TABLE_CAP = 16


class InputError(CoopetError):
    pass


# --- configuration ---------------------------------------------------------

def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _family(selector: str, kind: str, exact: bool):
    builtin = {
        "internal": {"uniform": P_UNIFORM, "perm": P_PERMUTATION},
        "external": {"uniform": Q_UNIFORM, "perm": Q_PERMUTATION},
    }[kind]
    if selector in builtin:
        return builtin[selector]
    if selector.startswith("custom:"):
        text = _read(selector[len("custom:"):])
        if kind == "internal":
            return parse_internal_family(text, exact)
        return parse_external_family(text, exact)
    raise InputError(f"unknown {kind} family {selector!r}; use uniform, perm or custom:FILE")


def _families(args, players: PlayerSet):
    exact = args.mode == "exact"
    internal, external = PRESETS[args.preset] if args.preset else (P_UNIFORM, Q_PERMUTATION)
    if args.internal:
        internal = _family(args.internal, "internal", exact)
    if args.external:
        external = _family(args.external, "external", exact)
    for fam in (internal, external):
        report = validate_family(fam, players, exact)
        if not report.ok:
            raise InputError(f"{fam.name} family is invalid at {report.coalition}: {report.message}")
    return internal, external


def _load_game(args) -> Game:
    if not args.game:
        raise InputError("--game FILE is required")
    return parse_game(_read(args.game), strict=args.strict, exact=args.mode == "exact")


def _selected(args, game: Game) -> list[int]:
    players = game.players
    if getattr(args, "all", False):
        return list(range(1, 1 << players.n))
    if getattr(args, "size", None) is not None:
        return [S for S in range(1, 1 << players.n) if popcount(S) == args.size]
    if not args.coalition:
        raise InputError("select a coalition with --coalition, --all or --size")
    out = []
    for sel in args.coalition:
        S = players.coalition(sel)
        if not S:
            raise InputError("the coalition must be non-empty")
        out.append(S)
    return out


def _table_cap(args) -> int:
    if args.max_n is not None:
        return args.max_n
    env = os.environ.get("COOPET_MAX_N")
    if env:
        try:
            return int(env)
        except ValueError:
            raise InputError(f"COOPET_MAX_N must be an integer, got {env!r}") from None
    return DEFAULT_TABLE_CAP


# --- rendering -------------------------------------------------------------

def _num(x, exact: bool):
    return format_scalar(x) if exact else float(x)


def _report_row(report, exact: bool) -> dict:
    return {
        "coalition": report.labels,
        "s": report.size,
        "phi": _num(report.phi, exact),
        "coop": _num(report.coop, exact),
        "absolute": _num(report.absolute, exact),
        "classification": report.classes,
        "flags": report.flags,
    }


def _cell(value) -> str:
    if isinstance(value, list):
        return ",".join(str(x) for x in value)
    if isinstance(value, dict):
        return ";".join(f"{k}={v}" for k, v in value.items())
    if isinstance(value, float):
        return repr(value)
    if value is None:
        return ""
    return str(value)


def _emit(out, fmt: str, payload: dict, rows: list[dict], columns: list[str]):
    if fmt == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    elif fmt == "csv":
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(c)) for c in columns])
    else:
        header = {k: v for k, v in payload.items() if k != "rows"}
        for k, v in header.items():
            out.write(f"# {k}: {_cell(v) if not isinstance(v, dict) else json.dumps(v)}\n")
        cells = [[_cell(r.get(c)) for c in columns] for r in rows]
        widths = [max([len(c)] + [len(r[k]) for r in cells]) for k, c in enumerate(columns)]
        out.write("  ".join(c.ljust(w) for c, w in zip(columns, widths)).rstrip() + "\n")
        for r in cells:
            out.write("  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip() + "\n")


def _game_info(game: Game) -> dict:
    return {"players": list(game.players.labels), "n": game.n, "mode": game.mode,
            "monotone": game.monotone}


def _header(command: str, game: Game, internal=None, external=None) -> dict:
    head = {"format": FORMAT_TAG, "command": command, "game": _game_info(game)}
    if internal is not None:
        head["internal"] = internal.name
        head["external"] = external.name
    return head


REPORT_COLUMNS = ["coalition", "s", "phi", "coop", "absolute", "classification", "flags"]


# --- commands --------------------------------------------------------------

def cmd_compute(args, out) -> int:
    game = _load_game(args)
    internal, external = _families(args, game.players)
    rows = [_report_row(index_report(game, S, internal, external), game.exact) for S in _selected(args, game)]
    _emit(out, args.format, {**_header("compute", game, internal, external), "rows": rows}, rows, REPORT_COLUMNS)
    return EXIT_OK


def _table_row(game, internal, external, S):
    return _report_row(index_report(game, S, internal, external), game.exact)


def cmd_table(args, out) -> int:
    game = _load_game(args)
    cap = _table_cap(args)
    if game.n > cap:
        raise InputError(f"{game.n} players exceeds the table cap of {cap}; raise it with --max-n or COOPET_MAX_N")
    internal, external = _families(args, game.players)
    coalitions = list(range(1, 1 << game.n))
    work = partial(_table_row, game, internal, external)
    if args.jobs > 1:
        chunk = max(1, len(coalitions) // (args.jobs * 4))
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(work, coalitions, chunksize=chunk))
    else:
        rows = [work(S) for S in coalitions]
    _emit(out, args.format, {**_header("table", game, internal, external), "rows": rows}, rows, REPORT_COLUMNS)
    return EXIT_OK


def cmd_attitude(args, out) -> int:
    game = _load_game(args)
    internal, _ = _families(args, game.players)
    rows = []
    for S in _selected(args, game):
        if args.opponent is not None:
            opponents = [game.players.coalition(args.opponent)]
        else:
            opponents = list(submasks(game.grand & ~S))
        for T in opponents:
            rows.append({"coalition": game.players.labels_of(S), "opponent": game.players.labels_of(T),
                         "attitude": _num(attitude(game, S, T, internal), game.exact),
                         "marginal": _num(game.marginal_contribution(S, T), game.exact)})
    head = {**_header("attitude", game), "internal": internal.name, "rows": rows}
    _emit(out, args.format, head, rows, ["coalition", "opponent", "attitude", "marginal"])
    return EXIT_OK


def cmd_classify(args, out) -> int:
    game = _load_game(args)
    internal, external = _families(args, game.players)
    rows = []
    status = EXIT_OK
    for S in _selected(args, game):
        rep = check_attainment(game, S, internal, external)
        for T, cls in rep.classes.items():
            rows.append({"coalition": game.players.labels_of(S), "opponent": game.players.labels_of(T),
                         "class": cls.value, "marginal": _num(game.marginal_contribution(S, T), game.exact)})
        rows.append({"coalition": game.players.labels_of(S), "opponent": "*",
                     "class": ("essential" if rep.all_essential else
                               "fully-complementary" if rep.all_fully_complementary else
                               "mixed" if rep.contributes else "not-contributing"),
                     "phi": _num(rep.phi, game.exact), "coop": _num(rep.coop, game.exact),
                     "bound_consistent": rep.holds, "notes": rep.notes})
        if not rep.holds:
            status = EXIT_FAIL
    head = {**_header("classify", game, internal, external), "rows": rows}
    _emit(out, args.format, head, rows,
          ["coalition", "opponent", "class", "marginal", "phi", "coop", "bound_consistent"])
    return status


def cmd_mobius(args, out) -> int:
    game = _load_game(args)
    dividends = game.mobius_transform()
    rebuilt = from_dividends(game.players, dividends, game.exact)
    ok = rebuilt.worths == game.worths if game.exact else all(
        abs(a - b) <= 1e-9 for a, b in zip(rebuilt.worths, game.worths))
    rows = [{"coalition": game.players.labels_of(C), "dividend": _num(d, game.exact)}
            for C, d in enumerate(dividends) if C and d != 0]
    head = {**_header("mobius", game), "reconstruction_ok": ok, "rows": rows}
    _emit(out, args.format, head, rows, ["coalition", "dividend"])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_check_axioms(args, out) -> int:
    if not 1 <= args.battery_n <= 5:
        raise InputError("--battery-n must lie in 1..5")
    variants = ["uniform", "permutation"] if args.variant == "both" else [args.variant]
    games = standard_battery(args.battery_n, seed=args.seed)
    reports = [independence_suite(v, games, max_n=args.battery_n, trials=args.trials, seed=args.seed)
               for v in variants]
    rows = []
    for rep in reports:
        for name, verdicts in rep.verdicts.items():
            row = {"variant": rep.variant, "index": name, "expected_failure": rep.expected_failure[name] or "-"}
            for ax, v in verdicts.items():
                row[ax] = "pass" if v.holds else "fail"
            row["matches"] = rep.row_matches(name)
            rows.append(row)
    ok = all(rep.matches for rep in reports)
    payload = {"format": FORMAT_TAG, "command": "check-axioms", "battery_games": len(games),
               "trials": args.trials, "seed": args.seed, "matches": ok,
               "suites": [rep.as_dict() for rep in reports]}
    if args.format == "json":
        out.write(json.dumps(payload, indent=2) + "\n")
    else:
        head = {k: v for k, v in payload.items() if k != "suites"}
        _emit(out, args.format, head, rows,
              ["variant", "index", "expected_failure", "L", "SB", "EN", "ICU", "ICP", "matches"])
    return EXIT_OK if ok else EXIT_FAIL


def cmd_generate(args, out) -> int:
    labels = [x.strip() for x in args.labels.split(",")] if args.labels else None
    if args.kind == "unanimity":
        if args.n is None and not labels:
            raise InputError("unanimity needs --n or --labels")
        players = PlayerSet(tuple(labels)) if labels else PlayerSet.of_size(args.n)
        if not args.carrier:
            raise InputError("unanimity needs --carrier, e.g. --carrier 1,2")
        game = unanimity_game(players, players.coalition(args.carrier))
    elif args.kind == "weighted-majority":
        if args.quota is None or not args.weights:
            raise InputError("weighted-majority needs --quota and --weights")
        game = weighted_majority_game(args.quota, [x.strip() for x in args.weights.split(",")], labels)
    else:
        n = len(labels) if labels else args.n
        if n is None:
            raise InputError("random-monotone needs --n or --labels")
        game = random_monotone_game(n, args.seed, labels)
    out.write(json.dumps(game_document(game, args.layout), indent=2) + "\n")
    return EXIT_OK


def cmd_validate(args, out) -> int:
    game = _load_game(args)
    exact = args.mode == "exact"
    internal = _family(args.internal or "uniform", "internal", exact)
    external = _family(args.external or "perm", "external", exact)
    fam = [validate_family(internal, game.players, exact).as_dict() | {"role": "internal"},
           validate_family(external, game.players, exact).as_dict() | {"role": "external"}]
    nulls = [game.players.labels[i] for i in range(game.n) if game.is_null_player(i)]
    payload = {**_header("validate", game), "null_players": nulls,
               "external_restriction_consistent": has_charac_property(external, game.players)
               if fam[1]["ok"] else None,
               "rows": fam}
    _emit(out, args.format, payload, fam, ["role", "family", "ok", "checked", "coalition", "deficit", "message"])
    return EXIT_OK if all(f["ok"] for f in fam) else EXIT_FAIL


COMMANDS = {
    "compute": cmd_compute,
    "table": cmd_table,
    "attitude": cmd_attitude,
    "classify": cmd_classify,
    "mobius": cmd_mobius,
    "check-axioms": cmd_check_axioms,
    "generate": cmd_generate,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv", "pretty"), default="json")
    common.add_argument("--mode", choices=("exact", "float"), default="exact")
    common.add_argument("--seed", type=int, default=0)

    game_opts = argparse.ArgumentParser(add_help=False)
    game_opts.add_argument("--game", metavar="FILE")
    game_opts.add_argument("--strict", action="store_true", help="reject sparse documents with missing coalitions")
    game_opts.add_argument("--internal", metavar="{uniform,perm,custom:FILE}")
    game_opts.add_argument("--external", metavar="{uniform,perm,custom:FILE}")
    game_opts.add_argument("--preset", choices=sorted(PRESETS),
                           help="banzhaf = uniform/uniform, so = perm/perm, su = uniform/perm")
    game_opts.add_argument("--jobs", type=int, default=1)
    game_opts.add_argument("--max-n", type=int, default=None, help="table size cap (default 16)")

    select = argparse.ArgumentParser(add_help=False)
    select.add_argument("--coalition", action="append", metavar="LABELS", help="comma separated labels")
    select.add_argument("--all", action="store_true")
    select.add_argument("--size", type=int)

    parser = argparse.ArgumentParser(prog="coopet", description="Coopetition indices for TU-games.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("compute", parents=[common, game_opts, select], help="indices for selected coalitions")
    sub.add_parser("table", parents=[common, game_opts], help="indices for every coalition")
    p = sub.add_parser("attitude", parents=[common, game_opts, select], help="attitude towards opponents")
    p.add_argument("--opponent", metavar="LABELS")
    sub.add_parser("classify", parents=[common, game_opts, select], help="contributing-coalition classes")
    sub.add_parser("mobius", parents=[common, game_opts], help="Harsanyi dividends")
    p = sub.add_parser("check-axioms", parents=[common], help="axiom independence suites")
    p.add_argument("--variant", choices=("uniform", "permutation", "both"), default="both")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--battery-n", type=int, default=5)
    p = sub.add_parser("generate", parents=[common], help="emit a game document")
    p.add_argument("kind", choices=("unanimity", "weighted-majority", "random-monotone"))
    p.add_argument("--n", type=int)
    p.add_argument("--labels")
    p.add_argument("--carrier")
    p.add_argument("--quota")
    p.add_argument("--weights")
    p.add_argument("--layout", choices=("dense", "sparse"), default="dense")
    sub.add_parser("validate", parents=[common, game_opts], help="check a game and its families")
    return parser


def main(argv=None, out=None) -> int:
    out = out if out is not None else sys.stdout
    args = build_parser().parse_args(argv)
    if getattr(args, "jobs", 1) < 1:
        print("coopet: --jobs must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    buffer = io.StringIO()
    try:
        status = COMMANDS[args.command](args, buffer)
    except IdentityViolation as exc:
        print(f"coopet: identity violated: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except (CoopetError, ValueError) as exc:
        print(f"coopet: {exc}", file=sys.stderr)
        return EXIT_INPUT
    out.write(buffer.getvalue())
    return status


if __name__ == "__main__":
    sys.exit(main())
