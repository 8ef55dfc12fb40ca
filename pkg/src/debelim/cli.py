"""Command-line front end.

Exit codes: 0 decision yes (or command succeeded), 10 decision no,
2 invalid input or usage, 1 internal failure or enumeration cap exceeded.
Every command prints a single-line JSON report on stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from pathlib import Path
from typing import Sequence

from . import formats
from .cnf import DimacsError, TrivialFormula, normalize_3bounded, parse_dimacs
from .league import solve_league
from .model import (
    BP_POINTS,
    DEFAULT_CAP,
    THREE_TEAM_POINTS,
    EnumerationCapExceeded,
    InvalidInstance,
    InvalidOutcome,
    LeagueInstance,
    check_league,
    verify_witness,
)
from .reduction import (
    BASE_SCORE,
    FOCUS,
    NotConforming,
    OrientationError,
    assignment_from_outcome,
    build_three_team,
    export_game_graph_dot,
    lift_to_four,
    make_break_variant,
    recover_gadget_index,
)
from .tournament import check_tournament, simulate_round, solve_tournament, verify_trajectory

EXIT_YES = 0
EXIT_NO = 10
EXIT_INVALID = 2
EXIT_FAILURE = 1


class UsageError(Exception):
    pass


def _report(**fields) -> None:
    print(json.dumps(fields, sort_keys=True))


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _decision(flag: bool, **extra) -> int:
    _report(decision="yes" if flag else "no", **extra)
    return EXIT_YES if flag else EXIT_NO


def _default_cap() -> int:
    raw = os.environ.get("DEBELIM_CAP")
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(float(raw))
    except ValueError:
        raise UsageError(f"DEBELIM_CAP is not a number: {raw!r}") from None


def _cap(args) -> int:
    return args.cap if args.cap is not None else _default_cap()


def cmd_league_solve(args) -> int:
    inst = formats.load_league(_read(args.file))
    start = time.perf_counter()
    decision = solve_league(inst, args.strategy, cap=_cap(args))
    elapsed = (time.perf_counter() - start) * 1000
    if decision.winnable and args.witness:
        _write(args.witness, formats.dump_league_witness(inst, decision.witness))
    return _decision(decision.winnable, algo=args.strategy, elapsed_ms=round(elapsed, 3))


def _trivial_instance(satisfiable: bool, points: tuple[int, ...]) -> LeagueInstance:
    teams = [(FOCUS, BASE_SCORE)]
    if not satisfiable:
        teams.append(("unreachable", BASE_SCORE + 1))
    return LeagueInstance(tuple(teams), (), points, FOCUS)


def cmd_league_reduce(args) -> int:
    formula = parse_dimacs(_read(args.cnf))
    status = "reduced"
    points = THREE_TEAM_POINTS if args.variant == "three" else BP_POINTS
    try:
        normal = normalize_3bounded(formula)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    except TrivialFormula as trivial:
        status = "trivially-satisfiable" if trivial.satisfiable else "trivially-unsatisfiable"
        inst = _trivial_instance(trivial.satisfiable, points)
    else:
        inst, _ = build_three_team(normal)
        if args.variant == "four":
            inst = lift_to_four(inst)
    if args.break_ is not None:
        if args.break_ < 1:
            raise UsageError("--break must be >= 1")
        inst = make_break_variant(inst, args.break_)
    _write(args.output, formats.dump_league(inst))
    if args.dot:
        _write(args.dot, export_game_graph_dot(inst))
    _report(
        status=status,
        variant=args.variant,
        matches=len(inst.matches),
        teams=len(inst.teams),
        output=args.output,
    )
    return EXIT_YES


def cmd_league_extract(args) -> int:
    inst = formats.load_league(_read(args.instance))
    outcomes = formats.load_league_witness(inst, _read(args.witness))
    check_league(inst)
    if not verify_witness(inst, outcomes):
        return _decision(False, reason="witness does not verify")
    try:
        gi = recover_gadget_index(inst)
    except ValueError as exc:
        raise UsageError(f"instance is not a gadget construction: {exc}") from None
    assignment = assignment_from_outcome(gi, outcomes)
    satisfied = gi.formula.is_satisfied_by(assignment)
    return _decision(
        satisfied,
        assignment={str(v): val for v, val in assignment.items()},
        satisfies=satisfied,
    )


def cmd_tournament_solve(args) -> int:
    state = formats.load_tournament(_read(args.file))
    start = time.perf_counter()
    decision = solve_tournament(state, args.algo, cap=_cap(args))
    elapsed = (time.perf_counter() - start) * 1000
    if decision.breakable and args.witness:
        if decision.witness is None:
            print("note: dp does not produce witnesses", file=sys.stderr)
        else:
            _write(args.witness, formats.dump_trajectory(state, decision.witness))
    return _decision(decision.breakable, algo=args.algo, elapsed_ms=round(elapsed, 3))


def cmd_tournament_simulate(args) -> int:
    state = formats.load_tournament(_read(args.file))
    check_tournament(state)
    if not 0 <= args.rounds <= state.rounds_left:
        raise UsageError(f"--rounds must be between 0 and rounds_left ({state.rounds_left})")
    rng = random.Random(args.seed)
    for _ in range(args.rounds):
        state, _ = simulate_round(state, rng)
    _write(args.output, formats.dump_tournament(state))
    _report(status="simulated", rounds_left=state.rounds_left, output=args.output)
    return EXIT_YES


def cmd_verify(args) -> int:
    text = _read(args.instance)
    kind = formats.format_of(text)
    if kind == formats.LEAGUE_FORMAT:
        inst = formats.load_league(text)
        check_league(inst)
        outcomes = formats.load_league_witness(inst, _read(args.witness))
        return _decision(verify_witness(inst, outcomes), kind="league")
    if kind == formats.TOURNAMENT_FORMAT:
        state = formats.load_tournament(text)
        check_tournament(state)
        trajectory = formats.load_trajectory(_read(args.witness))
        return _decision(verify_trajectory(state, trajectory), kind="tournament")
    raise UsageError(f"unknown instance format {kind!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="debelim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    league = sub.add_parser("league", help="fixed-schedule leagues").add_subparsers(
        dest="action", required=True
    )
    p = league.add_parser("solve", help="can the focus team still win?")
    p.add_argument("file")
    p.add_argument("--strategy", choices=["pruned", "exhaustive"], default="pruned")
    p.add_argument("--witness", metavar="OUT")
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_league_solve)

    p = league.add_parser("reduce", help="build the gadget league for a CNF formula")
    p.add_argument("--cnf", required=True)
    p.add_argument("--variant", choices=["three", "four"], required=True)
    p.add_argument("--break", dest="break_", type=int, metavar="B")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--dot", metavar="OUT")
    p.set_defaults(func=cmd_league_reduce)

    p = league.add_parser("extract-assignment", help="read a truth assignment off a witness")
    p.add_argument("instance")
    p.add_argument("witness")
    p.set_defaults(func=cmd_league_extract)

    tournament = sub.add_parser("tournament", help="Swiss-style tournaments").add_subparsers(
        dest="action", required=True
    )
    p = tournament.add_parser("solve", help="can the focus team still break?")
    p.add_argument("file")
    p.add_argument("--algo", choices=["brute", "fpt", "dp"], required=True)
    p.add_argument("--witness", metavar="OUT")
    p.add_argument("--cap", type=int)
    p.set_defaults(func=cmd_tournament_solve)

    p = tournament.add_parser("simulate", help="play random rounds")
    p.add_argument("file")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--rounds", type=int, required=True)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_tournament_simulate)

    p = sub.add_parser("verify", help="check a witness against an instance")
    p.add_argument("instance")
    p.add_argument("witness")
    p.set_defaults(func=cmd_verify)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INVALID if exc.code else EXIT_YES
    try:
        return args.func(args)
    except EnumerationCapExceeded as exc:
        _report(error=str(exc), kind="cap-exceeded")
        return EXIT_FAILURE
    except (
        UsageError,
        formats.FormatError,
        DimacsError,
        NotConforming,
        InvalidInstance,
        InvalidOutcome,
        OrientationError,
    ) as exc:
        _report(error=str(exc), kind="invalid-input")
        return EXIT_INVALID
    except Exception as exc:  # noqa: BLE001
        _report(error=f"{type(exc).__name__}: {exc}", kind="internal")
        return EXIT_FAILURE


def main() -> None:
    sys.exit(run())
