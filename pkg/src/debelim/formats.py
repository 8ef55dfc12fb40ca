"""JSON file formats: ``debelim-league/1``, ``debelim-tournament/1``, ``debelim-witness/1``.

Output is canonical (sorted keys, two-space indent, trailing newline) so that
re-serialising a parsed file reproduces it byte for byte.
"""

from __future__ import annotations

import json
from typing import Any, Sequence

from .model import LeagueInstance, MatchOutcome, TournamentState, Trajectory
from .tournament import pair_round, play_round

LEAGUE_FORMAT = "debelim-league/1"
TOURNAMENT_FORMAT = "debelim-tournament/1"
WITNESS_FORMAT = "debelim-witness/1"


class FormatError(ValueError):
    pass


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _parse(text: str) -> dict:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"not valid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise FormatError("top-level JSON value must be an object")
    return data


def _require(data: dict, key: str, kind: type | tuple[type, ...]):
    if key not in data:
        raise FormatError(f"missing field {key!r}")
    value = data[key]
    if not isinstance(value, kind) or isinstance(value, bool) and kind is int:
        raise FormatError(f"field {key!r} has the wrong type")
    return value


def _teams(data: dict) -> tuple[tuple[str, int], ...]:
    teams = []
    for entry in _require(data, "teams", list):
        if not isinstance(entry, dict):
            raise FormatError("team entries must be objects")
        teams.append((_require(entry, "id", str), _require(entry, "score", int)))
    return tuple(teams)


def format_of(text: str) -> str:
    return _require(_parse(text), "format", str)


def dump_league(inst: LeagueInstance) -> str:
    data = {
        "format": LEAGUE_FORMAT,
        "teams_per_match": inst.teams_per_match,
        "points_per_rank": list(inst.points_per_rank),
        "focus": inst.focus,
        "teams": [{"id": t, "score": s} for t, s in inst.teams],
        "matches": [list(m) for m in inst.matches],
    }
    if inst.break_threshold != 1:
        data["break_threshold"] = inst.break_threshold
    return canonical_json(data)


def load_league(text: str) -> LeagueInstance:
    data = _parse(text)
    if data.get("format") != LEAGUE_FORMAT:
        raise FormatError(f"expected format {LEAGUE_FORMAT!r}, got {data.get('format')!r}")
    points = _require(data, "points_per_rank", list)
    per_match = _require(data, "teams_per_match", int)
    if len(points) != per_match:
        raise FormatError("teams_per_match does not match points_per_rank")
    matches = _require(data, "matches", list)
    if not all(isinstance(m, list) and all(isinstance(t, str) for t in m) for m in matches):
        raise FormatError("matches must be lists of team ids")
    threshold = data.get("break_threshold", 1)
    if not isinstance(threshold, int) or isinstance(threshold, bool):
        raise FormatError("field 'break_threshold' has the wrong type")
    return LeagueInstance(
        teams=_teams(data),
        matches=tuple(tuple(m) for m in matches),
        points_per_rank=tuple(points),
        focus=_require(data, "focus", str),
        break_threshold=threshold,
    )


def dump_tournament(state: TournamentState) -> str:
    return canonical_json(
        {
            "format": TOURNAMENT_FORMAT,
            "focus": state.focus,
            "rounds_left": state.rounds_left,
            "break_threshold": state.break_threshold,
            "teams": [{"id": t, "score": s} for t, s in state.teams],
        }
    )


def load_tournament(text: str) -> TournamentState:
    data = _parse(text)
    if data.get("format") != TOURNAMENT_FORMAT:
        raise FormatError(f"expected format {TOURNAMENT_FORMAT!r}, got {data.get('format')!r}")
    return TournamentState(
        teams=_teams(data),
        rounds_left=_require(data, "rounds_left", int),
        break_threshold=_require(data, "break_threshold", int),
        focus=_require(data, "focus", str),
    )


def _game(entry: Any) -> tuple[list[str], list[str]]:
    if not isinstance(entry, dict):
        raise FormatError("witness entries must be objects")
    match = _require(entry, "match", list)
    ranking = _require(entry, "ranking", list)
    if not all(isinstance(t, str) for t in match + ranking):
        raise FormatError("team ids must be strings")
    if sorted(match) != sorted(ranking):
        raise FormatError(f"ranking {ranking} does not match its teams {match}")
    return match, ranking


def dump_league_witness(inst: LeagueInstance, outcomes: Sequence[MatchOutcome]) -> str:
    entries = [
        {"match": list(inst.matches[o.match_index]), "ranking": list(o.ranking)}
        for o in sorted(outcomes, key=lambda o: o.match_index)
    ]
    return canonical_json({"format": WITNESS_FORMAT, "matches": entries})


def load_league_witness(inst: LeagueInstance, text: str) -> list[MatchOutcome]:
    data = _parse(text)
    if data.get("format") != WITNESS_FORMAT or "matches" not in data:
        raise FormatError("expected a debelim-witness/1 league witness")
    index = {frozenset(m): i for i, m in enumerate(inst.matches)}
    outcomes = []
    for entry in _require(data, "matches", list):
        match, ranking = _game(entry)
        key = frozenset(match)
        if key not in index:
            raise FormatError(f"witness names a match that is not scheduled: {match}")
        outcomes.append(MatchOutcome(index[key], tuple(ranking)))
    return outcomes


def dump_trajectory(state: TournamentState, trajectory: Trajectory) -> str:
    """Serialise a trajectory; each game also records its seating (the pairing order)."""
    rounds = []
    for games in trajectory.rounds:
        seating = {frozenset(g): g for g in pair_round(state.ranking()).games}
        rounds.append(
            [
                {"match": list(seating[frozenset(o.ranking)]), "ranking": list(o.ranking)}
                for o in games
            ]
        )
        state = play_round(state, games)
    return canonical_json({"format": WITNESS_FORMAT, "rounds": rounds})


def load_trajectory(text: str) -> Trajectory:
    data = _parse(text)
    if data.get("format") != WITNESS_FORMAT or "rounds" not in data:
        raise FormatError("expected a debelim-witness/1 trajectory")
    rounds = []
    for games in _require(data, "rounds", list):
        if not isinstance(games, list):
            raise FormatError("each round must be a list of games")
        rounds.append(
            tuple(MatchOutcome(i, tuple(_game(entry)[1])) for i, entry in enumerate(games))
        )
    return Trajectory(tuple(rounds))
