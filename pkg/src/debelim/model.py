"""Core instance types shared by the league and tournament solvers.

Everything here is immutable; operations are pure functions over the
dataclasses below.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

TeamId = str

BP_POINTS = (3, 2, 1, 0)
THREE_TEAM_POINTS = (2, 1, 0)


class InvalidInstance(ValueError):
    """Raised when an instance fails validation and a solver is asked to run on it."""

    def __init__(self, violations: Sequence[str]):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class InvalidOutcome(ValueError):
    """Raised for outcomes that reference unknown matches or are not permutations."""


@dataclass(frozen=True)
class LeagueInstance:
    """A fixed-schedule league: teams with scores, remaining matches, a focus team.

    ``break_threshold`` generalises the winning condition: the focus team
    succeeds when at most ``break_threshold - 1`` teams finish strictly above
    it. The default of 1 is the plain "can still win" question.
    """

    teams: tuple[tuple[TeamId, int], ...]
    matches: tuple[tuple[TeamId, ...], ...]
    points_per_rank: tuple[int, ...]
    focus: TeamId
    break_threshold: int = 1

    def __post_init__(self):
        object.__setattr__(self, "teams", tuple((str(t), int(s)) for t, s in self.teams))
        object.__setattr__(self, "matches", tuple(tuple(m) for m in self.matches))
        object.__setattr__(self, "points_per_rank", tuple(int(p) for p in self.points_per_rank))

    @property
    def team_ids(self) -> tuple[TeamId, ...]:
        return tuple(t for t, _ in self.teams)

    @property
    def scores(self) -> dict[TeamId, int]:
        return dict(self.teams)

    @property
    def teams_per_match(self) -> int:
        return len(self.points_per_rank)

    def matches_of(self, team: TeamId) -> list[int]:
        return [i for i, m in enumerate(self.matches) if team in m]

    def focus_final_score(self) -> int:
        """Focus score after it wins every one of its remaining matches."""
        wins = len(self.matches_of(self.focus))
        return self.scores[self.focus] + wins * self.points_per_rank[0]


@dataclass(frozen=True)
class MatchOutcome:
    match_index: int
    ranking: tuple[TeamId, ...]

    def __post_init__(self):
        object.__setattr__(self, "ranking", tuple(self.ranking))


@dataclass(frozen=True)
class TournamentState:
    """Swiss-style tournament snapshot. ``teams`` order is the tie-break order."""

    teams: tuple[tuple[TeamId, int], ...]
    rounds_left: int
    break_threshold: int
    focus: TeamId

    def __post_init__(self):
        object.__setattr__(self, "teams", tuple((str(t), int(s)) for t, s in self.teams))

    @property
    def n(self) -> int:
        return len(self.teams)

    @property
    def team_ids(self) -> tuple[TeamId, ...]:
        return tuple(t for t, _ in self.teams)

    @property
    def scores(self) -> dict[TeamId, int]:
        return dict(self.teams)

    def ranking(self) -> list[TeamId]:
        return rank(self.scores, self.team_ids, self.focus)

    def with_scores(self, scores: Mapping[TeamId, int], rounds_left: int | None = None) -> TournamentState:
        return TournamentState(
            teams=tuple((t, scores[t]) for t in self.team_ids),
            rounds_left=self.rounds_left if rounds_left is None else rounds_left,
            break_threshold=self.break_threshold,
            focus=self.focus,
        )


@dataclass(frozen=True)
class Trajectory:
    """Witness for a tournament: for every played round, the ranked games."""

    rounds: tuple[tuple[MatchOutcome, ...], ...] = field(default_factory=tuple)


def validate_league(instance: LeagueInstance) -> list[str]:
    """Return the list of violations; an empty list means the instance is valid."""
    violations = []
    ids = instance.team_ids
    known = set(ids)
    for team, count in Counter(ids).items():
        if count > 1:
            violations.append(f"duplicate team id {team!r}")
    if any(not t for t in ids):
        violations.append("empty team id")
    for team, score in instance.teams:
        if score < 0:
            violations.append(f"negative score for {team!r}")
    ppr = instance.points_per_rank
    if len(ppr) not in (3, 4):
        violations.append(f"points_per_rank must have 3 or 4 entries, got {len(ppr)}")
    if any(a <= b for a, b in zip(ppr, ppr[1:])):
        violations.append("points_per_rank must be strictly descending")
    if instance.focus not in known:
        violations.append(f"focus missing: {instance.focus!r}")
    if instance.break_threshold < 1:
        violations.append("break_threshold must be >= 1")
    seen = {}
    for i, match in enumerate(instance.matches):
        if len(match) != len(ppr):
            violations.append(f"wrong team count in match {i}: {len(match)} (expected {len(ppr)})")
        if len(set(match)) != len(match):
            violations.append(f"duplicate team in match {i}")
        for team in match:
            if team not in known:
                violations.append(f"unknown team {team!r} in match {i}")
        key = frozenset(match)
        if key in seen:
            violations.append(f"duplicate match {i} (same teams as match {seen[key]})")
        else:
            seen[key] = i
    return violations


def check_league(instance: LeagueInstance) -> None:
    violations = validate_league(instance)
    if violations:
        raise InvalidInstance(violations)


def _check_outcome(instance: LeagueInstance, outcome: MatchOutcome) -> None:
    if not 0 <= outcome.match_index < len(instance.matches):
        raise InvalidOutcome(f"unknown match index {outcome.match_index}")
    match = instance.matches[outcome.match_index]
    if len(outcome.ranking) != len(match) or set(outcome.ranking) != set(match):
        raise InvalidOutcome(
            f"ranking {list(outcome.ranking)} is not a permutation of match {outcome.match_index}"
        )


def apply_outcomes(instance: LeagueInstance, outcomes: Iterable[MatchOutcome]) -> dict[TeamId, int]:
    """Final scores after playing ``outcomes``; teams not involved keep their score."""
    scores = instance.scores
    played = set()
    for outcome in outcomes:
        _check_outcome(instance, outcome)
        if outcome.match_index in played:
            raise InvalidOutcome(f"match {outcome.match_index} has more than one outcome")
        played.add(outcome.match_index)
        for team, pts in zip(outcome.ranking, instance.points_per_rank):
            scores[team] += pts
    return scores


def rank(scores: Mapping[TeamId, int], tie_break: Sequence[TeamId], focus: TeamId) -> list[TeamId]:
    """Order teams best first.

    Higher score wins; among equal scores the focus team comes first and the
    rest follow ``tie_break`` order.
    """
    position = {t: i for i, t in enumerate(tie_break)}
    return sorted(tie_break, key=lambda t: (-scores[t], t != focus, position[t]))


def teams_above(scores: Mapping[TeamId, int], focus: TeamId) -> int:
    f = scores[focus]
    return sum(1 for s in scores.values() if s > f)


def verify_witness(
    instance: LeagueInstance, outcomes: Sequence[MatchOutcome], break_threshold: int | None = None
) -> bool:
    """True iff ``outcomes`` decide every match once and the focus team makes it.

    "Makes it" means fewer than ``break_threshold`` teams end strictly above
    the focus (default: the instance's own threshold).
    """
    b = instance.break_threshold if break_threshold is None else break_threshold
    indices = [o.match_index for o in outcomes]
    if sorted(indices) != list(range(len(instance.matches))):
        return False
    scores = apply_outcomes(instance, outcomes)
    return teams_above(scores, instance.focus) < b


DEFAULT_CAP = 10**8


class EnumerationCapExceeded(RuntimeError):
    """The requested search would visit more outcome nodes than allowed."""
