"""Swiss-style debating tournaments: pairing, replay and three break deciders.

Every round the current ranking is cut into consecutive groups of four and
each group plays one game worth 3/2/1/0 points. The question is whether the
focus team can end the remaining rounds with fewer than ``b`` teams strictly
above it (ties always go to the focus team).

``brute``
    Enumerates every outcome of every game in every round. The oracle.
``fpt``
    Keeps only the top ``min(n, 4**l * b)`` teams with ``l`` rounds to go:
    nobody ranked lower can climb into the prefix that matters later.
``dp``
    Works on equivalence classes (focus score plus a histogram of scores),
    after collapsing scores that are out of reach in either direction.
"""

from __future__ import annotations

import itertools
import math
import random
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal, Sequence

import numpy as np

from .model import (
    BP_POINTS,
    DEFAULT_CAP,
    EnumerationCapExceeded,
    InvalidInstance,
    MatchOutcome,
    TeamId,
    TournamentState,
    Trajectory,
)

Algo = Literal["brute", "fpt", "dp"]

GAME_SIZE = 4
MAX_GAIN = BP_POINTS[0]
# every way to hand out 3/2/1/0 to the four seats of a game
SEAT_AWARDS: tuple[tuple[int, ...], ...] = tuple(itertools.permutations(BP_POINTS))


class InvalidState(InvalidInstance):
    pass


@dataclass(frozen=True)
class PairedRound:
    games: tuple[tuple[TeamId, ...], ...]


@dataclass(frozen=True)
class EquivClass:
    """Focus score plus how many teams (focus included) hold each score."""

    focus_score: int
    counts: tuple[tuple[int, int], ...]  # (score, count), score descending

    @classmethod
    def from_scores(cls, focus_score: int, scores: Sequence[int]) -> EquivClass:
        hist = Counter(scores)
        return cls(focus_score, tuple(sorted(hist.items(), reverse=True)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.counts)

    @property
    def n(self) -> int:
        return sum(c for _, c in self.counts)

    def seeded_scores(self) -> list[tuple[int, bool]]:
        """Rank-ordered ``(score, is_focus)`` pairs of a representative state."""
        seq = []
        for value, count in self.counts:
            if value == self.focus_score:
                seq.append((value, True))
                count -= 1
            seq.extend([(value, False)] * count)
        return seq


@dataclass(frozen=True)
class TournamentDecision:
    breakable: bool
    witness: Trajectory | None = None
    algo: str = ""


def validate_tournament(state: TournamentState) -> list[str]:
    problems = []
    ids = state.team_ids
    if state.n == 0 or state.n % GAME_SIZE:
        problems.append(f"number of teams must be a positive multiple of 4, got {state.n}")
    if len(set(ids)) != len(ids):
        problems.append("duplicate team id")
    if any(not t for t in ids):
        problems.append("empty team id")
    if any(s < 0 for _, s in state.teams):
        problems.append("negative score")
    if state.focus not in ids:
        problems.append(f"focus missing: {state.focus!r}")
    if state.rounds_left < 0:
        problems.append("rounds_left must be >= 0")
    if not 1 <= state.break_threshold <= max(state.n, 1):
        problems.append(f"break_threshold must be in [1, n], got {state.break_threshold}")
    return problems


def check_tournament(state: TournamentState) -> None:
    problems = validate_tournament(state)
    if problems:
        raise InvalidState(problems)


def pair_round(ranking: Sequence[TeamId]) -> PairedRound:
    """Group a ranking into games of four, best teams together."""
    if len(ranking) % GAME_SIZE:
        raise ValueError(f"cannot pair {len(ranking)} teams into games of four")
    ranking = tuple(ranking)
    return PairedRound(tuple(ranking[i : i + GAME_SIZE] for i in range(0, len(ranking), GAME_SIZE)))


def play_round(state: TournamentState, games: Sequence[MatchOutcome]) -> TournamentState:
    """Apply one round. ``games`` may omit some pairings; those finish in seed order.

    Raises ``ValueError`` if a listed game is not one of this round's pairings.
    """
    if state.rounds_left < 1:
        raise ValueError("no rounds left to play")
    paired = pair_round(state.ranking()).games
    by_set = {frozenset(g): g for g in paired}
    outcome_for: dict[frozenset, tuple[TeamId, ...]] = {}
    for game in games:
        key = frozenset(game.ranking)
        if key not in by_set or len(game.ranking) != GAME_SIZE:
            raise ValueError(f"{list(game.ranking)} is not a game of this round")
        if key in outcome_for:
            raise ValueError(f"game {sorted(key)} listed twice")
        outcome_for[key] = game.ranking
    scores = state.scores
    for seeded in paired:
        for team, pts in zip(outcome_for.get(frozenset(seeded), seeded), BP_POINTS):
            scores[team] += pts
    return state.with_scores(scores, state.rounds_left - 1)


def replay(state: TournamentState, trajectory: Trajectory) -> TournamentState:
    for games in trajectory.rounds:
        state = play_round(state, games)
    return state


def verify_trajectory(state: TournamentState, trajectory: Trajectory) -> bool:
    """True iff the trajectory plays every remaining round and the focus team breaks."""
    if len(trajectory.rounds) != state.rounds_left:
        return False
    try:
        final = replay(state, trajectory)
    except ValueError:
        return False
    f = final.scores[state.focus]
    return sum(1 for _, s in final.teams if s > f) < state.break_threshold


def simulate_round(
    state: TournamentState, rng: random.Random
) -> tuple[TournamentState, tuple[MatchOutcome, ...]]:
    """Play one round with uniformly random game outcomes."""
    games = []
    for i, seeded in enumerate(pair_round(state.ranking()).games):
        order = list(seeded)
        rng.shuffle(order)
        games.append(MatchOutcome(i, tuple(order)))
    return play_round(state, games), tuple(games)


def prune_prefix(state: TournamentState) -> list[TeamId] | None:
    """The best ``min(n, 4**k * b)`` teams, or ``None`` if the focus is not among them.

    A team outside that prefix can never finish in the top ``b``, so ``None``
    means the focus team cannot break.
    """
    k, b = state.rounds_left, state.break_threshold
    size = min(state.n, 4**k * b)
    scores = state.scores
    above = [t for t in state.team_ids if scores[t] > scores[state.focus]]
    if len(above) >= size:
        return None
    return state.ranking()[:size]


def solve_tournament(
    state: TournamentState, algo: Algo = "dp", cap: int | None = DEFAULT_CAP
) -> TournamentDecision:
    """Decide whether the focus team can still break.

    ``brute`` and ``fpt`` return a witness trajectory when the answer is yes;
    the ``fpt`` witness lists only the games inside the tracked prefix (other
    games may finish any way). ``dp`` returns no witness.

    Raises:
        InvalidState: the state does not validate.
        EnumerationCapExceeded: ``brute``/``fpt`` would enumerate more than
            ``cap`` round outcomes.
    """
    check_tournament(state)
    if algo == "brute":
        return _Enumerator(state, cap, prefix_only=False).solve()
    if algo == "fpt":
        return _Enumerator(state, cap, prefix_only=True).solve()
    if algo == "dp":
        return _solve_dp(state)
    raise ValueError(f"unknown algorithm {algo!r}")


@lru_cache(maxsize=None)
def _award_table(games: int) -> np.ndarray:
    """Row r lists the points of every seat for the r-th joint outcome of ``games`` games."""
    if games == 0:
        return np.zeros((1, 0), dtype=np.int16)
    single = np.array(SEAT_AWARDS, dtype=np.int16)
    table = single
    for _ in range(games - 1):
        left = np.repeat(table, len(single), axis=0)
        right = np.tile(single, (len(table), 1))
        table = np.concatenate([left, right], axis=1)
    return table


def _row_to_games(row: int, games: int) -> list[tuple[int, ...]]:
    """Seat awards per game for a row of :func:`_award_table`."""
    digits = []
    for _ in range(games):
        row, d = divmod(row, len(SEAT_AWARDS))
        digits.append(d)
    return [SEAT_AWARDS[d] for d in reversed(digits)]


class _Enumerator:
    """Exhaustive round-by-round search, optionally restricted to the live prefix.

    Scores live in a numpy vector indexed by tie-break position, so sorting
    by ``(-score, not focus, index)`` reproduces :func:`debelim.model.rank`.
    """

    def __init__(self, state: TournamentState, cap: int | None, prefix_only: bool):
        self.state = state
        self.prefix_only = prefix_only
        self.ids = state.team_ids
        self.focus = self.ids.index(state.focus)
        self.b = state.break_threshold
        k = state.rounds_left
        if prefix_only:
            bound = math.prod(
                len(SEAT_AWARDS) ** (min(state.n, 4**l * self.b) // GAME_SIZE) for l in range(1, k + 1)
            )
        else:
            bound = len(SEAT_AWARDS) ** (state.n // GAME_SIZE * k)
        if cap is not None and bound > cap:
            raise EnumerationCapExceeded(f"{bound} joint round outcomes exceed the cap of {cap}")
        self.path: list[list[MatchOutcome]] = []

    def _order(self, scores: np.ndarray, members: np.ndarray) -> np.ndarray:
        sub = scores[members]
        not_focus = members != self.focus
        return members[np.lexsort((members, not_focus, -sub))]

    def solve(self) -> TournamentDecision:
        scores = np.array([s for _, s in self.state.teams], dtype=np.int64)
        members = np.arange(len(self.ids))
        name = "fpt" if self.prefix_only else "brute"
        if self._rec(scores, members, self.state.rounds_left):
            rounds = tuple(tuple(games) for games in reversed(self.path))
            return TournamentDecision(True, Trajectory(rounds), name)
        return TournamentDecision(False, None, name)

    def _games(self, order: np.ndarray, awards: Sequence[tuple[int, ...]]) -> list[MatchOutcome]:
        games = []
        for g, seat_pts in enumerate(awards):
            seats = order[g * GAME_SIZE : (g + 1) * GAME_SIZE]
            finish = sorted(range(GAME_SIZE), key=lambda s: -seat_pts[s])
            games.append(MatchOutcome(g, tuple(self.ids[seats[s]] for s in finish)))
        return games

    def _rec(self, scores: np.ndarray, members: np.ndarray, rounds: int) -> bool:
        order = self._order(scores, members)
        if self.prefix_only:
            size = min(len(order), 4**rounds * self.b)
            if self.focus not in order[:size]:
                return False
            order = order[:size]
            members = order
        if rounds == 0:
            return int(np.sum(scores[members] > scores[self.focus])) < self.b

        games = len(order) // GAME_SIZE
        table = _award_table(games)
        if rounds == 1:
            final = scores[order][None, :] + table
            focus_col = int(np.nonzero(order == self.focus)[0][0])
            above = np.sum(final > final[:, focus_col : focus_col + 1], axis=1)
            hits = np.nonzero(above < self.b)[0]
            if len(hits) == 0:
                return False
            self.path.append(self._games(order, _row_to_games(int(hits[0]), games)))
            return True

        for row in range(len(table)):
            nxt = scores.copy()
            nxt[order] += table[row]
            if self._rec(nxt, members, rounds - 1):
                self.path.append(self._games(order, _row_to_games(row, games)))
                return True
        return False


# -- equivalence-class dynamic program ------------------------------------


def _collapse(value: int, focus_score: int, rounds: int) -> int:
    if value > focus_score + MAX_GAIN * rounds:
        return focus_score + MAX_GAIN * rounds + 1
    if value < focus_score - MAX_GAIN * rounds:
        return 0
    return value


def canonicalize(state: TournamentState) -> TournamentState:
    """Collapse scores the focus team can no longer interact with.

    With ``k`` rounds left, scores above ``s_focus + 3k`` become
    ``s_focus + 3k + 1`` and scores below ``s_focus - 3k`` become 0. The
    answer to the break question does not change.
    """
    f = state.scores[state.focus]
    k = state.rounds_left
    return state.with_scores({t: _collapse(s, f, k) for t, s in state.teams})


def class_of(state: TournamentState) -> EquivClass:
    scores = state.scores
    return EquivClass.from_scores(scores[state.focus], list(scores.values()))


def canonical_class(c: EquivClass, rounds: int) -> EquivClass:
    values = []
    for v, count in c.counts:
        values += [_collapse(v, c.focus_score, rounds)] * count
    return EquivClass.from_scores(c.focus_score, values)


@lru_cache(maxsize=None)
def _game_results(seat_scores: tuple[int, ...]) -> frozenset[tuple[int, ...]]:
    """Distinct sorted score multisets a non-focus game can end in."""
    return frozenset(
        tuple(sorted(s + a for s, a in zip(seat_scores, awards))) for awards in SEAT_AWARDS
    )


@lru_cache(maxsize=None)
def _focus_game_results(seat_scores: tuple[int, ...], focus_seat: int) -> frozenset:
    """Distinct ``(focus score, sorted other scores)`` outcomes of the focus team's game."""
    out = set()
    for awards in SEAT_AWARDS:
        new = [s + a for s, a in zip(seat_scores, awards)]
        others = tuple(sorted(v for i, v in enumerate(new) if i != focus_seat))
        out.add((new[focus_seat], others))
    return frozenset(out)


def _split_games(c: EquivClass) -> tuple[tuple[tuple[int, ...], int], list[tuple[int, ...]]]:
    seq = c.seeded_scores()
    focus_game, focus_seat, others = None, None, []
    for g in range(0, len(seq), GAME_SIZE):
        chunk = seq[g : g + GAME_SIZE]
        values = tuple(v for v, _ in chunk)
        flags = [is_f for _, is_f in chunk]
        if any(flags):
            focus_game, focus_seat = values, flags.index(True)
        else:
            others.append(values)
    return (focus_game, focus_seat), others


def _successor_multisets(
    c: EquivClass, collapse_rounds: int | None
) -> dict[int, set[tuple[int, ...]]]:
    """focus score after the round -> reachable sorted multisets of the other teams.

    When ``collapse_rounds`` is given, every partial result is collapsed
    relative to the new focus score as it is built, which keeps the sets small.
    """
    (focus_game, focus_seat), others = _split_games(c)
    by_type = Counter(others)
    out: dict[int, set[tuple[int, ...]]] = {}
    for focus_new, mates in sorted(_focus_game_results(focus_game, focus_seat)):
        if collapse_rounds is None:
            norm = lambda vals: vals  # noqa: E731
        else:
            norm = lambda vals, f=focus_new: tuple(  # noqa: E731
                sorted(_collapse(v, f, collapse_rounds) for v in vals)
            )
        partial = {norm(mates)}
        for game_type, count in sorted(by_type.items()):
            results = {norm(r) for r in _game_results(game_type)}
            for _ in range(count):
                partial = {tuple(sorted(p + r)) for p in partial for r in results}
        out.setdefault(focus_new, set()).update(partial)
    return out


def dp_transition(rounds: int, c: EquivClass, n: int) -> set[EquivClass]:
    """Every class reachable from ``c`` by playing one round.

    The representative state lists teams by score with the focus team first
    among equals. Games other than the focus team's are grouped by their
    score multiset, so identical games are only expanded once.
    """
    if rounds < 1:
        raise ValueError("no round left to play")
    if c.n != n or n % GAME_SIZE:
        raise ValueError(f"class holds {c.n} teams, expected a multiple of 4 equal to {n}")
    successors = set()
    for focus_new, multisets in _successor_multisets(c, None).items():
        for others in multisets:
            successors.add(EquivClass.from_scores(focus_new, (focus_new, *others)))
    return successors


def _last_round_ok(c: EquivClass, b: int) -> bool:
    """Exact answer with one round left: games are independent once the focus game is fixed."""
    (focus_game, focus_seat), others = _split_games(c)
    by_type = Counter(others)
    for focus_new, mates in _focus_game_results(focus_game, focus_seat):
        above = sum(1 for v in mates if v > focus_new)
        for game_type, count in by_type.items():
            best = min(sum(1 for v in r if v > focus_new) for r in _game_results(game_type))
            above += best * count
            if above >= b:
                break
        if above < b:
            return True
    return False


def _solve_dp(state: TournamentState) -> TournamentDecision:
    if prune_prefix(state) is None:
        return TournamentDecision(False, None, "dp")
    b = state.break_threshold
    memo: dict[tuple[int, EquivClass], bool] = {}

    def cell(rounds: int, c: EquivClass) -> bool:
        key = (rounds, c)
        if key in memo:
            return memo[key]
        if rounds == 0:
            result = sum(count for v, count in c.counts if v > c.focus_score) < b
        elif rounds == 1:
            result = _last_round_ok(c, b)
        else:
            result = False
            for focus_new, multisets in _successor_multisets(c, rounds - 1).items():
                for others in multisets:
                    nxt = EquivClass.from_scores(focus_new, (focus_new, *others))
                    if cell(rounds - 1, nxt):
                        result = True
                        break
                if result:
                    break
        memo[key] = result
        return result

    start = canonical_class(class_of(state), state.rounds_left)
    return TournamentDecision(cell(state.rounds_left, start), None, "dp")


def dp_table_size(state: TournamentState) -> int:
    """Number of reachable DP cells from ``state`` (diagnostics only)."""
    seen = set()
    frontier = {canonical_class(class_of(state), state.rounds_left)}
    for rounds in range(state.rounds_left, 0, -1):
        seen |= {(rounds, c) for c in frontier}
        nxt = set()
        for c in frontier:
            for f, multisets in _successor_multisets(c, rounds - 1).items():
                nxt |= {EquivClass.from_scores(f, (f, *o)) for o in multisets}
        frontier = nxt
    return len(seen) + len(frontier)

