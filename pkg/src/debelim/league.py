"""Exact decision procedure for fixed-schedule debating leagues.

Two strategies answer the same question:

* ``exhaustive`` enumerates every ranking of every match on the original
  instance. It is the oracle and is only practical for a handful of matches.
* ``pruned`` first lets the focus team win all of its matches, turns the
  remaining scores into per-team budgets and runs a backtracking search that
  always branches on the most constrained match.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Literal

from .model import (
    DEFAULT_CAP,
    EnumerationCapExceeded,
    LeagueInstance,
    MatchOutcome,
    TeamId,
    check_league,
    verify_witness,
)

Strategy = Literal["pruned", "exhaustive"]

_UNBOUNDED = math.inf


@dataclass(frozen=True)
class Decision:
    winnable: bool
    witness: tuple[MatchOutcome, ...] | None = None
    nodes: int = 0


@dataclass(frozen=True)
class Contest:
    """A match after the focus team has been placed first in it (if it plays).

    ``awards`` are the points still to hand out to ``teams``, best first.
    """

    match_index: int
    teams: tuple[TeamId, ...]
    awards: tuple[int, ...]
    focus_first: bool = False

    def outcome(self, ranking: tuple[TeamId, ...], focus: TeamId) -> MatchOutcome:
        full = (focus,) + ranking if self.focus_first else ranking
        return MatchOutcome(self.match_index, full)


@dataclass(frozen=True)
class ReducedLeague:
    """The league with the focus team's matches resolved in its favour."""

    source: LeagueInstance
    contests: tuple[Contest, ...]
    focus_final: int


def normalize_focus_wins(instance: LeagueInstance) -> tuple[ReducedLeague, dict[TeamId, int]]:
    """Let the focus team win every remaining match and compute budgets.

    The budget of a team is how many more points it may collect without
    finishing above the focus team's final score. Negative budgets are kept;
    they mark a team that is already out of reach.
    """
    focus = instance.focus
    ppr = instance.points_per_rank
    focus_final = instance.focus_final_score()
    contests = []
    for i, match in enumerate(instance.matches):
        if focus in match:
            others = tuple(t for t in match if t != focus)
            contests.append(Contest(i, others, ppr[1:], focus_first=True))
        else:
            contests.append(Contest(i, tuple(match), ppr))
    budgets = {t: focus_final - s for t, s in instance.teams if t != focus}
    return ReducedLeague(instance, tuple(contests), focus_final), budgets


def solve_league(
    instance: LeagueInstance,
    strategy: Strategy = "pruned",
    cap: int | None = DEFAULT_CAP,
) -> Decision:
    """Decide whether the focus team can still finish within the break threshold.

    Raises:
        InvalidInstance: the instance does not validate.
        EnumerationCapExceeded: the search would visit more than ``cap`` nodes.
    """
    check_league(instance)
    if strategy == "exhaustive":
        decision = _solve_exhaustive(instance, cap)
    elif strategy == "pruned":
        decision = _PrunedSearch(instance, cap).run()
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if decision.witness is not None:
        assert verify_witness(instance, decision.witness)
    return decision


def _solve_exhaustive(instance: LeagueInstance, cap: int | None) -> Decision:
    p = instance.teams_per_match
    total = math.factorial(p) ** len(instance.matches)
    if cap is not None and total > cap:
        raise EnumerationCapExceeded(f"exhaustive search needs {total} leaves, cap is {cap}")

    ids = instance.team_ids
    index = {t: i for i, t in enumerate(ids)}
    focus = index[instance.focus]
    allowed = instance.break_threshold - 1
    ppr = instance.points_per_rank
    per_match = [
        [tuple(index[t] for t in perm) for perm in itertools.permutations(m)] for m in instance.matches
    ]
    scores = [s for _, s in instance.teams]
    chosen: list[tuple[int, ...]] = []
    visited = 0

    def leaf_ok() -> bool:
        f = scores[focus]
        return sum(1 for s in scores if s > f) <= allowed

    def rec(depth: int) -> bool:
        nonlocal visited
        visited += 1
        if depth == len(per_match):
            return leaf_ok()
        for perm in per_match[depth]:
            for t, pts in zip(perm, ppr):
                scores[t] += pts
            chosen.append(perm)
            if rec(depth + 1):
                return True
            chosen.pop()
            for t, pts in zip(perm, ppr):
                scores[t] -= pts
        return False

    if rec(0):
        witness = tuple(
            MatchOutcome(i, tuple(ids[t] for t in perm)) for i, perm in enumerate(chosen)
        )
        return Decision(True, witness, visited)
    return Decision(False, None, visited)


class _PrunedSearch:
    """Budget-driven backtracking over the reduced contests.

    Teams are indexed; ``budget[t]`` is the remaining slack of team ``t`` and
    becomes unbounded once the team is allowed to finish above the focus
    (only possible when the break threshold exceeds 1).
    """

    def __init__(self, instance: LeagueInstance, cap: int | None):
        self.instance = instance
        self.cap = cap
        reduced, budgets = normalize_focus_wins(instance)
        self.reduced = reduced
        self.ids = [t for t in instance.team_ids if t != instance.focus]
        index = {t: i for i, t in enumerate(self.ids)}
        self.contests = [
            (tuple(index[t] for t in c.teams), c.awards) for c in reduced.contests
        ]
        self.budget = [budgets[t] for t in self.ids]
        self.allowed = instance.break_threshold - 1
        self.nodes = 0
        self.failed: set = set()
        self.option_cache: dict = {}
        self.chosen: dict[int, tuple[int, ...]] = {}

    def run(self) -> Decision:
        over = 0
        for t, b in enumerate(self.budget):
            if b < 0:
                over += 1
                self.budget[t] = _UNBOUNDED
        if over > self.allowed:
            return Decision(False, None, 0)
        remaining = frozenset(range(len(self.contests)))
        if not self._search(remaining, over):
            return Decision(False, None, self.nodes)
        focus = self.instance.focus
        witness = []
        for ci, contest in enumerate(self.reduced.contests):
            perm = self.chosen[ci]
            witness.append(contest.outcome(tuple(self.ids[t] for t in perm), focus))
        return Decision(True, tuple(witness), self.nodes)

    def _options(self, ci: int, over: int) -> list[tuple[tuple[int, ...], int]]:
        """Rankings of contest ``ci`` that keep the search alive, best first."""
        teams, awards = self.contests[ci]
        spare = self.allowed - over
        key = (ci, spare, tuple(self.budget[t] for t in teams))
        cached = self.option_cache.get(key)
        if cached is None:
            cached = self.option_cache[key] = self._compute_options(teams, awards, spare)
        return cached

    def _compute_options(self, teams, awards, spare) -> list[tuple[tuple[int, ...], int]]:
        budget = self.budget
        options = []
        for perm in itertools.permutations(teams):
            new_over = 0
            score = 0
            for t, a in zip(perm, awards):
                if a > budget[t]:
                    new_over += 1
                else:
                    score += a * budget[t] if budget[t] != _UNBOUNDED else 0
            if new_over <= spare:
                options.append((perm, new_over, score))
        # fewest new overshoots first, then high awards to high budgets
        options.sort(key=lambda o: (o[1], -o[2]))
        return [(perm, n) for perm, n, _ in options]

    def _key(self, remaining: frozenset, over: int):
        involved = sorted({t for ci in remaining for t in self.contests[ci][0]})
        return remaining, over, tuple(self.budget[t] for t in involved)

    def _search(self, remaining: frozenset, over: int) -> bool:
        self.nodes += 1
        if self.cap is not None and self.nodes > self.cap:
            raise EnumerationCapExceeded(f"pruned search exceeded {self.cap} nodes")
        if not remaining:
            return True
        key = self._key(remaining, over)
        if key in self.failed:
            return False

        # most constrained contest first; ties go to the one with the least slack
        best_ci, best_opts, best_rank = None, None, None
        for ci in sorted(remaining):
            opts = self._options(ci, over)
            rank = (len(opts), min(self.budget[t] for t in self.contests[ci][0]))
            if best_rank is None or rank < best_rank:
                best_ci, best_opts, best_rank = ci, opts, rank
                if not opts:
                    break
        if not best_opts:
            self.failed.add(key)
            return False

        teams, awards = self.contests[best_ci]
        rest = remaining - {best_ci}
        for perm, new_over in best_opts:
            saved = [self.budget[t] for t in perm]
            for t, a in zip(perm, awards):
                self.budget[t] = _UNBOUNDED if a > self.budget[t] else self.budget[t] - a
            self.chosen[best_ci] = perm
            found = self._search(rest, over + new_over)
            for t, b in zip(perm, saved):
                self.budget[t] = b
            if found:
                return True
        del self.chosen[best_ci]
        self.failed.add(key)
        return False
