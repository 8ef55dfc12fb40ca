import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from debelim.cnf import CnfFormula
from debelim.league import normalize_focus_wins, solve_league
from debelim.model import (
    BP_POINTS,
    THREE_TEAM_POINTS,
    EnumerationCapExceeded,
    InvalidInstance,
    LeagueInstance,
    MatchOutcome,
    apply_outcomes,
    verify_witness,
)
from debelim.reduction import build_three_team
from strategies import leagues


def league(scores, matches=(), points=THREE_TEAM_POINTS, threshold=1):
    return LeagueInstance(tuple(scores.items()), tuple(matches), points, "t1", threshold)


def oracle(inst):
    """Plain enumeration of every ranking combination."""
    per_match = [itertools.permutations(m) for m in inst.matches]
    for combo in itertools.product(*per_match):
        final = apply_outcomes(inst, [MatchOutcome(i, r) for i, r in enumerate(combo)])
        if sum(1 for s in final.values() if s > final["t1"]) < inst.break_threshold:
            return True
    return False


def reduced_oracle(reduced, budgets, b):
    """Enumerate the contests left after the focus wins its games."""
    per_contest = [
        [dict(zip(c.teams, perm)) for perm in itertools.permutations(c.awards)]
        for c in reduced.contests
    ]
    for combo in itertools.product(*per_contest):
        gained = dict.fromkeys(budgets, 0)
        for awards in combo:
            for t, p in awards.items():
                gained[t] += p
        if sum(1 for t in budgets if gained[t] > budgets[t]) < b:
            return True
    return False


def with_focus_score(inst, delta):
    return LeagueInstance(
        tuple((t, s + delta if t == inst.focus else s) for t, s in inst.teams),
        inst.matches,
        inst.points_per_rank,
        inst.focus,
        inst.break_threshold,
    )


class TestExamples:
    def test_no_matches_ties_allowed(self):
        assert solve_league(league({"t1": 1, "a": 0, "b": 1})).winnable

    def test_single_match_overflows(self):
        inst = league({"t1": 2, "a": 1, "b": 2, "c": 2}, [("a", "b", "c")])
        assert oracle(inst) is False
        for strategy in ("pruned", "exhaustive"):
            assert solve_league(inst, strategy).winnable is False

    def test_small_gadget_instance(self):
        inst, _ = build_three_team(CnfFormula(2, ((1, 2), (-1, -2))))
        assert len(inst.matches) == 18
        decision = solve_league(inst)
        assert decision.winnable
        assert verify_witness(inst, decision.witness)

    def test_unreachable_idle_team(self):
        inst = league({"t1": 0, "a": 0, "b": 0, "c": 0, "d": 10}, [("t1", "a", "b", "c")], BP_POINTS)
        reduced, budgets = normalize_focus_wins(inst)
        assert reduced.focus_final == 3 and budgets["d"] == -7
        assert not solve_league(inst).winnable
        assert solve_league(league(inst.scores, inst.matches, BP_POINTS, threshold=2)).winnable

    def test_invalid_instance_raises(self):
        with pytest.raises(InvalidInstance):
            solve_league(league({"t1": 0, "a": 0}, [("t1", "a", "zz")]))

    def test_unknown_strategy(self):
        with pytest.raises(ValueError):
            solve_league(league({"t1": 0}), "greedy")

    def test_cap(self):
        inst, _ = build_three_team(CnfFormula(2, ((1, 2), (-1, -2))))
        with pytest.raises(EnumerationCapExceeded):
            solve_league(inst, "exhaustive", cap=1000)
        with pytest.raises(EnumerationCapExceeded):
            solve_league(inst, "pruned", cap=3)


class TestNormalize:
    def test_focus_idle(self):
        inst = league({"t1": 6, "a": 4})
        reduced, budgets = normalize_focus_wins(inst)
        assert budgets == {"a": 2}
        assert reduced.contests == ()
        assert reduced.focus_final == 6

    def test_focus_in_bp_match(self):
        inst = league({"t1": 0, "a": 0, "b": 0, "c": 0}, [("t1", "a", "b", "c")], BP_POINTS)
        reduced, budgets = normalize_focus_wins(inst)
        assert reduced.focus_final == 3
        assert budgets == {"a": 3, "b": 3, "c": 3}
        (contest,) = reduced.contests
        assert contest.teams == ("a", "b", "c") and contest.awards == (2, 1, 0)
        assert solve_league(inst, "exhaustive").winnable == reduced_oracle(reduced, budgets, 1)


@settings(max_examples=150, deadline=None)
@given(leagues(max_matches=5))
def test_pruned_matches_exhaustive(inst):
    pruned = solve_league(inst, "pruned")
    exhaustive = solve_league(inst, "exhaustive")
    assert pruned.winnable == exhaustive.winnable == oracle(inst)
    for d in (pruned, exhaustive):
        if d.winnable:
            assert verify_witness(inst, d.witness)


@settings(max_examples=60, deadline=None)
@given(leagues(max_matches=5), st.integers(1, 3))
def test_pruned_matches_exhaustive_top_b(inst, b):
    inst = LeagueInstance(inst.teams, inst.matches, inst.points_per_rank, inst.focus, b)
    assert solve_league(inst, "pruned").winnable == oracle(inst)


def test_six_three_team_matches():
    ids = ["t1"] + [f"x{i}" for i in range(1, 7)]
    pool = list(itertools.combinations(ids[1:], 3))
    for seed in range(6):
        matches = pool[seed :: 3][:6]
        scores = {t: (i * 7 + seed) % 5 for i, t in enumerate(ids)}
        scores["t1"] = 4
        inst = league(scores, matches)
        assert solve_league(inst, "pruned").winnable == solve_league(inst, "exhaustive").winnable


@settings(max_examples=80, deadline=None)
@given(leagues(max_matches=4), st.integers(0, 4))
def test_monotone_in_focus_score(inst, delta):
    if solve_league(inst).winnable:
        assert solve_league(with_focus_score(inst, delta)).winnable


@settings(max_examples=100, deadline=None)
@given(leagues(max_matches=5, focus_plays=True))
def test_focus_winning_its_games_is_wlog(inst):
    reduced, budgets = normalize_focus_wins(inst)
    assert solve_league(inst, "exhaustive").winnable == reduced_oracle(reduced, budgets, 1)
