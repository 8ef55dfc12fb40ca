import itertools
import random
from collections import Counter

import pydot
import pytest
from hypothesis import given, settings

from debelim.cnf import CnfFormula, is_conforming
from debelim.league import solve_league
from debelim.model import (
    BP_POINTS,
    THREE_TEAM_POINTS,
    LeagueInstance,
    MatchOutcome,
    apply_outcomes,
    validate_league,
    verify_witness,
)
from debelim.reduction import (
    NotConforming,
    OrientationError,
    assignment_from_outcome,
    build_three_team,
    export_game_graph_dot,
    isolated_ring_instance,
    lift_to_four,
    make_break_variant,
    outcome_from_assignment,
    recover_gadget_index,
)
from oracles import (
    all_clauses,
    conforming_formulas,
    random_conforming,
    satisfying_assignments,
    truth_table_sat,
)
from strategies import leagues

XOR = CnfFormula(2, ((1, 2), (-1, -2)))
MIXED = CnfFormula(3, ((1, 2, -3), (-1, 3), (-2, 3), (1, -2)))


def league(scores, matches=(), points=THREE_TEAM_POINTS, threshold=1):
    return LeagueInstance(tuple(scores.items()), tuple(matches), points, "t1", threshold)


def oracle(inst):
    for combo in itertools.product(*(itertools.permutations(m) for m in inst.matches)):
        final = apply_outcomes(inst, [MatchOutcome(i, r) for i, r in enumerate(combo)])
        if sum(1 for s in final.values() if s > final[inst.focus]) < inst.break_threshold:
            return True
    return False


class TestConstruction:
    def test_counts(self):
        inst, gi = build_three_team(XOR)
        assert len(inst.matches) == 18
        assert len(inst.teams) == 35
        assert sum(1 for i in range(18) if i not in {g for r in gi.rings.values() for g in r.g1 + r.g2}) == 6

    @pytest.mark.parametrize("f", [XOR, MIXED])
    def test_structure(self, f):
        inst, gi = build_three_team(f)
        assert validate_league(inst) == []
        plays = Counter(t for m in inst.matches for t in m)
        assert max(plays.values()) <= 2
        assert plays[inst.focus] == 0
        assert all(len(set(m)) == 3 for m in inst.matches)
        budgets = {t: 100 - s for t, s in inst.teams if t != inst.focus}
        assert all(budgets[t] == 2 for t in budgets if t.startswith("t1_"))
        assert all(budgets[t] == 3 for t in budgets if t.startswith("t2_"))
        assert all(budgets[t] == 1 for t in budgets if t.startswith(("f_", "t3_")))
        assert all(budgets[t] == 2 for t in budgets if t.startswith(("t3d_", "t4_")))
        assert recover_gadget_index(inst).formula == f

    def test_rejects_non_conforming(self):
        with pytest.raises(NotConforming):
            build_three_team(CnfFormula(2, ((1, 2), (1, -2))))

    def test_lift_counts(self):
        inst3, _ = build_three_team(XOR)
        inst4 = lift_to_four(inst3)
        assert len(inst4.matches) == 18 and len(inst4.teams) == 53
        assert all(len(m) == 4 for m in inst4.matches)
        assert validate_league(inst4) == []
        budgets = {t: 100 - s for t, s in inst4.teams}
        assert sum(1 for t in budgets if t.startswith("dummy_m") and budgets[t] == 3) == 18
        assert recover_gadget_index(inst4).formula == XOR

    def test_lift_without_matches(self):
        inst = league({"t1": 1, "a": 0})
        lifted = lift_to_four(inst)
        assert lifted.points_per_rank == BP_POINTS
        assert lifted.teams == inst.teams and lifted.matches == ()

    def test_lift_with_focus_playing(self):
        inst = league({"t1": 0, "a": 0, "b": 0}, [("t1", "a", "b")])
        assert inst.focus_final_score() == 2
        lifted = lift_to_four(inst)
        final = lifted.focus_final_score()
        scores = lifted.scores
        assert "t1" not in lifted.matches[0]
        assert final - scores["dummyF_m0"] == 2
        assert final - scores["dummy_m0"] == 3
        assert final - scores["a"] == 2 and final - scores["b"] == 2
        assert oracle(lifted) == oracle(inst) == solve_league(lifted).winnable


@settings(max_examples=80, deadline=None)
@given(leagues(max_matches=3))
def test_lift_preserves_the_answer(inst):
    if inst.points_per_rank != THREE_TEAM_POINTS:
        return
    lifted = lift_to_four(inst)
    assert validate_league(lifted) == []
    assert solve_league(lifted).winnable == oracle(inst)


class TestAssignmentsAndOutcomes:
    def test_satisfying_assignment_gives_witness(self):
        inst, gi = build_three_team(XOR)
        witness = outcome_from_assignment(gi, {1: True, 2: False})
        assert witness is not None and verify_witness(inst, witness)

    def test_non_satisfying_assignment_fails(self):
        _, gi = build_three_team(XOR)
        assert outcome_from_assignment(gi, {1: True, 2: True}) is None

    @pytest.mark.parametrize("seed", range(20))
    def test_round_trip(self, seed):
        f = random_conforming(random.Random(seed))
        inst3, gi3 = build_three_team(f)
        inst4 = lift_to_four(inst3)
        gi4 = recover_gadget_index(inst4)
        for a in satisfying_assignments(f):
            for inst, gi in ((inst3, gi3), (inst4, gi4)):
                witness = outcome_from_assignment(gi, a)
                assert verify_witness(inst, witness)
                back = assignment_from_outcome(gi, witness)
                assert f.is_satisfied_by(back)
                assert back == a

    def test_solver_witness_decodes(self):
        inst, gi = build_three_team(MIXED)
        decision = solve_league(inst)
        assert decision.winnable
        assert MIXED.is_satisfied_by(assignment_from_outcome(gi, decision.witness))

    def test_mixed_orientation(self):
        inst, gi = build_three_team(XOR)
        ring = gi.rings[1]
        winners = ring.clockwise()
        winners[ring.g1[0]] = ring.t2[-1]
        outcomes = []
        for i, teams in enumerate(inst.matches):
            w = winners.get(i, teams[0])
            outcomes.append(MatchOutcome(i, (w, *[t for t in teams if t != w])))
        with pytest.raises(OrientationError):
            assignment_from_outcome(gi, outcomes)


class TestBreakVariant:
    def test_b1_unchanged(self):
        inst, _ = build_three_team(XOR)
        assert make_break_variant(inst, 1) is inst

    def test_b3_on_winnable(self):
        inst = league({"t1": 2, "a": 0, "b": 1, "c": 1}, [("a", "b", "c")])
        assert oracle(inst)
        variant = make_break_variant(inst, 3)
        assert variant.break_threshold == 3
        assert sum(1 for t in variant.team_ids if t.startswith("break_")) == 2
        assert oracle(variant) and solve_league(variant).winnable

    def test_b2_with_uncatchable_team(self):
        inst = league({"t1": 2, "a": 0, "b": 1, "c": 1, "x": 9}, [("a", "b", "c")])
        variant = make_break_variant(inst, 2)
        assert oracle(inst) is False
        assert not solve_league(variant).winnable and not oracle(variant)
        top2 = league(inst.scores, inst.matches, threshold=2)
        assert solve_league(top2).winnable and oracle(top2)

    def test_rejects_b0(self):
        with pytest.raises(ValueError):
            make_break_variant(league({"t1": 0}), 0)


@settings(max_examples=80, deadline=None)
@given(leagues(max_matches=3))
def test_break_variant_equivalence(inst):
    for b in (2, 3):
        variant = make_break_variant(inst, b)
        assert solve_league(variant).winnable == solve_league(inst).winnable == oracle(variant)


class TestDot:
    def _parse(self, text):
        (graph,) = pydot.graph_from_dot_data(text)
        return graph

    def _nodes(self, graph):
        return [n.get_name() for n in graph.get_nodes() if n.get_name() not in ("node", "edge", "graph")]

    def test_single_match(self):
        inst = league({"t1": 3, "a": 0, "b": 1, "c": 2}, [("a", "b", "c")])
        graph = self._parse(export_game_graph_dot(inst))
        assert self._nodes(graph) == ["m0"]
        assert graph.get_edges() == []

    def test_ring_is_a_cycle(self):
        inst, _ = isolated_ring_instance()
        graph = self._parse(export_game_graph_dot(inst))
        nodes = self._nodes(graph)
        edges = graph.get_edges()
        assert len(nodes) == 6 and len(edges) == 6
        degree = Counter(x for e in edges for x in (e.get_source(), e.get_destination()))
        assert set(degree.values()) == {2}

    def test_gadget_graph_parses(self):
        inst, _ = build_three_team(MIXED)
        graph = self._parse(export_game_graph_dot(lift_to_four(inst)))
        assert len(graph.get_edges()) > 0

    def test_awkward_ids_are_escaped(self):
        inst = league({"t1": 3, 'a"b': 0, "c\\d": 1, "e\nf": 2}, [('a"b', "c\\d", "e\nf")])
        self._parse(export_game_graph_dot(inst))

    def test_three_games_rejected(self):
        inst = league(
            {"t1": 9, "a": 0, "b": 0, "c": 0, "d": 0},
            [("a", "b", "c"), ("a", "b", "d"), ("a", "c", "d")],
        )
        with pytest.raises(ValueError):
            export_game_graph_dot(inst)


def _sampled_small_formulas(count, seed=99):
    rng = random.Random(seed)
    pools = {n: list(all_clauses(n)) for n in range(2, 5)}
    seen = set()
    while len(seen) < count:
        n = rng.choice((3, 4, 4, 4))
        m = rng.randint(2, 5)
        f = CnfFormula(n, tuple(sorted(rng.sample(pools[n], m))))
        if f not in seen and is_conforming(f):
            seen.add(f)
    return sorted(seen, key=lambda f: (f.num_vars, f.clauses))


def _agrees(f):
    inst3, _ = build_three_team(f)
    expected = truth_table_sat(f)
    return solve_league(inst3).winnable == expected == solve_league(lift_to_four(inst3)).winnable


def test_soundness_on_sampled_small_formulas():
    formulas = _sampled_small_formulas(1000)
    assert [f.clauses for f in formulas if not _agrees(f)] == []


@pytest.mark.slow
def test_soundness_on_every_small_formula():
    assert [f.clauses for f in conforming_formulas(4, 5) if not _agrees(f)] == []
