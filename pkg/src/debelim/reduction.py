"""Hardness gadgets: 3-bounded 3-SAT to three-team and four-team debating leagues.

Naming scheme (stable, so emitted files diff cleanly and the gadget layout
can be recovered from a bare instance file):

==================  =========================================  ======
team id             role                                       budget
==================  =========================================  ======
``focus``           the team whose chances we ask about        --
``t1_x3_C2``        ring team, first game of slot C2 of x3     2
``t2_x3_C2``        ring team, second game of slot C2 of x3    3
``f_x3_C2_g1``      one-game filler in a ring game             1
``t3_x3_C2``        occurrence team linking ring and connector 1
``t3d_x3_C2``       one-game team of the connector game        2
``t4_x3_C2``        occurrence team of the clause game         2
``f_C2``            filler of a two-literal clause game        1
``dummy_m7``        four-team lift dummy added to match 7      3
``dummyF_m7``       lift dummy standing in for the focus       2
``break_1``         match-free team for the top-b variant      --
==================  =========================================  ======

Slot ``Cf`` is the fictitious third slot of a variable that occurs only twice.
Ring games of variable x, slot l: ``g1 = {t2[l-1], t1[l], third}`` and
``g2 = {t1[l], t2[l], third}``, indices taken cyclically.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .cnf import CnfFormula, conformity_violations
from .model import (
    BP_POINTS,
    THREE_TEAM_POINTS,
    LeagueInstance,
    MatchOutcome,
    TeamId,
)

BASE_SCORE = 100
FOCUS = "focus"

RING1_BUDGET = 2
RING2_BUDGET = 3
FILLER_BUDGET = 1
T3_BUDGET = 1
T3D_BUDGET = 2
T4_BUDGET = 2
LIFT_DUMMY_BUDGET = 3
FOCUS_DUMMY_BUDGET = 2


class NotConforming(ValueError):
    pass


@dataclass(frozen=True)
class RingGadget:
    var: int
    slots: tuple[str, ...]  # slot labels, e.g. ("C1", "C3", "Cf")
    t1: tuple[TeamId, ...]
    t2: tuple[TeamId, ...]
    g1: tuple[int, ...]  # match indices, one per slot
    g2: tuple[int, ...]

    def clockwise(self) -> dict[int, TeamId]:
        """Winners when every ring team wins the game named after it."""
        wins = {}
        for l in range(3):
            wins[self.g1[l]] = self.t1[l]
            wins[self.g2[l]] = self.t2[l]
        return wins

    def counter_clockwise(self) -> dict[int, TeamId]:
        wins = {}
        for l in range(3):
            wins[self.g2[l]] = self.t1[l]
            wins[self.g1[l]] = self.t2[l - 1]
        return wins


@dataclass(frozen=True)
class Occurrence:
    var: int
    clause: int  # 0-based clause index
    positive: bool
    t3: TeamId
    t3d: TeamId
    t4: TeamId
    connector: int  # match index of g3
    ring_game: int  # match index of the ring game t3 also plays


@dataclass(frozen=True)
class ClauseGadget:
    clause: int
    game: int
    t4s: tuple[TeamId, ...]
    filler: TeamId | None


@dataclass(frozen=True)
class GadgetIndex:
    formula: CnfFormula
    rings: Mapping[int, RingGadget]
    occurrences: Mapping[tuple[int, int], Occurrence]
    clause_games: tuple[ClauseGadget, ...]
    budgets: Mapping[TeamId, int]
    match_teams: tuple[tuple[TeamId, ...], ...]  # three-team view of every match
    lift_dummies: Mapping[int, TeamId] = field(default_factory=dict)
    focus_dummies: Mapping[int, TeamId] = field(default_factory=dict)
    focus: TeamId = FOCUS

    def ring_of(self, var: int) -> RingGadget:
        return self.rings[var]


def _slot_label(clause: int | None) -> str:
    return "Cf" if clause is None else f"C{clause + 1}"


def _slots_for(f: CnfFormula, var: int) -> list[tuple[int | None, bool | None]]:
    occ = f.occurrences()[var]
    slots: list[tuple[int | None, bool | None]] = [(j, pos) for j, pos in occ]
    if len(slots) == 2:
        slots.append((None, None))
    return slots


def build_three_team(f: CnfFormula) -> tuple[LeagueInstance, GadgetIndex]:
    """Three-team league that the focus team can win iff ``f`` is satisfiable.

    The focus team plays no match and has score 100; every other team's
    score is 100 minus its budget.

    Raises:
        NotConforming: ``f`` is not a conforming 3-bounded formula.
    """
    problems = conformity_violations(f)
    if problems:
        raise NotConforming("; ".join(problems))

    budgets: dict[TeamId, int] = {}
    matches: list[tuple[TeamId, ...]] = []

    def team(name: str, budget: int) -> TeamId:
        budgets[name] = budget
        return name

    connector_third: dict[tuple[int, int], TeamId] = {}
    for v in range(1, f.num_vars + 1):
        slots = _slots_for(f, v)
        labels = [_slot_label(j) for j, _ in slots]
        t1 = [team(f"t1_x{v}_{lab}", RING1_BUDGET) for lab in labels]
        t2 = [team(f"t2_x{v}_{lab}", RING2_BUDGET) for lab in labels]
        for l, (j, pos) in enumerate(slots):
            lab = labels[l]
            thirds = {}
            if j is not None:
                t3 = f"t3_x{v}_{lab}"
                connector_third[(v, j)] = t3
                thirds[2 if pos else 1] = t3
            for z in (1, 2):
                if z not in thirds:
                    thirds[z] = team(f"f_x{v}_{lab}_g{z}", FILLER_BUDGET)
            matches.append((t2[l - 1], t1[l], thirds[1]))
            matches.append((t1[l], t2[l], thirds[2]))

    for j, clause in enumerate(f.clauses):
        for lit in clause:
            v = abs(lit)
            lab = _slot_label(j)
            t3 = team(connector_third[(v, j)], T3_BUDGET)
            t3d = team(f"t3d_x{v}_{lab}", T3D_BUDGET)
            t4 = team(f"t4_x{v}_{lab}", T4_BUDGET)
            matches.append((t4, t3, t3d))

    for j, clause in enumerate(f.clauses):
        lab = _slot_label(j)
        game = tuple(f"t4_x{abs(lit)}_{lab}" for lit in clause)
        if len(clause) == 2:
            game += (team(f"f_{lab}", FILLER_BUDGET),)
        matches.append(game)

    teams = [(FOCUS, BASE_SCORE)]
    teams += [(t, BASE_SCORE - b) for t, b in budgets.items()]
    instance = LeagueInstance(tuple(teams), tuple(matches), THREE_TEAM_POINTS, FOCUS)
    gi = recover_gadget_index(instance)
    assert gi.formula == f, "gadget recovery disagrees with the construction"
    return instance, gi


_NAME = re.compile(r"^(t1|t2|t3|t3d|t4)_x(\d+)_(C\d+|Cf)$")
_LIFT = re.compile(r"^dummy(F?)_m(\d+)$")


def recover_gadget_index(instance: LeagueInstance) -> GadgetIndex:
    """Rebuild the gadget layout (and the source formula) from team ids.

    Works for three-team instances from :func:`build_three_team` and for their
    four-team lifts. Raises ``ValueError`` if the instance does not have the
    expected structure.
    """
    focus_final = instance.focus_final_score()
    lift_dummies: dict[int, TeamId] = {}
    focus_dummies: dict[int, TeamId] = {}
    for t in instance.team_ids:
        m = _LIFT.match(t)
        if m:
            (focus_dummies if m.group(1) else lift_dummies)[int(m.group(2))] = t

    by_teams: dict[frozenset, int] = {}
    match_teams = []
    for i, match in enumerate(instance.matches):
        core = tuple(instance.focus if t in focus_dummies.values() else t for t in match if t not in lift_dummies.values())
        match_teams.append(core)
        by_teams[frozenset(core)] = i

    def find(*teams: TeamId) -> int:
        key = frozenset(teams)
        if key not in by_teams:
            raise ValueError(f"no match with teams {sorted(key)}")
        return by_teams[key]

    names: dict[tuple[str, int, str], TeamId] = {}
    for t in instance.team_ids:
        m = _NAME.match(t)
        if m:
            names[(m.group(1), int(m.group(2)), m.group(3))] = t
    ring_vars = sorted({v for kind, v, _ in names if kind == "t1"})
    if not ring_vars:
        raise ValueError("instance has no ring gadgets")

    def slot_key(label: str) -> tuple[int, int]:
        return (1, 0) if label == "Cf" else (0, int(label[1:]))

    rings: dict[int, RingGadget] = {}
    occurrences: dict[tuple[int, int], Occurrence] = {}
    literals: dict[int, list[int]] = {}
    for v in ring_vars:
        labels = sorted({lab for kind, var, lab in names if kind == "t1" and var == v}, key=slot_key)
        if len(labels) != 3:
            raise ValueError(f"variable x{v} has {len(labels)} ring slots")
        t1 = tuple(names[("t1", v, lab)] for lab in labels)
        t2 = tuple(names[("t2", v, lab)] for lab in labels)
        g1, g2 = [], []
        for l, lab in enumerate(labels):
            third1 = _third(instance, by_teams, {t2[l - 1], t1[l]})
            third2 = _third(instance, by_teams, {t1[l], t2[l]})
            g1.append(find(t2[l - 1], t1[l], third1))
            g2.append(find(t1[l], t2[l], third2))
            if lab == "Cf":
                continue
            j = int(lab[1:]) - 1
            t3 = names[("t3", v, lab)]
            if t3 == third2:
                positive, ring_game = True, g2[-1]
            elif t3 == third1:
                positive, ring_game = False, g1[-1]
            else:
                raise ValueError(f"{t3} plays in neither ring game of its slot")
            t3d, t4 = names[("t3d", v, lab)], names[("t4", v, lab)]
            occurrences[(v, j)] = Occurrence(
                v, j, positive, t3, t3d, t4, find(t4, t3, t3d), ring_game
            )
            literals.setdefault(j, []).append(v if positive else -v)
        rings[v] = RingGadget(v, tuple(labels), t1, t2, tuple(g1), tuple(g2))

    clause_games = []
    clauses = []
    for j in sorted(literals):
        lab = f"C{j + 1}"
        members = [o.t4 for (v, jj), o in occurrences.items() if jj == j]
        filler = f"f_{lab}" if f"f_{lab}" in instance.scores else None
        game = find(*members, *([filler] if filler else []))
        order = [t for t in instance.matches[game] if t in members]
        lits = []
        for t4 in order:
            v = int(_NAME.match(t4).group(2))
            lits.append(v if occurrences[(v, j)].positive else -v)
        clauses.append(tuple(lits))
        clause_games.append(ClauseGadget(j, game, tuple(order), filler))
    if sorted(literals) != list(range(len(literals))):
        raise ValueError("clause numbering has gaps")

    scores = instance.scores
    budgets = {t: focus_final - s for t, s in scores.items() if t != instance.focus}
    formula = CnfFormula(max(ring_vars), tuple(clauses))
    return GadgetIndex(
        formula,
        rings,
        occurrences,
        tuple(clause_games),
        budgets,
        tuple(match_teams),
        lift_dummies,
        focus_dummies,
        instance.focus,
    )


def _third(instance: LeagueInstance, by_teams: Mapping[frozenset, int], pair: set) -> TeamId:
    hits = [key for key in by_teams if pair <= key and len(key) == 3]
    if len(hits) != 1:
        raise ValueError(f"expected one ring game containing {sorted(pair)}, found {len(hits)}")
    (third,) = hits[0] - pair
    return third


def lift_to_four(inst3: LeagueInstance) -> LeagueInstance:
    """Turn a three-team (2/1/0) league into an equivalent four-team (3/2/1/0) one.

    The focus team is placed first in each of its matches and a budget-2 dummy
    takes its seat; every match gets a budget-3 dummy. If the focus team's
    final score is below 3, all scores are raised uniformly so that no dummy
    starts below zero.
    """
    if tuple(inst3.points_per_rank) != THREE_TEAM_POINTS:
        raise ValueError("lift_to_four expects points_per_rank [2, 1, 0]")
    if not inst3.matches:
        return LeagueInstance(inst3.teams, (), BP_POINTS, inst3.focus, inst3.break_threshold)
    focus = inst3.focus
    final = inst3.focus_final_score()
    shift = max(0, LIFT_DUMMY_BUDGET - final)
    teams = [(t, s + shift) for t, s in inst3.teams if t != focus]
    teams.insert(inst3.team_ids.index(focus), (focus, final + shift))
    existing = set(inst3.team_ids)
    matches = []
    for i, match in enumerate(inst3.matches):
        lifted = []
        for t in match:
            if t == focus:
                stand_in = f"dummyF_m{i}"
                teams.append((stand_in, final + shift - FOCUS_DUMMY_BUDGET))
                lifted.append(stand_in)
            else:
                lifted.append(t)
        dummy = f"dummy_m{i}"
        teams.append((dummy, final + shift - LIFT_DUMMY_BUDGET))
        lifted.append(dummy)
        matches.append(tuple(lifted))
    if existing & {t for t, _ in teams[len(inst3.teams):]}:
        raise ValueError("dummy team ids collide with existing teams")
    return LeagueInstance(tuple(teams), tuple(matches), BP_POINTS, focus, inst3.break_threshold)


def lift_outcomes(
    outcomes: Sequence[MatchOutcome],
    focus: TeamId,
    lift_dummies: Mapping[int, TeamId] | None = None,
    focus_dummies: Mapping[int, TeamId] | None = None,
) -> list[MatchOutcome]:
    """Carry a three-team witness over to the :func:`lift_to_four` instance.

    The lift dummy wins every match; the focus team's stand-in takes second.
    No other team gains points compared to the three-team outcome.
    """
    lifted = []
    for o in outcomes:
        i = o.match_index
        dummy = (lift_dummies or {}).get(i, f"dummy_m{i}")
        ranking = list(o.ranking)
        if focus in ranking:
            ranking.remove(focus)
            ranking.insert(0, (focus_dummies or {}).get(i, f"dummyF_m{i}"))
        lifted.append(MatchOutcome(i, (dummy, *ranking)))
    return lifted


def unlift_outcomes(gi: GadgetIndex, outcomes: Sequence[MatchOutcome]) -> list[MatchOutcome]:
    """Project a four-team witness onto the three-team instance.

    Drops the lift dummy and puts the focus team back first where its stand-in
    played; nobody gains points, so a valid witness stays valid.
    """
    if not gi.lift_dummies:
        return list(outcomes)
    projected = []
    for o in outcomes:
        i = o.match_index
        stand_in = gi.focus_dummies.get(i)
        ranking = [t for t in o.ranking if t != gi.lift_dummies.get(i) and t != stand_in]
        if stand_in is not None:
            ranking.insert(0, gi.focus)
        projected.append(MatchOutcome(i, tuple(ranking)))
    return projected


def outcome_from_assignment(
    gi: GadgetIndex, assignment: Mapping[int, bool]
) -> list[MatchOutcome] | None:
    """Outcomes under which the focus team wins, built from a satisfying assignment.

    True variables get counter-clockwise rings, false ones clockwise rings.
    Each clause is credited to its first satisfied literal. For a lifted
    gadget index the witness is returned for the four-team instance.
    Returns ``None`` when ``assignment`` does not satisfy the formula.
    """
    f = gi.formula
    if not f.is_satisfied_by(assignment):
        return None
    credited = {
        j: next(abs(l) for l in clause if assignment[abs(l)] == (l > 0))
        for j, clause in enumerate(f.clauses)
    }

    rankings: dict[int, tuple[TeamId, ...]] = {}
    # t3 teams that keep their single point for the ring game
    ring_point: set[TeamId] = set()
    t3_in_game: dict[int, TeamId] = {}
    for (v, j), occ in gi.occurrences.items():
        t3_in_game[occ.ring_game] = occ.t3
        if credited[j] == v:
            rankings[occ.connector] = (occ.t3d, occ.t3, occ.t4)
        else:
            rankings[occ.connector] = (occ.t3d, occ.t4, occ.t3)
            ring_point.add(occ.t3)

    for v, ring in gi.rings.items():
        winners = ring.counter_clockwise() if assignment[v] else ring.clockwise()
        ring_teams = set(ring.t1) | set(ring.t2)
        for game, winner in winners.items():
            losers = [t for t in gi.match_teams[game] if t != winner]
            ring_loser = next(t for t in losers if t in ring_teams)
            third = next(t for t in losers if t != ring_loser)
            # a t3 credited with its clause must score nothing here; the ring
            # loser (a budget-3 team in an unforced game) takes the point
            if t3_in_game.get(game) == third and third not in ring_point:
                rankings[game] = (winner, ring_loser, third)
            else:
                rankings[game] = (winner, third, ring_loser)

    for cg in gi.clause_games:
        winner = gi.occurrences[(credited[cg.clause], cg.clause)].t4
        rest = [t for t in cg.t4s if t != winner]
        if cg.filler is not None:
            rest.append(cg.filler)
        rankings[cg.game] = (winner, *rest)

    outcomes = [MatchOutcome(i, r) for i, r in sorted(rankings.items())]
    if gi.lift_dummies:
        outcomes = lift_outcomes(outcomes, gi.focus, gi.lift_dummies, gi.focus_dummies)
    return outcomes


class OrientationError(ValueError):
    """A ring gadget's winners match neither orientation."""


def ring_orientation(ring: RingGadget, winners: Mapping[int, TeamId]) -> str:
    """Return ``"cw"`` or ``"ccw"`` for the given game winners."""
    observed = {g: winners[g] for g in (*ring.g1, *ring.g2)}
    if observed == ring.clockwise():
        return "cw"
    if observed == ring.counter_clockwise():
        return "ccw"
    raise OrientationError(f"ring of x{ring.var} has mixed orientation")


def assignment_from_outcome(gi: GadgetIndex, outcomes: Sequence[MatchOutcome]) -> dict[int, bool]:
    """Read a truth assignment off a winning witness: counter-clockwise means true.

    Accepts witnesses for the three-team instance or its four-team lift.

    Raises:
        OrientationError: some ring gadget is oriented neither way, which
            cannot happen for a witness that passes ``verify_witness``.
    """
    projected = unlift_outcomes(gi, outcomes)
    winners = {o.match_index: o.ranking[0] for o in projected}
    return {v: ring_orientation(ring, winners) == "ccw" for v, ring in sorted(gi.rings.items())}


def make_break_variant(inst: LeagueInstance, b: int) -> LeagueInstance:
    """Embed the winning question into a "finish among the best b" question.

    Adds ``b - 1`` match-free teams that already sit one point above the
    focus team's best possible final score, and raises the break threshold by
    ``b - 1``. The focus team can finish within the new threshold iff it could
    meet the old one.
    """
    if b < 1:
        raise ValueError("b must be >= 1")
    if b == 1:
        return inst
    top = inst.focus_final_score() + 1
    taken = set(inst.team_ids)
    extra = []
    i = 1
    while len(extra) < b - 1:
        name = f"break_{i}"
        if name not in taken:
            extra.append((name, top))
        i += 1
    return LeagueInstance(
        inst.teams + tuple(extra),
        inst.matches,
        inst.points_per_rank,
        inst.focus,
        inst.break_threshold + b - 1,
    )


def _dot_id(s: str) -> str:
    escaped = s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + escaped + '"'


def export_game_graph_dot(inst: LeagueInstance) -> str:
    """Render the game graph in Graphviz DOT.

    One node per match, one edge per team with two matches (labelled with
    its id and budget), one-game teams listed in the node label. The focus
    team is left out of the drawing.

    Raises:
        ValueError: some team plays three or more matches.
    """
    final = inst.focus_final_score()
    scores = inst.scores
    plays: dict[TeamId, list[int]] = {}
    for i, match in enumerate(inst.matches):
        for t in match:
            plays.setdefault(t, []).append(i)
    heavy = sorted(t for t, games in plays.items() if len(games) > 2)
    if heavy:
        raise ValueError(f"teams with more than two matches: {heavy}")

    lines = ["graph game_graph {", "  node [shape=box];"]
    for i, match in enumerate(inst.matches):
        solo = [
            f"{t} ({final - scores[t]})"
            for t in match
            if t != inst.focus and len(plays[t]) == 1
        ]
        label = "\n".join([f"m{i}", *solo])
        lines.append(f"  m{i} [label={_dot_id(label)}];")
    for t in inst.team_ids:
        games = plays.get(t, [])
        if t == inst.focus or len(games) != 2:
            continue
        a, b = games
        lines.append(f"  m{a} -- m{b} [label={_dot_id(f'{t} ({final - scores[t]})')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def isolated_ring_instance(var: int = 1) -> tuple[LeagueInstance, RingGadget]:
    """A single ring gadget with budget-1 fillers in all six third slots."""
    labels = ("C1", "C2", "C3")
    t1 = tuple(f"t1_x{var}_{lab}" for lab in labels)
    t2 = tuple(f"t2_x{var}_{lab}" for lab in labels)
    teams = [(FOCUS, BASE_SCORE)]
    teams += [(t, BASE_SCORE - RING1_BUDGET) for t in t1]
    teams += [(t, BASE_SCORE - RING2_BUDGET) for t in t2]
    matches = []
    for l, lab in enumerate(labels):
        f1, f2 = f"f_x{var}_{lab}_g1", f"f_x{var}_{lab}_g2"
        teams += [(f1, BASE_SCORE - FILLER_BUDGET), (f2, BASE_SCORE - FILLER_BUDGET)]
        matches.append((t2[l - 1], t1[l], f1))
        matches.append((t1[l], t2[l], f2))
    ring = RingGadget(var, labels, t1, t2, (0, 2, 4), (1, 3, 5))
    return LeagueInstance(tuple(teams), tuple(matches), THREE_TEAM_POINTS, FOCUS), ring


def connector_headroom(t3_has_point: bool) -> list[int]:
    """Budget ``t4`` keeps for its clause game, over every valid connector outcome.

    The connector game seats ``t4`` (budget 2), ``t3`` and ``t3d`` (budget 2).
    ``t3`` has its single point available iff ``t3_has_point``.
    """
    budgets = {"t4": T4_BUDGET, "t3": T3_BUDGET if t3_has_point else 0, "t3d": T3D_BUDGET}
    left = []
    for ranking in itertools.permutations(budgets):
        gained = dict(zip(ranking, THREE_TEAM_POINTS))
        if all(gained[t] <= budgets[t] for t in budgets):
            left.append(budgets["t4"] - gained["t4"])
    return left
