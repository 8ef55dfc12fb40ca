"""Exact elimination questions for British Parliamentary debating competitions."""

from .cnf import CnfFormula, normalize_3bounded, parse_dimacs
from .league import Decision, normalize_focus_wins, solve_league
from .model import (
    LeagueInstance,
    MatchOutcome,
    TournamentState,
    Trajectory,
    apply_outcomes,
    rank,
    validate_league,
    verify_witness,
)
from .reduction import (
    GadgetIndex,
    assignment_from_outcome,
    build_three_team,
    export_game_graph_dot,
    lift_to_four,
    make_break_variant,
    outcome_from_assignment,
)
from .tournament import (
    EquivClass,
    TournamentDecision,
    canonicalize,
    class_of,
    dp_transition,
    pair_round,
    prune_prefix,
    solve_tournament,
)

__all__ = [
    "CnfFormula",
    "Decision",
    "EquivClass",
    "GadgetIndex",
    "LeagueInstance",
    "MatchOutcome",
    "TournamentDecision",
    "TournamentState",
    "Trajectory",
    "apply_outcomes",
    "assignment_from_outcome",
    "build_three_team",
    "canonicalize",
    "class_of",
    "dp_transition",
    "export_game_graph_dot",
    "lift_to_four",
    "make_break_variant",
    "normalize_3bounded",
    "normalize_focus_wins",
    "outcome_from_assignment",
    "pair_round",
    "parse_dimacs",
    "prune_prefix",
    "rank",
    "solve_league",
    "solve_tournament",
    "validate_league",
    "verify_witness",
]
