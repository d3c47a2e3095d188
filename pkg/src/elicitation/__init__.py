"""Exact receiver-optimal information design for finite signaling games."""

from .design import (
    DesignSolution,
    Mode,
    ObedienceReport,
    OpacityGap,
    RecStatus,
    SenderProfile,
    Signal,
    build_commitment_lp,
    check_obedience,
    design_value,
    opacity_gap,
    solve_commitment,
    solve_transparency_pure,
)
from .equilibrium import (
    EquilibriumTriple,
    ReceiverStrategy,
    VerificationReport,
    solve_full_transparency,
    solve_full_transparency_pure,
    to_direct_signal,
    to_separating,
    verify_equilibrium,
)
from .estimators import ReceiverDesigner
from .game import (
    Belief,
    ConditionReport,
    GameSpec,
    best_actions,
    classify_game,
    expected_receiver_utilities,
    game_to_raw,
    pooling_value,
    validate_game,
)
from .io import dump_game, load_game, parse_game
from .lp import Constraint, LinearProgram, LPResult, Status, check_feasible, solve_lp
from .scenarios import (
    ParametricScenario,
    ScenarioSolution,
    load_scenario,
    solve_email_filter,
    solve_investor,
    solve_regime_change,
)
from .value import (
    Experiment,
    SolverTag,
    ValueCurve,
    convexity_check,
    curve_from_csv,
    curve_to_csv,
    evaluate_experiment,
    solve_value,
    value_curve,
)

__version__ = "0.1.0"
